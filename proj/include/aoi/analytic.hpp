#pragma once

// Closed-form average age of two update streams at one receiver under the
// earliest-k1 / earliest-k2 multicast protocol.
//
// Every evaluator reduces to the renewal decomposition
//   age = E[delay of a delivered update] + E[S^2] / (2 E[S])
// where S is the gap between consecutive deliveries of the stream to a node.
// The type-II age is the type-I age of the swapped scenario.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "aoi/orderstats.hpp"

namespace aoi {

enum class Stream { I, II };

inline Stream other(Stream s) { return s == Stream::I ? Stream::II : Stream::I; }
inline const char* name(Stream s) { return s == Stream::I ? "I" : "II"; }

/// Thrown by moment-level operations when the target stream is never sent.
class StarvedStream : public std::domain_error {
 public:
  explicit StarvedStream(Stream s)
      : std::domain_error(std::string("stream ") + name(s) + " is starved"), stream_(s) {}
  Stream stream() const { return stream_; }

 private:
  Stream stream_;
};

/// An average age, or the signal that the stream is starved. Infinite ages
/// order after every finite one.
class Age {
 public:
  static Age of(double v) { return Age(v, false); }
  static Age infinite() { return Age(0.0, true); }

  bool is_finite() const { return !infinite_; }
  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error on an infinite age.
  double value() const;
  double value_or(double fallback) const { return infinite_ ? fallback : value_; }

  friend std::partial_ordering operator<=>(const Age& a, const Age& b);
  friend bool operator==(const Age& a, const Age& b);

 private:
  Age(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

struct AgePair {
  Age age_I = Age::infinite();
  Age age_II = Age::infinite();

  const Age& get(Stream s) const { return s == Stream::I ? age_I : age_II; }
};

/// First and second moment of a nonnegative random variable.
struct Moments2 {
  double m1 = 0.0;
  double m2 = 0.0;

  double variance() const { return m2 - m1 * m1; }
  friend bool operator==(const Moments2&, const Moments2&) = default;
};

/// p1 is the probability an update is type I. p2 is stored, not recomputed,
/// so swapping the streams is exact.
class StreamMix {
 public:
  explicit StreamMix(double p1);

  double p1() const { return p1_; }
  double p2() const { return p2_; }
  double p(Stream s) const { return s == Stream::I ? p1_ : p2_; }
  StreamMix swapped() const { return StreamMix(p2_, p1_); }

  friend bool operator==(const StreamMix&, const StreamMix&) = default;

 private:
  StreamMix(double p1, double p2) : p1_(p1), p2_(p2) {}
  double p1_;
  double p2_;
};

/// At-will (zero-wait) generation or Poisson arrivals of total rate mu.
class Generation {
 public:
  static Generation at_will() { return Generation(0.0); }
  static Generation exogenous(double mu);

  bool is_exogenous() const { return mu_ > 0.0; }
  /// Poisson rate; 0 for at-will generation.
  double mu() const { return mu_; }

  friend bool operator==(const Generation&, const Generation&) = default;

 private:
  explicit Generation(double mu) : mu_(mu) {}
  double mu_;
};

struct Scenario {
  std::int64_t n = 1;
  std::int64_t k1 = 1;
  std::int64_t k2 = 1;
  ShiftedExp delay_I{1.0, 1.0};
  ShiftedExp delay_II{1.0, 1.0};
  StreamMix mix{0.5};
  Generation mode = Generation::at_will();

  std::int64_t k(Stream s) const { return s == Stream::I ? k1 : k2; }
  const ShiftedExp& delay(Stream s) const { return s == Stream::I ? delay_I : delay_II; }
  /// Probability that a single update of stream s reaches a given node.
  double q(Stream s) const { return static_cast<double>(k(s)) / static_cast<double>(n); }

  /// Exchanges the roles of the two streams.
  Scenario swapped() const;
  /// Throws InvalidArgument on n < 1 or thresholds outside [1, n].
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Large-n scenario with k_i = alpha_i * n.
struct ScenarioApprox {
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  ShiftedExp delay_I{1.0, 1.0};
  ShiftedExp delay_II{1.0, 1.0};
  StreamMix mix{0.5};
  Generation mode = Generation::at_will();

  double alpha(Stream s) const { return s == Stream::I ? alpha1 : alpha2; }
  const ShiftedExp& delay(Stream s) const { return s == Stream::I ? delay_I : delay_II; }
  ScenarioApprox swapped() const;
  /// Throws InvalidArgument unless both alphas lie in (0, 1).
  void validate() const;
};

// --- kernels shared with the optimizer --------------------------------------

/// Per-threshold quantities of one stream: moments of the cycle X_{k:n} and the
/// mean delay of a node among the earliest k.
struct ThresholdStats {
  Moments2 cycle;
  double delivered_mean = 0.0;
};

ThresholdStats threshold_stats(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k,
                               std::int64_t n);

/// Age of the "own" stream given both streams' threshold statistics, the
/// per-update probabilities and the own delivery probability q = k/n.
/// `mu` is 0 for at-will generation.
Age renewal_age(const ThresholdStats& own, const ThresholdStats& other, double p_own,
                double p_other, double q_own, double mu);

/// Large-n quantities of one stream at ratio alpha.
struct ApproxStats {
  double delta = 0.0;           // delta(alpha) ~ E[X_{k:n}]
  double delivered_mean = 0.0;  // large-n mean_first_k
};

ApproxStats approx_stats(const ShiftedExp& d, double alpha);

/// Corollary-form large-n age of the "own" stream. `mu` is 0 for at-will.
Age approx_age(const ApproxStats& own, const ApproxStats& other, double p_own, double p_other,
               double alpha_own, double mu);

// --- scenario-level operations ----------------------------------------------

/// Moments of the number of cycles between deliveries, geometric with success
/// probability p: m1 = 1/p, m2 = (2-p)/p^2. Throws StarvedStream(target) when
/// p <= 0 and InvalidArgument when p > 1.
Moments2 geometric_moments(double p, Stream target = Stream::I);

struct YbarMoments {
  Moments2 moments;
  /// True when the target stream reaches the node in every cycle (p = q = 1);
  /// the conditioning event is empty and `moments` holds the unconditioned
  /// cycle moments of the target stream.
  bool degenerate = false;
};

/// Moments of one cycle (busy part only, in exogenous mode) conditioned on the
/// target stream not reaching the tagged node in that cycle.
YbarMoments ybar_moments(const HarmonicCache& hc, const Scenario& s, Stream target);

/// Moments of the inter-delivery time S of the target stream at a node.
Moments2 s_moments_atwill(const HarmonicCache& hc, const Scenario& s, Stream target);
Moments2 s_moments_exogenous(const HarmonicCache& hc, const Scenario& s, Stream target);

Age age_atwill_exact(const HarmonicCache& hc, const Scenario& s, Stream target);
Age age_exogenous_exact(const HarmonicCache& hc, const Scenario& s, Stream target);
/// Dispatches on s.mode.
Age age_exact(const HarmonicCache& hc, const Scenario& s, Stream target);

Age age_atwill_approx(const ScenarioApprox& sa, Stream target);
Age age_exogenous_approx(const ScenarioApprox& sa, Stream target);
Age age_approx(const ScenarioApprox& sa, Stream target);

AgePair age_pair(const HarmonicCache& hc, const Scenario& s);
/// Builds a cache of size s.n.
AgePair age_pair(const Scenario& s);
AgePair age_pair(const ScenarioApprox& sa);

}  // namespace aoi
