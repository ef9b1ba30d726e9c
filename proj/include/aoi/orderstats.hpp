#pragma once

// Order statistics of i.i.d. shifted exponential link delays.
//
// X = shift + Exponential(rate). For X_{k:n}, the k-th smallest of n draws:
//   E[X_{k:n}]   = shift + (H_n - H_{n-k}) / rate
//   Var[X_{k:n}] = (G_n - G_{n-k}) / rate^2
// with H_n = sum 1/j and G_n = sum 1/j^2.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace aoi {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Link-delay law: shift + Exponential(rate).
///
/// The model asks for a strictly positive shift; shift == 0 is accepted and
/// gives the plain exponential law.
class ShiftedExp {
 public:
  ShiftedExp(double rate, double shift);

  double rate() const { return rate_; }
  double shift() const { return shift_; }
  double mean() const { return shift_ + 1.0 / rate_; }

  friend bool operator==(const ShiftedExp&, const ShiftedExp&) = default;

 private:
  double rate_;
  double shift_;
};

double harmonic(std::int64_t n);
double gen_harmonic(std::int64_t n);

/// H_j, G_j and prefix sums of H_j for j = 0..max_n. Immutable after
/// construction, so one instance may be shared across threads.
class HarmonicCache {
 public:
  explicit HarmonicCache(std::int64_t max_n);

  std::int64_t max_n() const { return max_n_; }
  double h(std::int64_t j) const { return h_[check(j)]; }
  double g(std::int64_t j) const { return g_[check(j)]; }
  /// sum_{i=0}^{j} H_i; j == -1 gives the empty sum.
  double h_prefix(std::int64_t j) const { return j < 0 ? 0.0 : h_prefix_[check(j)]; }

 private:
  std::size_t check(std::int64_t j) const;

  std::int64_t max_n_;
  std::vector<double> h_;
  std::vector<double> g_;
  std::vector<double> h_prefix_;
};

// Exact moments. All reject k outside [1, n] and n beyond the cache.
double os_mean(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k, std::int64_t n);
double os_var(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k, std::int64_t n);
double os_second_moment(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k, std::int64_t n);

/// Mean delay of a node that is among the earliest k of n:
/// (1/k) sum_{i=1}^{k} E[X_{i:n}] = shift + H_n/rate - (1/(k rate)) sum_{i=1}^{k} H_{n-i}.
double mean_first_k(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k, std::int64_t n);

// Large-n forms with k = alpha * n; alpha must lie in (0, 1).
double mean_first_k_approx(const ShiftedExp& d, double alpha);
/// shift - log(1 - alpha)/rate. Diverges as alpha -> 1.
double delta_threshold(const ShiftedExp& d, double alpha);

/// Uniform in [0, 1) from the top 53 bits of one 64-bit draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sample_exponential(std::mt19937_64& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

/// Uniform integer in [0, bound).
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * bound) >> 64);
}

/// Fills `out` with i.i.d. draws of d.
void sample_delays(const ShiftedExp& d, std::mt19937_64& rng, std::span<double> out);
std::vector<double> sample_delays(const ShiftedExp& d, std::int64_t n, std::mt19937_64& rng);

/// Draws X_{1:n}, ..., X_{k:n} jointly through exponential spacings:
/// X_{i:n} = shift + sum_{j<=i} E_j / (rate (n - j + 1)). `out` has size k.
void sample_order_prefix(const ShiftedExp& d, std::int64_t n, std::mt19937_64& rng,
                         std::span<double> out);

}  // namespace aoi
