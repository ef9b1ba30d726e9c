#pragma once

// Discrete-event Monte Carlo simulation of the earliest-k multicast protocol,
// observed at one tagged receiver.
//
// Each cycle draws an update type, the n link delays of that type, ends at the
// k-th smallest delay, and delivers to the tagged node iff its delay is among
// the earliest k (ties go to the lower node index). On delivery the node's age
// for that stream resets to its own link delay. Exogenous mode appends an
// Exponential(mu) idle gap after each cycle. Age integrals are accumulated in
// closed form from the sawtooth, so results depend only on seed and cycle count.

#include <cstdint>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/parallel.hpp"

namespace aoi {

inline constexpr std::uint64_t kDefaultSeed = 20190125;

enum class OrderSampling {
  FullSample,  // draw all n delays and select (reference)
  Spacings,    // draw only X_{1:n}..X_{k:n} and a uniform rank for the tagged node
};

struct SimConfig {
  Scenario scenario;
  std::int64_t cycles = 1'000'000;  // per replication, warmup included
  std::uint64_t seed = kDefaultSeed;
  std::int64_t warmup_cycles = 1000;
  int replications = 10;
  std::int64_t tagged_node = 0;
  OrderSampling sampling = OrderSampling::FullSample;
  /// Histogram of cycles between consecutive deliveries, per stream.
  bool record_gaps = false;
  /// Number of delivery events of replication 0 kept in SimResult::trace.
  std::size_t trace_events = 0;

  void validate() const;
};

struct DeliveryEvent {
  Stream stream;
  std::int64_t cycle;
  double cycle_start;
  double time;
  double reset_age;
};

/// Across-replication mean and standard error (0 with one replication).
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct StreamEstimate {
  Age age = Age::infinite();
  double se = 0.0;
  std::uint64_t deliveries = 0;
  std::uint64_t type_cycles = 0;  // post-warmup cycles carrying this stream
  /// Fraction of this stream's cycles that reached the tagged node.
  Estimate delivery_probability;
  /// Inter-delivery time S at the tagged node.
  Estimate interarrival_m1;
  Estimate interarrival_m2;
  std::uint64_t gaps = 0;
  /// Busy duration of cycles in which this stream did not reach the node.
  Estimate miss_cycle_m1;
  Estimate miss_cycle_m2;
  std::uint64_t miss_cycles = 0;
  /// gap_counts[m] = number of inter-delivery gaps spanning m cycles.
  std::vector<std::uint64_t> gap_counts;
  std::vector<double> replication_ages;
};

struct SimResult {
  StreamEstimate I;
  StreamEstimate II;
  double sim_time = 0.0;   // sum of horizons over replications
  double busy_time = 0.0;  // sum of cycle busy durations
  double idle_time = 0.0;  // sum of exogenous idle gaps
  std::uint64_t cycles = 0;
  std::vector<DeliveryEvent> trace;

  const StreamEstimate& get(Stream s) const { return s == Stream::I ? I : II; }
  AgePair ages() const { return {I.age, II.age}; }
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replications run in parallel under Execution::Parallel; the merge is in
/// replication order, so both policies give identical results.
SimResult simulate(const SimConfig& cfg, Execution exec = Execution::Parallel);

struct InterarrivalStats {
  Moments2 moments;
  Estimate m1;
  Estimate m2;
  std::uint64_t gaps = 0;
};

InterarrivalStats empirical_interarrival_moments(const SimConfig& cfg, Stream target,
                                                 Execution exec = Execution::Parallel);

Estimate empirical_delivery_probability(const SimConfig& cfg, Stream target,
                                        Execution exec = Execution::Parallel);

}  // namespace aoi
