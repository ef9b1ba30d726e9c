#include "aoi/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace aoi {

void SimConfig::validate() const {
  scenario.validate();
  if (cycles < 1) throw InvalidArgument("cycles must be >= 1");
  if (warmup_cycles < 0) throw InvalidArgument("warmup_cycles must be >= 0");
  if (cycles <= warmup_cycles) throw InvalidArgument("cycles must exceed warmup_cycles");
  if (replications < 1) throw InvalidArgument("replications must be >= 1");
  if (tagged_node < 0 || tagged_node >= scenario.n) {
    throw InvalidArgument("tagged_node must lie in [0, n)");
  }
}

namespace {

struct StreamAccum {
  bool started = false;
  double last_time = 0.0;
  double last_reset = 0.0;
  std::int64_t last_cycle = 0;
  double area = 0.0;
  double first_time = 0.0;

  std::uint64_t deliveries = 0;
  std::uint64_t type_cycles = 0;
  std::uint64_t delivered_type_cycles = 0;

  double gap_sum = 0.0;
  double gap_sq_sum = 0.0;
  std::uint64_t gaps = 0;

  double miss_sum = 0.0;
  double miss_sq_sum = 0.0;
  std::uint64_t miss_cycles = 0;

  std::vector<std::uint64_t> gap_counts;

  void deliver(std::int64_t cycle, double time, double reset, bool record_gaps) {
    ++deliveries;
    if (started) {
      const double s = time - last_time;
      area += s * (last_reset + 0.5 * s);
      gap_sum += s;
      gap_sq_sum += s * s;
      ++gaps;
      if (record_gaps) {
        const auto m = static_cast<std::size_t>(cycle - last_cycle);
        if (gap_counts.size() <= m) gap_counts.resize(m + 1, 0);
        ++gap_counts[m];
      }
    } else {
      started = true;
      first_time = time;
    }
    last_time = time;
    last_reset = reset;
    last_cycle = cycle;
  }

  // Time-averaged age over [first delivery, horizon].
  double age(double horizon) const {
    const double tail = horizon - last_time;
    const double total = area + tail * (last_reset + 0.5 * tail);
    return total / (horizon - first_time);
  }
};

struct Replication {
  std::array<StreamAccum, 2> streams;
  double horizon = 0.0;
  double busy = 0.0;
  double idle = 0.0;
  std::vector<DeliveryEvent> trace;
};

std::mt19937_64 replication_rng(std::uint64_t seed, int replication) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

// Cycle length and, if the tagged node is among the earliest k, its delay.
struct CycleDraw {
  double length;
  bool delivered;
  double own_delay;
};

class CycleSampler {
 public:
  CycleSampler(const SimConfig& cfg)
      : n_(cfg.scenario.n),
        tagged_(static_cast<std::size_t>(cfg.tagged_node)),
        sampling_(cfg.sampling),
        delays_(static_cast<std::size_t>(n_)),
        scratch_(static_cast<std::size_t>(n_)) {}

  CycleDraw draw(const ShiftedExp& d, std::int64_t k, std::mt19937_64& rng) {
    if (sampling_ == OrderSampling::Spacings) return draw_spacings(d, k, rng);
    return draw_full(d, k, rng);
  }

 private:
  CycleDraw draw_full(const ShiftedExp& d, std::int64_t k, std::mt19937_64& rng) {
    sample_delays(d, rng, delays_);
    scratch_ = delays_;
    const auto kth_pos = scratch_.begin() + (k - 1);
    std::nth_element(scratch_.begin(), kth_pos, scratch_.end());
    const double kth = *kth_pos;
    const double own = delays_[tagged_];
    bool in = own < kth;
    if (own == kth) {
      // Exact tie with the k-th value: rank by (delay, node index).
      std::int64_t ahead = 0;
      for (std::size_t j = 0; j < delays_.size(); ++j) {
        if (delays_[j] < own || (delays_[j] == own && j < tagged_)) ++ahead;
      }
      in = ahead < k;
    }
    return {kth, in, own};
  }

  CycleDraw draw_spacings(const ShiftedExp& d, std::int64_t k, std::mt19937_64& rng) {
    const auto rank = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(n_)));
    std::span<double> prefix(scratch_.data(), static_cast<std::size_t>(k));
    sample_order_prefix(d, n_, rng, prefix);
    const bool in = rank < k;
    return {prefix[static_cast<std::size_t>(k - 1)], in,
            in ? prefix[static_cast<std::size_t>(rank)] : 0.0};
  }

  std::int64_t n_;
  std::size_t tagged_;
  OrderSampling sampling_;
  std::vector<double> delays_;
  std::vector<double> scratch_;
};

Replication run_replication(const SimConfig& cfg, int index) {
  const Scenario& s = cfg.scenario;
  std::mt19937_64 rng = replication_rng(cfg.seed, index);
  CycleSampler sampler(cfg);
  Replication rep;
  const std::size_t trace_limit = index == 0 ? cfg.trace_events : 0;
  const double mu = s.mode.mu();
  const double p1 = s.mix.p1();

  double t = 0.0;
  for (std::int64_t j = 0; j < cfg.cycles; ++j) {
    const Stream type = uniform01(rng) < p1 ? Stream::I : Stream::II;
    const CycleDraw c = sampler.draw(s.delay(type), s.k(type), rng);
    const bool counted = j >= cfg.warmup_cycles;
    const double start = t;
    t += c.length;
    rep.busy += c.length;

    if (counted) {
      for (Stream st : {Stream::I, Stream::II}) {
        StreamAccum& acc = rep.streams[static_cast<std::size_t>(st)];
        const bool hit = st == type && c.delivered;
        if (st == type) {
          ++acc.type_cycles;
          if (hit) ++acc.delivered_type_cycles;
        }
        if (!hit) {
          acc.miss_sum += c.length;
          acc.miss_sq_sum += c.length * c.length;
          ++acc.miss_cycles;
        }
      }
      if (c.delivered) {
        rep.streams[static_cast<std::size_t>(type)].deliver(j, start + c.own_delay, c.own_delay,
                                                             cfg.record_gaps);
        if (rep.trace.size() < trace_limit) {
          rep.trace.push_back({type, j, start, start + c.own_delay, c.own_delay});
        }
      }
    }

    if (mu > 0.0) {
      const double z = sample_exponential(rng, mu);
      t += z;
      rep.idle += z;
    }
  }
  rep.horizon = t;
  return rep;
}

template <typename F>
Estimate across(const std::vector<Replication>& reps, F&& value) {
  const double r = static_cast<double>(reps.size());
  double sum = 0.0;
  for (const auto& rep : reps) sum += value(rep);
  const double mean = sum / r;
  if (reps.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& rep : reps) {
    const double d = value(rep) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (r - 1.0) / r)};
}

StreamEstimate merge_stream(const SimConfig& cfg, const std::vector<Replication>& reps,
                            Stream st) {
  const auto idx = static_cast<std::size_t>(st);
  const auto acc = [idx](const Replication& r) -> const StreamAccum& { return r.streams[idx]; };
  StreamEstimate out;

  bool all_started = true;
  for (const auto& r : reps) {
    const StreamAccum& a = acc(r);
    out.deliveries += a.deliveries;
    out.type_cycles += a.type_cycles;
    out.gaps += a.gaps;
    out.miss_cycles += a.miss_cycles;
    all_started = all_started && a.started;
    if (cfg.record_gaps) {
      if (out.gap_counts.size() < a.gap_counts.size()) out.gap_counts.resize(a.gap_counts.size(), 0);
      for (std::size_t m = 0; m < a.gap_counts.size(); ++m) out.gap_counts[m] += a.gap_counts[m];
    }
  }

  if (!(cfg.scenario.mix.p(st) > 0.0)) return out;  // starved: infinite age
  if (!all_started) {
    throw SimulationError(std::string("no post-warmup delivery of stream ") + name(st) +
                          " in some replication; increase cycles");
  }

  for (const auto& r : reps) out.replication_ages.push_back(acc(r).age(r.horizon));
  const Estimate age = across(reps, [&](const Replication& r) { return acc(r).age(r.horizon); });
  out.age = Age::of(age.mean);
  out.se = age.se;

  out.delivery_probability = across(reps, [&](const Replication& r) {
    const StreamAccum& a = acc(r);
    return a.type_cycles ? static_cast<double>(a.delivered_type_cycles) / static_cast<double>(a.type_cycles)
                         : 0.0;
  });
  const auto per_gap = [&](double StreamAccum::*field) {
    return [&, field](const Replication& r) {
      const StreamAccum& a = acc(r);
      return a.gaps ? a.*field / static_cast<double>(a.gaps) : 0.0;
    };
  };
  out.interarrival_m1 = across(reps, per_gap(&StreamAccum::gap_sum));
  out.interarrival_m2 = across(reps, per_gap(&StreamAccum::gap_sq_sum));
  const auto per_miss = [&](double StreamAccum::*field) {
    return [&, field](const Replication& r) {
      const StreamAccum& a = acc(r);
      return a.miss_cycles ? a.*field / static_cast<double>(a.miss_cycles) : 0.0;
    };
  };
  out.miss_cycle_m1 = across(reps, per_miss(&StreamAccum::miss_sum));
  out.miss_cycle_m2 = across(reps, per_miss(&StreamAccum::miss_sq_sum));
  return out;
}

}  // namespace

SimResult simulate(const SimConfig& cfg, Execution exec) {
  cfg.validate();
  std::vector<Replication> reps(static_cast<std::size_t>(cfg.replications));
  const int count = cfg.replications;
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < count; ++r) reps[static_cast<std::size_t>(r)] = run_replication(cfg, r);
  } else {
    for (int r = 0; r < count; ++r) reps[static_cast<std::size_t>(r)] = run_replication(cfg, r);
  }

  SimResult out;
  out.I = merge_stream(cfg, reps, Stream::I);
  out.II = merge_stream(cfg, reps, Stream::II);
  if (out.I.deliveries == 0 && out.II.deliveries == 0) {
    throw SimulationError("no deliveries to the tagged node; increase cycles");
  }
  for (const auto& r : reps) {
    out.sim_time += r.horizon;
    out.busy_time += r.busy;
    out.idle_time += r.idle;
  }
  out.cycles = static_cast<std::uint64_t>(cfg.cycles) * static_cast<std::uint64_t>(cfg.replications);
  out.trace = std::move(reps.front().trace);
  return out;
}

InterarrivalStats empirical_interarrival_moments(const SimConfig& cfg, Stream target,
                                                 Execution exec) {
  if (!(cfg.scenario.mix.p(target) > 0.0)) throw StarvedStream(target);
  const SimResult r = simulate(cfg, exec);
  const StreamEstimate& e = r.get(target);
  return {{e.interarrival_m1.mean, e.interarrival_m2.mean}, e.interarrival_m1, e.interarrival_m2,
          e.gaps};
}

Estimate empirical_delivery_probability(const SimConfig& cfg, Stream target, Execution exec) {
  if (!(cfg.scenario.mix.p(target) > 0.0)) throw StarvedStream(target);
  return simulate(cfg, exec).get(target).delivery_probability;
}

}  // namespace aoi
