#include "aoi/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace aoi {

Scenario ScenarioTemplate::with_thresholds(std::int64_t k1, std::int64_t k2) const {
  Scenario s{n, k1, k2, delay_I, delay_II, mix, mode};
  s.validate();
  return s;
}

ScenarioApprox ScenarioTemplate::with_alphas(double alpha1, double alpha2) const {
  ScenarioApprox sa{alpha1, alpha2, delay_I, delay_II, mix, mode};
  sa.validate();
  return sa;
}

Age weighted_objective(double beta, const Age& age_I, const Age& age_II) {
  if (beta == 1.0) return age_I;
  if (beta == 0.0) return age_II;
  if (age_I.is_infinite() || age_II.is_infinite()) return Age::infinite();
  return Age::of(beta * age_I.value() + (1.0 - beta) * age_II.value());
}

std::vector<double> beta_sweep(int count) {
  if (count < 1) throw InvalidArgument("beta sweep needs at least one value");
  if (count == 1) return {0.5};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = i / static_cast<double>(count - 1);
  return out;
}

std::vector<double> alpha_grid(int g) {
  if (g < 1) throw InvalidArgument("alpha grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(g));
  for (int i = 1; i <= g; ++i) out[static_cast<std::size_t>(i - 1)] = i / static_cast<double>(g + 1);
  return out;
}

namespace {

struct Best {
  std::size_t i = 0;
  std::size_t j = 0;
  Age objective = Age::infinite();
  bool valid = false;

  // Total order (objective, i, j); keeps the result independent of scan order.
  bool better_than(const Best& o) const {
    if (!o.valid) return valid;
    if (!valid) return false;
    const auto c = objective <=> o.objective;
    if (c != 0) return c < 0;
    return i != o.i ? i < o.i : j < o.j;
  }
};

// Argmin of objective(i, j) over [0, rows) x [0, cols).
template <typename F>
Best scan(std::size_t rows, std::size_t cols, F&& objective, Execution exec) {
  Best best;
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const Best cand{i, j, objective(i, j), true};
        if (cand.better_than(best)) best = cand;
      }
    }
    return best;
  }
  const auto total = static_cast<std::int64_t>(rows);
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(static) nowait
    for (std::int64_t ii = 0; ii < total; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t j = 0; j < cols; ++j) {
        const Best cand{i, j, objective(i, j), true};
        if (cand.better_than(local)) local = cand;
      }
    }
#pragma omp critical(aoi_scan_merge)
    {
      if (local.better_than(best)) best = local;
    }
  }
  return best;
}

void check_beta(const ScenarioTemplate& t, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in [0, 1]");
  if (t.n < 1) throw InvalidArgument("n must be >= 1");
  if (beta > 0.0 && !(t.mix.p1() > 0.0)) {
    throw StarvedObjective("beta weights stream I, which is starved (p1 = 0)");
  }
  if (beta < 1.0 && !(t.mix.p2() > 0.0)) {
    throw StarvedObjective("beta weights stream II, which is starved (p1 = 1)");
  }
}

// --- exact evaluator --------------------------------------------------------

class ExactTable {
 public:
  ExactTable(const ScenarioTemplate& t, const HarmonicCache& hc) : t_(t) {
    stats_I_.reserve(static_cast<std::size_t>(t.n));
    stats_II_.reserve(static_cast<std::size_t>(t.n));
    for (std::int64_t k = 1; k <= t.n; ++k) {
      stats_I_.push_back(threshold_stats(hc, t.delay_I, k, t.n));
      stats_II_.push_back(threshold_stats(hc, t.delay_II, k, t.n));
    }
  }

  AgePair ages(std::int64_t k1, std::int64_t k2) const {
    const double n = static_cast<double>(t_.n);
    const auto& s1 = stats_I_[static_cast<std::size_t>(k1 - 1)];
    const auto& s2 = stats_II_[static_cast<std::size_t>(k2 - 1)];
    const double p1 = t_.mix.p1();
    const double p2 = t_.mix.p2();
    const double mu = t_.mode.mu();
    return {renewal_age(s1, s2, p1, p2, static_cast<double>(k1) / n, mu),
            renewal_age(s2, s1, p2, p1, static_cast<double>(k2) / n, mu)};
  }

 private:
  const ScenarioTemplate& t_;
  std::vector<ThresholdStats> stats_I_;
  std::vector<ThresholdStats> stats_II_;
};

std::vector<std::int64_t> threshold_axis(std::optional<std::int64_t> pin, std::int64_t lo,
                                         std::int64_t hi, std::int64_t stride, std::int64_t n) {
  if (pin) {
    if (*pin < 1 || *pin > n) throw InvalidArgument("pinned threshold outside [1, n]");
    return {*pin};
  }
  std::vector<std::int64_t> out;
  lo = std::max<std::int64_t>(lo, 1);
  hi = std::min(hi, n);
  for (std::int64_t k = lo; k <= hi; k += stride) out.push_back(k);
  if (out.empty() || out.back() != hi) out.push_back(hi);
  return out;
}

struct ExactPick {
  std::int64_t k1;
  std::int64_t k2;
  Age objective;
};

ExactPick scan_thresholds(const ExactTable& table, double beta, const std::vector<std::int64_t>& a1,
                          const std::vector<std::int64_t>& a2, Execution exec) {
  const Best b = scan(
      a1.size(), a2.size(),
      [&](std::size_t i, std::size_t j) {
        const AgePair ages = table.ages(a1[i], a2[j]);
        return weighted_objective(beta, ages.age_I, ages.age_II);
      },
      exec);
  return {a1[b.i], a2[b.j], b.objective};
}

ExactPick search_exact(const ScenarioTemplate& t, const ExactTable& table, double beta,
                       const OptimizeOptions& opts) {
  const std::int64_t n = t.n;
  if (opts.search == ExactSearch::Exhaustive) {
    if (n > opts.exhaustive_limit && !opts.allow_large_exhaustive) {
      throw InvalidArgument("exhaustive search over n = " + std::to_string(n) +
                            " needs allow_large_exhaustive; use coarse-to-fine or approx mode");
    }
    return scan_thresholds(table, beta, threshold_axis(t.pin_k1, 1, n, 1, n),
                           threshold_axis(t.pin_k2, 1, n, 1, n), opts.exec);
  }

  std::int64_t stride = std::max<std::int64_t>(1, n / 256);
  ExactPick best = scan_thresholds(table, beta, threshold_axis(t.pin_k1, 1, n, stride, n),
                                   threshold_axis(t.pin_k2, 1, n, stride, n), opts.exec);
  while (stride > 1) {
    const std::int64_t next = std::max<std::int64_t>(1, stride / 4);
    const ExactPick cand = scan_thresholds(
        table, beta, threshold_axis(t.pin_k1, best.k1 - stride, best.k1 + stride, next, n),
        threshold_axis(t.pin_k2, best.k2 - stride, best.k2 + stride, next, n), opts.exec);
    if (cand.objective < best.objective ||
        (cand.objective == best.objective && std::pair(cand.k1, cand.k2) < std::pair(best.k1, best.k2))) {
      best = cand;
    }
    stride = next;
  }
  return best;
}

// --- approx evaluator -------------------------------------------------------

AgePair approx_ages(const ScenarioTemplate& t, const ApproxStats& s1, const ApproxStats& s2,
                    double alpha1, double alpha2) {
  const double p1 = t.mix.p1();
  const double p2 = t.mix.p2();
  const double mu = t.mode.mu();
  return {approx_age(s1, s2, p1, p2, alpha1, mu), approx_age(s2, s1, p2, p1, alpha2, mu)};
}

struct ApproxPick {
  double alpha1;
  double alpha2;
  Age objective;
};

ApproxPick scan_alphas(const ScenarioTemplate& t, double beta, const std::vector<double>& a1,
                       const std::vector<double>& a2, Execution exec) {
  std::vector<ApproxStats> s1;
  std::vector<ApproxStats> s2;
  for (double a : a1) s1.push_back(approx_stats(t.delay_I, a));
  for (double a : a2) s2.push_back(approx_stats(t.delay_II, a));
  const Best b = scan(
      a1.size(), a2.size(),
      [&](std::size_t i, std::size_t j) {
        const AgePair ages = approx_ages(t, s1[i], s2[j], a1[i], a2[j]);
        return weighted_objective(beta, ages.age_I, ages.age_II);
      },
      exec);
  return {a1[b.i], a2[b.j], b.objective};
}

constexpr double kRefineGain = 1e-14;

std::vector<double> refine_axis(std::optional<double> pin, double center, double half, double lo,
                                double hi) {
  if (pin) return {*pin};
  const double a = std::max(lo, center - half);
  const double b = std::min(hi, center + half);
  std::vector<double> out;
  constexpr int kSteps = 8;
  for (int i = 0; i <= kSteps; ++i) out.push_back(i == kSteps ? b : a + (b - a) * i / kSteps);
  return out;
}

ApproxPick search_approx(const ScenarioTemplate& t, double beta, const OptimizeOptions& opts) {
  const std::vector<double> grid = alpha_grid(opts.alpha_grid);
  const auto axis = [&](std::optional<double> pin) {
    if (pin && !(*pin > 0.0 && *pin < 1.0)) throw InvalidArgument("pinned alpha outside (0, 1)");
    return pin ? std::vector<double>{*pin} : grid;
  };
  ApproxPick best = scan_alphas(t, beta, axis(t.pin_alpha1), axis(t.pin_alpha2), opts.exec);

  const double lo = grid.front();
  const double hi = grid.back();
  double half = 1.0 / (opts.alpha_grid + 1);
  for (int round = 0; round < opts.refine_rounds; ++round) {
    const ApproxPick cand =
        scan_alphas(t, beta, refine_axis(t.pin_alpha1, best.alpha1, half, lo, hi),
                    refine_axis(t.pin_alpha2, best.alpha2, half, lo, hi), opts.exec);
    // Moves below rounding noise would break ties arbitrarily near a flat minimum.
    if (cand.objective.is_finite() &&
        (best.objective.is_infinite() ||
         cand.objective.value() < best.objective.value() * (1.0 - kRefineGain))) {
      best = cand;
    }
    half /= 4.0;
  }
  return best;
}

}  // namespace

ParetoPoint optimize(const ScenarioTemplate& t, double beta, const OptimizeOptions& opts) {
  check_beta(t, beta);
  ParetoPoint p;
  p.beta = beta;
  p.evaluator = opts.evaluator;
  if (opts.evaluator == Evaluator::Exact) {
    const HarmonicCache hc(t.n);
    const ExactTable table(t, hc);
    const ExactPick pick = search_exact(t, table, beta, opts);
    const AgePair ages = table.ages(pick.k1, pick.k2);
    p.k1 = pick.k1;
    p.k2 = pick.k2;
    p.alpha1 = static_cast<double>(pick.k1) / static_cast<double>(t.n);
    p.alpha2 = static_cast<double>(pick.k2) / static_cast<double>(t.n);
    p.age_I = ages.age_I;
    p.age_II = ages.age_II;
  } else {
    const ApproxPick pick = search_approx(t, beta, opts);
    const AgePair ages = approx_ages(t, approx_stats(t.delay_I, pick.alpha1),
                                     approx_stats(t.delay_II, pick.alpha2), pick.alpha1, pick.alpha2);
    p.alpha1 = pick.alpha1;
    p.alpha2 = pick.alpha2;
    p.age_I = ages.age_I;
    p.age_II = ages.age_II;
  }
  p.objective = weighted_objective(beta, p.age_I, p.age_II);
  return p;
}

std::vector<ParetoPoint> non_dominated(std::vector<ParetoPoint> points) {
  const auto dominates = [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.age_I <= b.age_I && a.age_II <= b.age_II && (a.age_I < b.age_I || a.age_II < b.age_II);
  };
  std::vector<ParetoPoint> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < points.size() && !drop; ++j) {
      if (j == i) continue;
      const bool same = points[j].age_I == points[i].age_I && points[j].age_II == points[i].age_II;
      drop = dominates(points[j], points[i]) || (same && j < i);
    }
    if (!drop) kept.push_back(points[i]);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    if (a.age_I != b.age_I) return a.age_I < b.age_I;
    return a.age_II < b.age_II;
  });
  return kept;
}

std::vector<ParetoPoint> pareto_frontier(const ScenarioTemplate& t, std::span<const double> betas,
                                         const OptimizeOptions& opts) {
  if (betas.empty()) throw InvalidArgument("pareto frontier needs at least one beta");
  for (double b : betas) {
    if (!(b >= 0.0 && b <= 1.0)) throw InvalidArgument("beta must lie in [0, 1]");
  }
  std::vector<ParetoPoint> points;
  points.reserve(betas.size());
  for (double b : betas) points.push_back(optimize(t, b, opts));
  return non_dominated(std::move(points));
}

MonotonicityReport lemma1_monotonicity_check(const ScenarioTemplate& t, double alpha1,
                                             std::span<const double> alpha2_grid) {
  if (t.mode.is_exogenous()) throw InvalidArgument("monotonicity check uses the at-will form");
  if (alpha2_grid.empty()) throw InvalidArgument("alpha2 grid is empty");
  MonotonicityReport r;
  for (double a2 : alpha2_grid) {
    r.alpha2.push_back(a2);
    r.age_I.push_back(age_atwill_approx(t.with_alphas(alpha1, a2), Stream::I).value());
  }
  r.strictly_increasing = true;
  r.constant = true;
  for (std::size_t i = 1; i < r.age_I.size(); ++i) {
    r.strictly_increasing = r.strictly_increasing && r.age_I[i] > r.age_I[i - 1];
    r.constant = r.constant && r.age_I[i] == r.age_I[i - 1];
  }
  r.argmin = static_cast<std::size_t>(std::min_element(r.age_I.begin(), r.age_I.end()) - r.age_I.begin());

  const double p1 = t.mix.p1();
  const double p2 = t.mix.p2();
  const double c2 = (2.0 - alpha1) * p1 * p1;
  const double c3 = 2.0 * p1 * p2 * (2.0 - alpha1);
  const double c5 = 2.0 * p1 * p1 * alpha1;
  const double c6 = 2.0 * p1 * p2 * alpha1;
  r.c2c6 = c2 * c6;
  r.c3c5 = c3 * c5;
  r.coefficient_condition = r.c2c6 < r.c3c5;
  return r;
}

}  // namespace aoi
