#pragma once

// Weighted threshold selection: minimize beta * age_I + (1 - beta) * age_II
// over (k1, k2) in {1..n}^2, or over (alpha1, alpha2) in (0, 1)^2 with the
// large-n evaluators, and the pareto frontier traced by sweeping beta.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/parallel.hpp"

namespace aoi {

enum class Evaluator { Exact, Approx };

enum class ExactSearch {
  Exhaustive,
  CoarseToFine,  // strided scan, then shrinking windows around the incumbent
};

/// A scenario without thresholds. Pinning a threshold restricts the search
/// to that single value.
struct ScenarioTemplate {
  std::int64_t n = 100;
  ShiftedExp delay_I{1.0, 1.0};
  ShiftedExp delay_II{1.0, 1.0};
  StreamMix mix{0.5};
  Generation mode = Generation::at_will();

  std::optional<std::int64_t> pin_k1;
  std::optional<std::int64_t> pin_k2;
  std::optional<double> pin_alpha1;
  std::optional<double> pin_alpha2;

  Scenario with_thresholds(std::int64_t k1, std::int64_t k2) const;
  ScenarioApprox with_alphas(double alpha1, double alpha2) const;
};

struct OptimizeOptions {
  Evaluator evaluator = Evaluator::Exact;
  ExactSearch search = ExactSearch::Exhaustive;
  /// Exhaustive search above this n requires allow_large_exhaustive.
  std::int64_t exhaustive_limit = 2048;
  bool allow_large_exhaustive = false;
  /// Approx mode: G points per axis at i / (G + 1), i = 1..G.
  int alpha_grid = 512;
  /// Local zoom rounds around the grid optimum; each shrinks the window 4x.
  int refine_rounds = 6;
  Execution exec = Execution::Parallel;
};

struct ParetoPoint {
  double beta = 0.0;
  Evaluator evaluator = Evaluator::Exact;
  std::int64_t k1 = 0;  // exact mode only
  std::int64_t k2 = 0;
  double alpha1 = 0.0;  // approx mode; k/n in exact mode
  double alpha2 = 0.0;
  Age age_I = Age::infinite();
  Age age_II = Age::infinite();
  Age objective = Age::infinite();
};

class StarvedObjective : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Weighted objective; beta == 1 ignores age_II and beta == 0 ignores age_I.
Age weighted_objective(double beta, const Age& age_I, const Age& age_II);

/// Throws StarvedObjective if beta puts positive weight on a starved stream
/// and InvalidArgument if beta is outside [0, 1]. Ties in the objective go to
/// the lexicographically smallest (k1, k2) or (alpha1, alpha2).
ParetoPoint optimize(const ScenarioTemplate& t, double beta, const OptimizeOptions& opts = {});

/// One optimum per beta, reduced to the non-dominated set in (age_I, age_II),
/// sorted by age_I ascending.
std::vector<ParetoPoint> pareto_frontier(const ScenarioTemplate& t, std::span<const double> betas,
                                         const OptimizeOptions& opts = {});

/// Keeps points not dominated by any other; exact duplicates collapse to the
/// first occurrence. Sorted by (age_I, age_II).
std::vector<ParetoPoint> non_dominated(std::vector<ParetoPoint> points);

/// `count` evenly spaced values in [0, 1], endpoints included.
std::vector<double> beta_sweep(int count = 33);

/// i / (G + 1) for i = 1..G.
std::vector<double> alpha_grid(int g);

struct MonotonicityReport {
  std::vector<double> alpha2;
  std::vector<double> age_I;
  bool strictly_increasing = false;
  bool constant = false;
  /// Corollary-form coefficients of age_I as a ratio in delta_2:
  /// c1 + (c2 d1^2 + c3 d1 d2 + c4 d2^2) / (c5 d1 + c6 d2).
  double c2c6 = 0.0;
  double c3c5 = 0.0;
  bool coefficient_condition = false;  // c2 c6 < c3 c5
  std::size_t argmin = 0;
};

/// Evaluates the large-n at-will type-I age along `alpha2_grid` at fixed
/// alpha1 and checks that it increases strictly in alpha2.
MonotonicityReport lemma1_monotonicity_check(const ScenarioTemplate& t, double alpha1,
                                             std::span<const double> alpha2_grid);

}  // namespace aoi
