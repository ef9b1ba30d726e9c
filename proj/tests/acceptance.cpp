// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs the full-size simulations, so expect a few minutes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "aoi/analytic.hpp"
#include "aoi/cli.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/sim.hpp"
#include "support.hpp"

#ifndef AOI_SCENARIO_DIR
#define AOI_SCENARIO_DIR "scenarios"
#endif

using namespace aoi;
using aoi::test::rel_diff;
using aoi::test::ulp_distance;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const ShiftedExp kDelayI{1.0, 1.0};
const ShiftedExp kDelayII{2.0, 0.5};

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// The 12 oracle-grid scenarios; mu = 0 means at-will.
std::vector<Scenario> oracle_grid(double mu) {
  std::vector<Scenario> out;
  for (std::int64_t n : {5, 20, 100}) {
    struct Point {
      std::int64_t k1, k2;
      double p1;
    };
    for (const Point pt : {Point{1, 1, 0.5}, Point{ceil_div(n, 3), ceil_div(n, 2), 0.6}}) {
      for (bool exo : {false, true}) {
        Scenario s{n, pt.k1, pt.k2, kDelayI, kDelayII, StreamMix(pt.p1), Generation::at_will()};
        if (exo) s.mode = Generation::exogenous(mu);
        out.push_back(s);
      }
    }
  }
  return out;
}

Outcome oracle_grid_agreement() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst_rel = 0.0;
  double worst_sigma = 0.0;
  for (const Scenario& s : oracle_grid(2.0)) {
    SimConfig cfg;
    cfg.scenario = s;
    const SimResult r = simulate(cfg);
    const AgePair a = age_pair(s);
    for (Stream st : {Stream::I, Stream::II}) {
      const double exact = a.get(st).value();
      const StreamEstimate& e = r.get(st);
      const double err = std::abs(e.age.value() - exact);
      const bool ok = err <= std::max(0.01 * exact, 3.0 * e.se);
      worst_rel = std::max(worst_rel, err / exact);
      worst_sigma = std::max(worst_sigma, err / e.se);
      if (!ok) {
        o.pass = false;
        std::fprintf(stderr, "  grid miss: n=%lld k=(%lld,%lld) mu=%g stream %s sim %.6f +- %.6f exact %.6f\n",
                     static_cast<long long>(s.n), static_cast<long long>(s.k1),
                     static_cast<long long>(s.k2), s.mode.mu(), name(st), e.age.value(), e.se, exact);
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > 600.0) o.pass = false;
  o.detail = fmt("worst rel err %.3g, worst |z| %.2f, runtime %.0f s (limit 600)", worst_rel,
                 worst_sigma, secs);
  return o;
}

Outcome zero_wait_anchor() {
  Outcome o;
  const Scenario s{1, 1, 1, ShiftedExp(1.0, 0.0), ShiftedExp(1.0, 0.0), StreamMix(1.0),
                   Generation::at_will()};
  const double exact = age_exact(HarmonicCache(1), s, Stream::I).value();
  SimConfig cfg;
  cfg.scenario = s;
  const SimResult r = simulate(cfg);
  o.pass = exact == 2.0 && std::abs(r.I.age.value() - 2.0) <= 3.0 * r.I.se;
  o.detail = fmt("analytic %.17g, simulated %.6f +- %.6f", exact, r.I.age.value(), r.I.se);
  return o;
}

Outcome approximation_convergence() {
  Outcome o;
  constexpr std::int64_t n = 10'000;
  const HarmonicCache hc(n);
  const double alphas[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  double worst = 0.0;
  int count = 0;
  for (double mu : {0.0, 2.0}) {
    const Generation mode = mu > 0.0 ? Generation::exogenous(mu) : Generation::at_will();
    for (double p1 : {0.3, 0.5, 0.8}) {
      for (double a1 : alphas) {
        for (double a2 : alphas) {
          const auto k1 = static_cast<std::int64_t>(std::llround(a1 * n));
          const auto k2 = static_cast<std::int64_t>(std::llround(a2 * n));
          const Scenario s{n, k1, k2, kDelayI, kDelayII, StreamMix(p1), mode};
          const ScenarioApprox sa{a1, a2, kDelayI, kDelayII, StreamMix(p1), mode};
          const AgePair ex = age_pair(hc, s);
          const AgePair ap = age_pair(sa);
          for (Stream st : {Stream::I, Stream::II}) {
            worst = std::max(worst, rel_diff(ap.get(st).value(), ex.get(st).value()));
            ++count;
          }
        }
      }
    }
  }
  o.pass = worst <= 0.02;
  o.detail = fmt("%.0f comparisons, worst relative gap %.3g (limit 0.02)", count, worst);
  return o;
}

Outcome lemma1_corners() {
  Outcome o;
  ScenarioTemplate t;
  t.delay_I = ShiftedExp(1.0, 1.0);
  t.delay_II = ShiftedExp(1.0, 1.0);
  t.mix = StreamMix(0.5);
  OptimizeOptions opts;
  opts.evaluator = Evaluator::Approx;
  const double lo = alpha_grid(opts.alpha_grid).front();

  const std::vector<double> tested = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int corners = 0;
  for (double a : tested) {
    ScenarioTemplate pinned = t;
    pinned.pin_alpha1 = a;
    if (optimize(pinned, 1.0, opts).alpha2 != lo) o.pass = false;
    pinned = t;
    pinned.pin_alpha2 = a;
    if (optimize(pinned, 0.0, opts).alpha1 != lo) o.pass = false;
    corners += 2;
  }
  if (optimize(t, 1.0, opts).alpha2 != lo) o.pass = false;
  if (optimize(t, 0.0, opts).alpha1 != lo) o.pass = false;
  corners += 2;

  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  int monotone = 0;
  for (double a : grid) {
    const MonotonicityReport r = lemma1_monotonicity_check(t, a, grid);
    if (r.strictly_increasing && r.coefficient_condition) ++monotone;
  }
  if (monotone != 99) o.pass = false;
  o.detail = fmt("%.0f corner optima checked, strict monotonicity at %.0f/99 alpha1 values", corners,
                 monotone);
  return o;
}

Outcome single_stream_reduction() {
  Outcome o;
  constexpr std::int64_t n = 40;
  constexpr std::int64_t k1 = 13;
  constexpr double alpha1 = 0.3;
  std::mt19937_64 rng(kDefaultSeed);
  std::uniform_int_distribution<std::int64_t> kdist(1, n);
  std::uniform_real_distribution<double> rate(0.1, 10.0);
  std::uniform_real_distribution<double> shift(0.0, 5.0);
  std::uniform_real_distribution<double> alpha(0.01, 0.99);

  const HarmonicCache hc(n);
  const auto gen = [](double mu) {
    return mu > 0.0 ? Generation::exogenous(mu) : Generation::at_will();
  };
  std::int64_t worst = 0;
  for (double mu : {0.0, 2.0}) {
    std::int64_t k2_base = 1;
    const Scenario base{n, k1, k2_base, kDelayI, kDelayII, StreamMix(1.0), gen(mu)};
    const ScenarioApprox base_a{alpha1, 0.5, kDelayI, kDelayII, StreamMix(1.0), gen(mu)};
    const double ref_exact = age_exact(hc, base, Stream::I).value();
    const double ref_approx = age_approx(base_a, Stream::I).value();
    for (int i = 0; i < 20; ++i) {
      const ShiftedExp other(rate(rng), shift(rng));
      Scenario s = base;
      s.k2 = kdist(rng);
      s.delay_II = other;
      ScenarioApprox sa = base_a;
      sa.alpha2 = alpha(rng);
      sa.delay_II = other;
      worst = std::max(worst, ulp_distance(age_exact(hc, s, Stream::I).value(), ref_exact));
      worst = std::max(worst, ulp_distance(age_approx(sa, Stream::I).value(), ref_approx));
    }
  }
  o.pass = worst <= 8;
  o.detail = fmt("worst spread %.0f ulps over 4 evaluators x 20 settings (limit 8)",
                 static_cast<double>(worst));
  return o;
}

Outcome scale_free() {
  Outcome o;
  double worst = 0.0;
  for (double mu : {0.0, 2.0}) {
    const Generation mode = mu > 0.0 ? Generation::exogenous(mu) : Generation::at_will();
    for (const auto& [dI, dII] : {std::pair{kDelayI, kDelayII},
                                  std::pair{ShiftedExp(1.0, 1.0), ShiftedExp(1.0, 1.0)}}) {
      for (double p1 : {0.3, 0.5, 0.8}) {
        const Scenario small{1000, 500, 500, dI, dII, StreamMix(p1), mode};
        const Scenario large{10000, 5000, 5000, dI, dII, StreamMix(p1), mode};
        const AgePair a = age_pair(small);
        const AgePair b = age_pair(large);
        for (Stream st : {Stream::I, Stream::II})
          worst = std::max(worst, rel_diff(a.get(st).value(), b.get(st).value()));
      }
    }
  }
  o.pass = worst < 0.01;
  o.detail = fmt("worst relative change n=1e3 vs 1e4: %.3g (limit 0.01)", worst);
  return o;
}

struct CsvRow {
  double beta, x1, x2, age_I, age_II;
};

std::vector<CsvRow> read_pareto_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    CsvRow r{};
    ss >> r.beta >> r.x1 >> r.x2 >> r.age_I >> r.age_II;
    rows.push_back(r);
  }
  return rows;
}

Outcome pareto_reproduction() {
  Outcome o;
  const std::filesystem::path dir = std::filesystem::temp_directory_path();
  int runs = 0;
  double worst_sym = 0.0;
  std::ostringstream fails;
  for (const char* file : {"symmetric_at_will_template.json", "symmetric_exogenous_template.json"}) {
    for (const char* ev : {"exact", "approx"}) {
      const std::filesystem::path out =
          dir / (std::string("aoi_acceptance_") + ev + "_" + file + ".csv");
      std::ostringstream cout_, cerr_;
      const int rc = run_cli({"pareto", std::string(AOI_SCENARIO_DIR) + "/" + file, "--evaluator",
                              ev, "--beta-count", "33", "--out", out.string()},
                             cout_, cerr_);
      ++runs;
      if (rc != kExitOk) {
        o.pass = false;
        fails << " " << file << "/" << ev << ": exit " << rc;
        continue;
      }
      const std::vector<CsvRow> rows = read_pareto_csv(out);
      std::filesystem::remove(out);
      if (rows.empty()) o.pass = false;

      // (a) no row dominates another.
      for (const CsvRow& a : rows)
        for (const CsvRow& b : rows)
          if (&a != &b && a.age_I <= b.age_I && a.age_II <= b.age_II &&
              (a.age_I < b.age_I || a.age_II < b.age_II)) {
            o.pass = false;
            fails << " " << file << "/" << ev << ": dominated row";
          }

      // (b) swapping coordinates maps the set onto itself.
      for (const CsvRow& a : rows) {
        double best = std::numeric_limits<double>::infinity();
        for (const CsvRow& b : rows)
          best = std::min(best, std::max(std::abs(a.age_I - b.age_II), std::abs(a.age_II - b.age_I)));
        worst_sym = std::max(worst_sym, best);
      }

      // (c) the beta = 0.5 optimum is symmetric.
      const auto mid = std::find_if(rows.begin(), rows.end(),
                                    [](const CsvRow& r) { return r.beta == 0.5; });
      if (mid == rows.end() || mid->x1 != mid->x2 || std::abs(mid->age_I - mid->age_II) > 1e-9) {
        o.pass = false;
        fails << " " << file << "/" << ev << ": beta=0.5 off diagonal";
      }
    }
  }
  if (worst_sym > 1e-9) o.pass = false;
  o.detail = fmt("%.0f frontiers, worst swap mismatch %.3g (limit 1e-9)", runs, worst_sym) +
             fails.str();
  return o;
}

Outcome exogenous_limit() {
  Outcome o;
  double worst = 0.0;
  for (const Scenario& s : oracle_grid(1e6)) {
    if (!s.mode.is_exogenous()) continue;
    Scenario at_will = s;
    at_will.mode = Generation::at_will();
    const AgePair a = age_pair(s);
    const AgePair b = age_pair(at_will);
    for (Stream st : {Stream::I, Stream::II})
      worst = std::max(worst, rel_diff(a.get(st).value(), b.get(st).value()));
  }
  o.pass = worst <= 1e-3;
  o.detail = fmt("worst relative gap at mu=1e6: %.3g (limit 1e-3)", worst);
  return o;
}

// Independent double loop with lexicographic tie-break.
std::pair<std::int64_t, std::int64_t> brute_force(const ScenarioTemplate& t, double beta) {
  std::pair<std::int64_t, std::int64_t> best{0, 0};
  double best_obj = std::numeric_limits<double>::infinity();
  const HarmonicCache hc(t.n);
  for (std::int64_t k1 = 1; k1 <= t.n; ++k1) {
    for (std::int64_t k2 = 1; k2 <= t.n; ++k2) {
      const AgePair a = age_pair(hc, t.with_thresholds(k1, k2));
      double obj;
      if (beta == 1.0) {
        obj = a.age_I.value();
      } else if (beta == 0.0) {
        obj = a.age_II.value();
      } else {
        obj = beta * a.age_I.value() + (1.0 - beta) * a.age_II.value();
      }
      if (obj < best_obj) {
        best_obj = obj;
        best = {k1, k2};
      }
    }
  }
  return best;
}

Outcome brute_force_optimality() {
  Outcome o;
  int checked = 0;
  for (std::int64_t n : {1, 2, 5, 17, 33, 50}) {
    for (double mu : {0.0, 2.0}) {
      for (const auto& [dI, dII, p1] : {std::tuple{kDelayI, kDelayII, 0.6},
                                        std::tuple{ShiftedExp(1.0, 1.0), ShiftedExp(1.0, 1.0), 0.5},
                                        std::tuple{ShiftedExp(0.5, 0.0), ShiftedExp(3.0, 2.0), 0.2}}) {
        ScenarioTemplate t;
        t.n = n;
        t.delay_I = dI;
        t.delay_II = dII;
        t.mix = StreamMix(p1);
        t.mode = mu > 0.0 ? Generation::exogenous(mu) : Generation::at_will();
        for (double beta : {0.0, 0.1, 0.5, 0.75, 1.0}) {
          const ParetoPoint p = optimize(t, beta);
          const auto expected = brute_force(t, beta);
          ++checked;
          if (p.k1 != expected.first || p.k2 != expected.second) {
            o.pass = false;
            std::fprintf(stderr, "  brute-force mismatch n=%lld beta=%g: (%lld,%lld) vs (%lld,%lld)\n",
                         static_cast<long long>(n), beta, static_cast<long long>(p.k1),
                         static_cast<long long>(p.k2), static_cast<long long>(expected.first),
                         static_cast<long long>(expected.second));
          }
        }
      }
    }
  }
  o.detail = fmt("%.0f (template, beta) cases matched exactly", checked);
  return o;
}

Outcome geometric_retry() {
  Outcome o;
  SimConfig cfg;
  cfg.scenario = Scenario{10, 3, 5, kDelayI, kDelayII, StreamMix(0.6), Generation::at_will()};
  cfg.cycles = 1'000'000;
  cfg.replications = 1;
  cfg.record_gaps = true;
  const SimResult r = simulate(cfg);
  const std::vector<std::uint64_t>& counts = r.I.gap_counts;
  const double p = 0.6 * 3.0 / 10.0;
  const double total = static_cast<double>(r.I.gaps);

  // Bins m = 1..M with expected count >= 5, then one pooled tail bin m > M.
  double chi2 = 0.0;
  int bins = 0;
  double observed_head = 0.0;
  double expected_head = 0.0;
  for (std::size_t m = 1;; ++m) {
    const double expected = total * p * std::pow(1.0 - p, static_cast<double>(m - 1));
    const double tail = total * std::pow(1.0 - p, static_cast<double>(m));
    if (expected < 5.0 || tail < 5.0) break;
    const double observed = m < counts.size() ? static_cast<double>(counts[m]) : 0.0;
    chi2 += (observed - expected) * (observed - expected) / expected;
    observed_head += observed;
    expected_head += expected;
    ++bins;
  }
  const double observed_tail = total - observed_head;
  const double expected_tail = total - expected_head;
  chi2 += (observed_tail - expected_tail) * (observed_tail - expected_tail) / expected_tail;
  ++bins;

  const boost::math::chi_squared dist(bins - 1);
  const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  o.pass = total >= 1e5 && p_value >= 0.01;
  o.detail = fmt("%.0f gaps, chi2 %.2f on %.0f df", total, chi2, bins - 1) +
             fmt(", p-value %.3g (reject below 0.01)", p_value);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "simulator agrees with closed forms on the oracle grid", oracle_grid_agreement},
      {2, "single-node zero-wait age is 2", zero_wait_anchor},
      {3, "large-n forms within 2% of exact at n=1e4", approximation_convergence},
      {4, "beta corners pick the smallest threshold; age_I increases in alpha2", lemma1_corners},
      {5, "type-I age ignores stream II when p1=1", single_stream_reduction},
      {6, "age at fixed alpha is scale free", scale_free},
      {7, "symmetric pareto frontiers", pareto_reproduction},
      {8, "exogenous age tends to at-will as mu grows", exogenous_limit},
      {9, "optimizer matches brute force for n <= 50", brute_force_optimality},
      {10, "retry gaps are geometric (chi-square)", geometric_retry},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
