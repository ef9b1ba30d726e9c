#include "aoi/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoi/scenario_io.hpp"

namespace aoi {

bool ValidationReport::passed() const {
  return std::none_of(streams.begin(), streams.end(),
                      [](const StreamCheck& c) { return c.status == CheckStatus::Fail; });
}

ValidationReport judge(const AgePair& analytic, const SimResult& sim, double tolerance) {
  ValidationReport r;
  r.tolerance = tolerance;
  for (Stream s : {Stream::I, Stream::II}) {
    StreamCheck& c = r.streams[static_cast<std::size_t>(s)];
    c.stream = s;
    c.analytic = analytic.get(s);
    c.simulated = sim.get(s).age;
    c.se = sim.get(s).se;
    if (c.analytic.is_infinite() || c.simulated.is_infinite()) {
      c.status = CheckStatus::Skipped;
      continue;
    }
    c.rel_err = std::abs(c.simulated.value() - c.analytic.value()) / c.analytic.value();
    c.status = c.rel_err <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  }
  return r;
}

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw UsageError("not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw UsageError("empty entry in list '" + text + "'");
    out.push_back(parse_number(item));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::int64_t as_integer(double v, const std::string& what) {
  if (std::floor(v) != v || std::abs(v) > 9e15) throw UsageError(what + " must be an integer");
  return static_cast<std::int64_t>(v);
}

std::int64_t threshold_for(double alpha, std::int64_t n) {
  return std::clamp<std::int64_t>(std::llround(alpha * static_cast<double>(n)), 1, n);
}

void open_csv(std::ofstream& f, const std::string& path) {
  f.open(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
}

// RFC 4180 line ending.
constexpr const char* kCrlf = "\r\n";

struct SimFlags {
  std::int64_t cycles = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  int replications = 10;
  std::int64_t warmup = 1000;
  std::string sampling = "full";
  int threads = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--cycles", cycles, "Cycles per replication, warmup included")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--replications", replications, "Independent replications")->capture_default_str();
    cmd->add_option("--warmup", warmup, "Warmup cycles excluded from the estimates")->capture_default_str();
    cmd->add_option("--sampling", sampling, "Order-statistic sampling: full | spacings")
        ->check(CLI::IsMember({"full", "spacings"}))
        ->capture_default_str();
    cmd->add_option("--threads", threads, "Worker thread cap (0 = runtime default)");
  }

  SimConfig config(const Scenario& s) const {
    SimConfig cfg;
    cfg.scenario = s;
    cfg.cycles = cycles;
    cfg.seed = seed;
    cfg.replications = replications;
    cfg.warmup_cycles = warmup;
    cfg.sampling = sampling == "spacings" ? OrderSampling::Spacings : OrderSampling::FullSample;
    return cfg;
  }
};

json stream_json(const StreamEstimate& e) {
  return json{{"estimate", age_json(e.age)},
              {"se", e.se},
              {"deliveries", e.deliveries},
              {"delivery_probability", e.delivery_probability.mean}};
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skipped: return "SKIPPED";
  }
  return "?";
}

int cmd_eval(const std::string& file, bool approx, std::optional<double> alpha1,
             std::optional<double> alpha2, std::ostream& out) {
  const ScenarioFile f = load_scenario_file(file);
  AgePair ages;
  if (approx) {
    if (!alpha1 || !alpha2) throw UsageError("--approx needs --alpha1 and --alpha2");
    ages = age_pair(f.tmpl.with_alphas(*alpha1, *alpha2));
  } else {
    ages = age_pair(f.scenario());
  }
  out << json{{"age_I", age_json(ages.age_I)}, {"age_II", age_json(ages.age_II)}}.dump() << '\n';
  return kExitOk;
}

int cmd_simulate(const std::string& file, const SimFlags& flags, std::ostream& out,
                 std::ostream& err) {
  const ScenarioFile f = load_scenario_file(file);
  set_thread_limit(flags.threads);
  const auto t0 = std::chrono::steady_clock::now();
  const SimResult r = simulate(flags.config(f.scenario()));
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;
  out << json{{"age_I", stream_json(r.I)},
              {"age_II", stream_json(r.II)},
              {"cycles", r.cycles},
              {"replications", flags.replications},
              {"seed", flags.seed},
              {"sim_time", r.sim_time}}
             .dump()
      << '\n';
  err << "wall_time_s=" << format_double(wall.count()) << '\n';
  return kExitOk;
}

int cmd_validate(const std::string& file, const SimFlags& flags, double tolerance,
                 std::ostream& out, std::ostream& err) {
  if (!(tolerance >= 0.0)) throw UsageError("--tolerance must be nonnegative");
  const ScenarioFile f = load_scenario_file(file);
  const Scenario s = f.scenario();
  set_thread_limit(flags.threads);
  const AgePair analytic = age_pair(s);
  const SimResult sim = simulate(flags.config(s));
  const ValidationReport rep = judge(analytic, sim, tolerance);

  json streams = json::object();
  for (const StreamCheck& c : rep.streams) {
    if (c.status == CheckStatus::Skipped) {
      err << "warning: stream " << name(c.stream) << " is starved; skipped\n";
    }
    streams[std::string("age_") + name(c.stream)] = {{"analytic", age_json(c.analytic)},
                                                      {"simulated", age_json(c.simulated)},
                                                      {"se", c.se},
                                                      {"rel_err", c.rel_err},
                                                      {"status", status_name(c.status)}};
  }
  out << json{{"streams", streams},
              {"tolerance", tolerance},
              {"result", rep.passed() ? "PASS" : "FAIL"}}
             .dump()
      << '\n';
  return rep.passed() ? kExitOk : kExitValidationFailed;
}

int cmd_pareto(const std::string& file, const std::string& betas_text, int beta_count,
               const std::string& evaluator, const std::string& out_path, int grid,
               const std::string& search, bool allow_large, int threads, std::ostream& out) {
  const ScenarioFile f = load_scenario_file(file);
  std::vector<double> betas;
  if (!betas_text.empty()) {
    betas = parse_list(betas_text);
  } else {
    if (beta_count < 1) throw UsageError("--beta-count must be >= 1");
    betas = beta_sweep(beta_count);
  }
  for (double b : betas) {
    if (!(b >= 0.0 && b <= 1.0)) throw UsageError("betas must lie in [0, 1], got " + format_double(b));
  }
  set_thread_limit(threads);
  OptimizeOptions opts;
  opts.evaluator = evaluator == "approx" ? Evaluator::Approx : Evaluator::Exact;
  opts.alpha_grid = grid;
  opts.search = search == "coarse" ? ExactSearch::CoarseToFine : ExactSearch::Exhaustive;
  opts.allow_large_exhaustive = allow_large;
  const std::vector<ParetoPoint> front = pareto_frontier(f.tmpl, betas, opts);

  std::ofstream csv;
  open_csv(csv, out_path);
  const bool exact = opts.evaluator == Evaluator::Exact;
  csv << (exact ? "beta,k1,k2,age_I,age_II,objective" : "beta,alpha1,alpha2,age_I,age_II,objective")
      << kCrlf;
  for (const ParetoPoint& p : front) {
    csv << format_double(p.beta) << ',';
    if (exact) {
      csv << p.k1 << ',' << p.k2 << ',';
    } else {
      csv << format_double(p.alpha1) << ',' << format_double(p.alpha2) << ',';
    }
    csv << format_age(p.age_I) << ',' << format_age(p.age_II) << ',' << format_age(p.objective) << kCrlf;
  }
  out << front.size() << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& file, const std::string& param, const std::string& values_text,
              const std::string& evaluator, const std::string& out_path,
              std::optional<double> alpha1, std::optional<double> alpha2, std::ostream& out) {
  const ScenarioFile f = load_scenario_file(file);
  const std::vector<double> values = parse_list(values_text);
  const bool approx = evaluator == "approx";

  std::vector<AgePair> rows;
  for (double v : values) {
    ScenarioFile g = f;
    std::optional<double> a1 = alpha1;
    std::optional<double> a2 = alpha2;
    if (param == "n") {
      g.tmpl.n = as_integer(v, "n");
      if (g.tmpl.n < 1) throw UsageError("n must be >= 1");
    } else if (param == "k1") {
      g.k1 = as_integer(v, "k1");
    } else if (param == "k2") {
      g.k2 = as_integer(v, "k2");
    } else if (param == "p1") {
      if (!(v >= 0.0 && v <= 1.0)) throw UsageError("p1 must lie in [0, 1]");
      g.tmpl.mix = StreamMix(v);
    } else if (param == "mu") {
      if (!(v > 0.0)) throw UsageError("mu must be positive");
      g.tmpl.mode = Generation::exogenous(v);
    } else if (param == "alpha1") {
      a1 = v;
    } else if (param == "alpha2") {
      a2 = v;
    } else {
      throw UsageError("unknown sweep parameter '" + param + "' (n, k1, k2, p1, mu, alpha1, alpha2)");
    }

    if (approx) {
      if (param == "n" || param == "k1" || param == "k2") {
        throw UsageError("parameter '" + param + "' has no effect with the approx evaluator");
      }
      if (!a1 || !a2) throw UsageError("approx sweeps need --alpha1 and --alpha2");
      rows.push_back(age_pair(g.tmpl.with_alphas(*a1, *a2)));
    } else {
      if (a1) g.k1 = threshold_for(*a1, g.tmpl.n);
      if (a2) g.k2 = threshold_for(*a2, g.tmpl.n);
      if (g.k1 && (*g.k1 < 1 || *g.k1 > g.tmpl.n)) throw UsageError("k1 must lie in [1, n]");
      if (g.k2 && (*g.k2 < 1 || *g.k2 > g.tmpl.n)) throw UsageError("k2 must lie in [1, n]");
      rows.push_back(age_pair(g.scenario()));
    }
  }

  std::ofstream csv;
  open_csv(csv, out_path);
  csv << "param_value,age_I,age_II" << kCrlf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << format_double(values[i]) << ',' << format_age(rows[i].age_I) << ','
        << format_age(rows[i].age_II) << kCrlf;
  }
  out << rows.size() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Age of information for two update streams over earliest-k multicast", "aoi"};
  app.require_subcommand(1);

  std::string file;
  bool approx = false;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  SimFlags sim_flags;
  double tolerance = 0.01;
  std::string betas_text;
  int beta_count = 33;
  std::string evaluator = "exact";
  std::string out_path;
  int grid = 512;
  std::string search = "exhaustive";
  bool allow_large = false;
  int threads = 0;
  std::string param;
  std::string values_text;

  CLI::App* eval = app.add_subcommand("eval", "Closed-form ages of both streams as JSON");
  eval->add_option("scenario", file, "Scenario JSON file")->required();
  eval->add_flag("--approx", approx, "Use the large-n forms at --alpha1/--alpha2");
  eval->add_option("--alpha1", alpha1, "k1/n for --approx");
  eval->add_option("--alpha2", alpha2, "k2/n for --approx");

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimate of both ages as JSON");
  sim->add_option("scenario", file, "Scenario JSON file")->required();
  sim_flags.add(sim);

  CLI::App* val = app.add_subcommand("validate", "Compare closed-form and simulated ages");
  val->add_option("scenario", file, "Scenario JSON file")->required();
  sim_flags.add(val);
  val->add_option("--tolerance", tolerance, "Relative tolerance per stream")->capture_default_str();

  CLI::App* par = app.add_subcommand("pareto", "Pareto frontier of (age_I, age_II) as CSV");
  par->add_option("scenario", file, "Scenario template JSON file")->required();
  par->add_option("--betas", betas_text, "Comma-separated weights in [0, 1]");
  par->add_option("--beta-count", beta_count, "Evenly spaced weights when --betas is absent")
      ->capture_default_str();
  par->add_option("--evaluator", evaluator, "exact | approx")
      ->check(CLI::IsMember({"exact", "approx"}))
      ->capture_default_str();
  par->add_option("--out", out_path, "Output CSV path")->required();
  par->add_option("--grid", grid, "Approx mode grid points per axis")->capture_default_str();
  par->add_option("--search", search, "Exact mode search: exhaustive | coarse")
      ->check(CLI::IsMember({"exhaustive", "coarse"}))
      ->capture_default_str();
  par->add_flag("--allow-large-exhaustive", allow_large, "Permit exhaustive search for large n");
  par->add_option("--threads", threads, "Worker thread cap (0 = runtime default)");

  CLI::App* swp = app.add_subcommand("sweep", "One-parameter sweep of both ages as CSV");
  swp->add_option("scenario", file, "Scenario template JSON file")->required();
  swp->add_option("--param", param, "n | k1 | k2 | p1 | mu | alpha1 | alpha2")->required();
  swp->add_option("--values", values_text, "Comma-separated values")->required();
  swp->add_option("--evaluator", evaluator, "exact | approx")
      ->check(CLI::IsMember({"exact", "approx"}))
      ->capture_default_str();
  swp->add_option("--out", out_path, "Output CSV path")->required();
  swp->add_option("--alpha1", alpha1, "Fix k1 = round(alpha1 n) (exact) or alpha1 (approx)");
  swp->add_option("--alpha2", alpha2, "Fix k2 = round(alpha2 n) (exact) or alpha2 (approx)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*eval) return cmd_eval(file, approx, alpha1, alpha2, out);
    if (*sim) return cmd_simulate(file, sim_flags, out, err);
    if (*val) return cmd_validate(file, sim_flags, tolerance, out, err);
    if (*par) {
      return cmd_pareto(file, betas_text, beta_count, evaluator, out_path, grid, search, allow_large,
                        threads, out);
    }
    if (*swp) return cmd_sweep(file, param, values_text, evaluator, out_path, alpha1, alpha2, out);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StarvedObjective& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace aoi
