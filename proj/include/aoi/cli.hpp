#pragma once

// Command-line verbs: eval | simulate | validate | pareto | sweep.
// Exit codes: 0 success, 1 validation failure, 2 usage or schema error.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "aoi/sim.hpp"

namespace aoi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;

enum class CheckStatus { Pass, Fail, Skipped };

struct StreamCheck {
  Stream stream = Stream::I;
  Age analytic = Age::infinite();
  Age simulated = Age::infinite();
  double se = 0.0;
  double rel_err = 0.0;
  CheckStatus status = CheckStatus::Skipped;
};

struct ValidationReport {
  std::array<StreamCheck, 2> streams;
  double tolerance = 0.01;
  bool passed() const;
};

/// Compares analytic and simulated ages per stream. Starved streams are
/// skipped; a stream passes iff its relative error is within `tolerance`.
ValidationReport judge(const AgePair& analytic, const SimResult& sim, double tolerance);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoi
