#pragma once

// End-to-end scenario runs and audit suites, as driven by the command line.

#include "rdecay/report.hpp"
#include "rdecay/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rdecay {

enum ExitStatus : int { kExitPass = 0, kExitAbort = 1, kExitAssertion = 2 };

/// RD_DECAY_OUT when set and non-empty, otherwise `configured`.
std::filesystem::path resolve_output_dir(const std::string& configured);

struct RunOutcome {
  int status = kExitPass;
  HypothesisReport hypotheses;
  Trajectory trajectory;
  std::optional<DecayReport> decay;
  std::optional<VInfinityEstimate> v_inf;
  double mass_balance = 0.0;
  std::vector<AssertionResult> assertions;
  std::vector<std::filesystem::path> files;
};

/// Checks hypotheses, integrates, analyses and writes hypotheses.json,
/// trajectory.csv, decay.json and (for completed runs) v_infinity.json into
/// `out_dir`. Progress lines go to `log`.
RunOutcome run_scenario(const Scenario& sc, const std::filesystem::path& out_dir, std::ostream& log);

/// Requested assertions evaluated on a finished run.
std::vector<AssertionResult> evaluate_assertions(const Scenario& sc, const RunOutcome& run);

inline const std::vector<std::string> kAuditSuites = {"semigroup", "interpolation", "integrals",
                                                      "bihari", "all"};

/// Runs one suite (or all), writing one CSV per audit plus audit_summary.json.
/// Returns kExitPass iff every audit passes; throws std::invalid_argument for
/// an unknown suite.
int run_audits(const std::string& suite, const std::filesystem::path& out_dir, std::uint64_t seed,
               std::ostream& log);

}  // namespace rdecay
