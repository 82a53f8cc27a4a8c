#pragma once

// Serialization of run and audit results: JSON reports, CSV tables, and a
// validator that re-parses them.

#include "rdecay/analysis.hpp"
#include "rdecay/hypotheses.hpp"
#include "rdecay/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace rdecay {

/// Shortest round-trip-safe text for a double ("%.17g"); nan, inf and -inf
/// for non-finite values.
std::string format_double(double x);

/// Non-finite values become null.
nlohmann::json json_number(double x);

/// Writes a header line and rows, comma separated, LF line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  /// Each cell is either a number or a plain token without commas or quotes.
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct AssertionResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string requirement;
};

nlohmann::json hypotheses_json(const HypothesisReport& rep);
nlohmann::json decay_json(const DecayReport& rep, const Trajectory& traj,
                          const std::vector<AssertionResult>& assertions);
/// Run information for aborted runs, where no decay fit is attempted.
nlohmann::json aborted_run_json(const Trajectory& traj, const std::vector<AssertionResult>& assertions);
nlohmann::json v_infinity_json(const VInfinityEstimate& est, double mass_balance);

void write_json(const std::filesystem::path& file, const nlohmann::json& doc);

struct ValidationResult {
  bool ok = true;
  std::string kind;  // "trajectory", "csv", "hypotheses", "decay", "v_infinity"
  std::vector<std::string> problems;
};

/// Checks that a file produced by this tool parses back: CSV tables must be
/// rectangular with LF endings and numeric cells (text allowed only in
/// audit label columns); JSON reports must carry their required fields.
ValidationResult validate_report(const std::filesystem::path& file);

}  // namespace rdecay
