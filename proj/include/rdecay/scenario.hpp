#pragma once

// Scenario files: a JSON description of domain, parameters, solver settings,
// initial data, analysis options and assertions.

#include "rdecay/analysis.hpp"
#include "rdecay/coefficients.hpp"
#include "rdecay/hypotheses.hpp"
#include "rdecay/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace rdecay {

/// Invalid or unreadable scenario; the message starts with the field path.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), field(path) {}
  std::string field;
};

struct ConstantInit {
  double value = 0.0;
};
/// base + amplitude * phi_mode
struct CosineInit {
  double base = 1.0;
  double amplitude = 0.5;
  ModeIndex mode{1, 0};
};
/// max(base + amplitude * r, 0) where r is a random band-limited field with
/// unit sup norm.
struct RandomInit {
  double base = 1.0;
  double amplitude = 0.5;
  int modes = 8;
};
using InitialField = std::variant<ConstantInit, CosineInit, RandomInit>;

struct InitialData {
  std::array<InitialField, 3> fields{CosineInit{}, CosineInit{}, CosineInit{}};
};

/// Builds u0, v0, w0. Random components use seeds derived from `seed` and
/// the component index.
State make_initial_state(const InitialData& init, const std::shared_ptr<const Domain>& domain,
                         std::uint64_t seed);

struct AnalysisOptions {
  double fit_window = 0.5;
  double fit_t_min = 5.0;
  std::optional<double> rho;
  std::optional<double> rho_tilde;
  double delta = 1.0;
  std::array<double, 4> h_weights{1.0, 1.0, 1.0, 1.0};
  double semigroup_slack = 0.1;
  double horizon = 50.0;
  SmallnessVariant smallness_variant = SmallnessVariant::derivation;
};

/// Each engaged field is a requested assertion.
struct Assertions {
  bool no_blowup = false;
  std::optional<double> min_floor;
  bool hypotheses = false;
  /// u, w rates >= b - eps and within this relative distance of b; v - v_inf
  /// within this relative distance of its predicted rate.
  std::optional<double> decay_tolerance;
  std::optional<double> v_infinity_tolerance;
  std::optional<double> mass_balance_tolerance;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  std::string output_dir;
  SystemParams params;
  SolverConfig solver;
  InitialData initial;
  std::optional<ExactSolution> manufactured;
  AnalysisOptions analysis;
  Assertions assertions;
};

/// Parses and fully validates a scenario. Unknown keys are rejected.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& file);

/// The reference configuration used by the acceptance checks.
Scenario reference_scenario();

/// Hypothesis-checker options derived from the scenario and its initial state.
CheckOptions check_options(const Scenario& sc, const State& initial);

}  // namespace rdecay
