#pragma once

// Time integration of the three-species system: exact spectral semigroups for
// the linear diffusion part, explicit substeps for the reaction part.

#include "rdecay/coefficients.hpp"
#include "rdecay/spectral.hpp"

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdecay {

struct State {
  double t = 0.0;
  GridField u, v, w;

  static State zeros(const std::shared_ptr<const Domain>& domain, double t = 0.0) {
    return {t, GridField::constant(domain, 0.0), GridField::constant(domain, 0.0),
            GridField::constant(domain, 0.0)};
  }
  const Domain& domain() const { return *u.domain; }
  /// Throws if components live on different domains or hold non-finite values.
  void validate() const;
};

struct BlowUp : std::runtime_error {
  BlowUp(double t, const std::string& why) : std::runtime_error(why), time(t) {}
  double time;
};

/// One term amplitude * e^{-rate t} * phi_mode(x) of a closed-form solution.
struct ExactTerm {
  double amplitude = 1.0;
  double rate = 0.0;
  ModeIndex mode{0, 0};
};

/// Closed-form solution whose components are finite sums of exponentially
/// modulated Neumann eigenfunctions.
struct ExactSolution {
  std::array<std::vector<ExactTerm>, 3> components;
};

/// Source terms g_i = d_t q - d_i Lap q + shift_i q - f_i(t, q) that make an
/// ExactSolution solve the forced system exactly at the collocation nodes.
class ManufacturedForcing {
 public:
  ManufacturedForcing(ExactSolution exact, const SystemParams& params,
                      std::shared_ptr<const Domain> domain);

  const ExactSolution& exact() const { return exact_; }
  /// Nodal values of component c (0 = u, 1 = v, 2 = w) at time t.
  VectorX<double> exact_values(int c, double t) const;
  State exact_state(double t) const;
  /// Forcing for all three components at time t.
  std::array<VectorX<double>, 3> source(double t) const;

 private:
  ExactSolution exact_;
  SystemParams params_;
  std::shared_ptr<const Domain> domain_;
  std::array<std::vector<VectorX<double>>, 3> shapes_;
  std::array<std::vector<double>, 3> eigenvalues_;
};

ManufacturedForcing manufactured_forcing(const ExactSolution& exact, const SystemParams& params);

enum class Scheme { lie, strang };

struct SolverConfig {
  Scheme scheme = Scheme::strang;
  double dt = 1e-3;
  double t_end = 20.0;
  int sample_stride = 100;
  double blowup_threshold = 1e6;
  double negativity_tolerance = 1e-9;
  std::shared_ptr<const ManufacturedForcing> manufactured;
  bool record_snapshots = false;

  void validate() const;
};

struct ReactionTerms {
  GridField fu, fv, fw;
};

/// f_u = a1 w^m - a2 u^n v^k
/// f_v = (a1 + a3) w^m - a2 u^n v^k
/// f_w = -(a1 + a3) w^m - a4 w + a2 u^n v^k
/// Powers act on max(value, 0); the linear a4 w term uses the raw value.
ReactionTerms reaction_terms(const State& state, double t, const SystemParams& params);

/// Advances by dt. Lie: explicit Euler reaction then exact diffusion.
/// Strang: half diffusion, explicit-midpoint reaction, half diffusion.
/// Throws BlowUp when a sup norm exceeds the threshold or a value is non-finite.
State step(const State& state, double dt, const SystemParams& params, const SolverConfig& config);

/// Observables recorded at one sample time.
struct Sample {
  double t = 0.0;
  double sup_u = 0.0, sup_v = 0.0, sup_w = 0.0;
  double q0_v = 0.0;
  double lp_u = 0.0, lp_w = 0.0;
  double frac_u = 0.0, frac_w = 0.0, frac_qplus_v = 0.0;
  double holder_u = 0.0, holder_w = 0.0, holder_v_minus_vinf = 0.0;
  double min_u = 0.0, min_v = 0.0, min_w = 0.0;
  /// int_0^t int_Omega (a1 + a3) w^m - a2 u^n v^k
  double reaction_integral_accum = 0.0;

  // Not exported to CSV.
  double q0_u = 0.0, q0_w = 0.0;
  /// int_0^t int_Omega (h4 + b) w
  double w_loss_accum = 0.0;
};

struct Abort {
  double time = 0.0;
  std::string reason;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::optional<Abort> abort;
  double volume = 0.0;
  /// Smallest nodal value of any component over every step.
  double running_min = 0.0;
  /// Largest nodal value of v over every step.
  double running_sup_v = 0.0;
  std::size_t steps = 0;
  State final_state;
  std::vector<State> snapshots;

  bool completed() const { return !abort.has_value(); }
};

/// Integrates to config.t_end, sampling every config.sample_stride steps (and
/// at t = 0 and the final time). Reaction integrals are accumulated with the
/// trapezoid rule over steps. On blow-up the partial trajectory is returned
/// with `abort` set.
Trajectory integrate(const State& initial, const SystemParams& params, const SolverConfig& config);

/// Column order of the exported trajectory CSV.
inline constexpr std::array<const char*, 17> kTrajectoryColumns = {
    "t",          "sup_u",       "sup_v",        "sup_w",    "q0_v",
    "lp_u",       "lp_w",        "frac_u",       "frac_w",   "frac_qplus_v",
    "holder_u",   "holder_w",    "holder_v_minus_vinf",      "min_u",
    "min_v",      "min_w",       "reaction_integral_accum"};

std::array<double, 17> csv_row(const Sample& s);

}  // namespace rdecay
