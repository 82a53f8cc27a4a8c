#pragma once

// Decay-rate fitting, v-infinity estimation, mass balance, and numerical
// audits of the interpolation and singular-integral inequalities.

#include "rdecay/coefficients.hpp"
#include "rdecay/norms.hpp"
#include "rdecay/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rdecay {

struct DecayFit {
  double rate = 0.0;
  double residual = 0.0;  // RMS residual of the log-linear fit
  std::size_t samples = 0;
  double t_from = 0.0;
  double t_to = 0.0;
};

inline constexpr double kDecayFloor = 1e-300;

/// Least-squares slope of -log(values) against times over the final `window`
/// fraction of samples, restricted to t >= t_min. Values at or below
/// kDecayFloor are excluded. Throws std::invalid_argument with fewer than four
/// usable samples.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                        double window, double t_min = -1e300);

struct DecayEntry {
  std::string quantity;
  DecayFit fit;
  double predicted_rate = 0.0;
  double relative_deviation = 0.0;  // (fitted - predicted) / predicted
};

struct DecayOptions {
  double window = 0.5;
  double t_min = 5.0;
  /// Needed to predict the v rate when d2 lambda >= l b.
  std::optional<double> rho_tilde;
};

struct DecayReport {
  std::vector<DecayEntry> entries;
  std::string decay_case;  // "b_i" or "b_ii"
  double lambda1 = 0.0;
  double predicted_uw = 0.0;
  double predicted_v = 0.0;

  const DecayEntry* find(const std::string& quantity) const;
};

/// Fits every decaying observable of the trajectory and compares with
/// b - eps for u, w and min{b - eps, d2 lambda} (case i) or
/// min{b - eps, d2 lambda - rho~} (case ii) for v - v_inf.
DecayReport decay_report(const Trajectory& traj, const SystemParams& params,
                         const DecayOptions& opts = {});

struct VInfinityEstimate {
  double simulated = 0.0;          // Q0 v at the final sample
  double integral_identity = 0.0;  // Q0 v0 + |Omega|^{-1} int_0^T int f_v
  double paper_formula = 0.0;      // |Omega|^{-1} (int w0 - int_0^T int (h4 + b) w)
  double gap_simulated_identity = 0.0;
  double gap_simulated_paper = 0.0;
  double gap_identity_paper = 0.0;
  /// |simulated - identity| / (1 + |simulated|)
  double relative_gap = 0.0;
};

VInfinityEstimate v_infinity(const Trajectory& traj, const SystemParams& params);

/// max over samples of |Omega| |Q0 v(t) - Q0 v0| - accumulated reaction
/// integral, normalised by |Omega| (1 + Q0 v0).
double mass_balance_residual(const Trajectory& traj);

struct InterpolationAudit {
  double fitted_c = 0.0;  // max sampled ratio
  int violations = 0;     // non-finite ratios
  int skipped = 0;        // identically zero fields
  int samples = 0;
};

/// Random band-limited nonnegative fields with `modes` active cosine modes
/// per axis and decaying amplitudes.
GridField random_band_limited(const std::shared_ptr<const Domain>& domain, int modes,
                              std::uint64_t seed, bool shift_nonnegative = true);

/// R = ||y||_{pl} / (||op^alpha y||_p^theta ||y||_p^{1 - theta}) over random
/// fields. theta must lie in (N (l - 1) / (2 p l alpha), 1).
InterpolationAudit interpolation_audit(const std::shared_ptr<const Domain>& domain,
                                       const OperatorSpec& op, double alpha, double p, double l,
                                       double theta, int samples, std::uint64_t seed,
                                       int modes = 8);

/// Ratio for a single field; NaN for the zero field.
double interpolation_ratio(const GridField& y, const OperatorSpec& op, double alpha, double p,
                           double l, double theta);

struct IntegralBoundRow {
  double alpha = 0.0, beta = 0.0, t = 0.0;
  double integral_over_envelope = 0.0;
};

struct IntegralBoundAudit {
  std::vector<IntegralBoundRow> rows;
  double sup_ratio = 0.0;
  bool all_finite = true;
};

/// int_0^t s^{-alpha} e^{beta s} ds divided by e^{beta t} (beta > 0),
/// t + 1 (beta = 0) or 1 (beta < 0).
IntegralBoundAudit integral_bound_audit(double alpha, double beta, const std::vector<double>& t_grid);

struct ConvolutionBoundRow {
  double nu = 0.0, mu = 0.0, tau = 0.0, z = 0.0;
  double scaled = 0.0;  // tau^mu z^{1-nu} int_0^z (z - xi)^{nu-1} xi^{mu-1} e^{-tau xi} d xi
};

struct ConvolutionBoundAudit {
  std::vector<ConvolutionBoundRow> rows;
  double sup_scaled = 0.0;
  bool all_finite = true;
};

ConvolutionBoundAudit convolution_bound_audit(const std::vector<double>& nus,
                                              const std::vector<double>& mus,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& zs);

double convolution_integral(double nu, double mu, double tau, double z);

}  // namespace rdecay
