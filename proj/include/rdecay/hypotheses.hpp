#pragma once

// Numerical checker for every inequality the existence, convergence and decay
// results rely on. Each condition is reported with a signed margin.

#include "rdecay/coefficients.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace rdecay {

enum class SmallnessVariant {
  /// log((1 + C0^{l-1}) / C0), as printed in the theorem statement.
  literal,
  /// log((1 + C0^{l-1}) / C0^{l-1}), the horizon of G_M for g(y) = y + y^l.
  derivation,
};

struct SmallnessResult {
  bool pass = false;
  double margin = 0.0;  // rhs - (l - 1) H
  double rhs = 0.0;
};

/// (l - 1) H < rhs(C0) for the chosen variant.
SmallnessResult smallness_condition(double c0, double l, double h_integral,
                                    SmallnessVariant variant = SmallnessVariant::derivation);

struct GrowthAudit {
  std::vector<double> times;
  std::vector<double> log_ratios;  // log of e^{-q* rho~ t} int_0^t e^{q* rho s} h^{q*}(s) ds
  double sup_ratio = 0.0;          // may be +inf when saturated
  bool saturated = false;
  bool pass = false;
};

/// Empirical O(e^{q* rho~ t}) certificate for int_0^t e^{q* rho s} h^{q*}(s) ds:
/// the scaled running integral must be non-increasing over the last tenth of
/// the grid (or vanish identically). Work is done in logs so large exponents
/// saturate instead of overflowing.
GrowthAudit growth_condition_audit(const HProfile& h, double rho, double rho_tilde, double q_star,
                                   double horizon, int intervals = 2000);

struct HypothesisEntry {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  /// Strict inequalities pass iff margin > 0; closed ones iff margin >= 0.
  bool strict = true;
  std::string detail;
};

struct CheckOptions {
  /// ||u0||_p and ||w0||_p of the initial data.
  double u0_lp = 0.0;
  double w0_lp = 0.0;
  /// Minimum and maximum over the three initial fields.
  double initial_min = 0.0;
  double initial_sup = 0.0;

  double delta = 1.0;
  /// Weights of h1^{q*}, h2^{q*}, h3^{q*}, h4^{q*} in h(s) = max{...}.
  std::array<double, 4> h_weights{1.0, 1.0, 1.0, 1.0};
  double semigroup_slack = 0.1;
  double horizon = 50.0;
  int comparison_grid = 20001;
  SmallnessVariant variant = SmallnessVariant::derivation;
  std::optional<double> rho;
  std::optional<double> rho_tilde;
};

struct HypothesisReport {
  std::vector<HypothesisEntry> conditions;

  double q_star = 0.0;
  double q = 0.0;
  std::optional<double> comparison_constant;  // minimal C with a1 <= C a3 on the grid
  std::array<LqStarNorm, 4> lqstar{};
  double lambda1 = 0.0;
  double l_lower = 0.0;  // max{1, N(m-1)/(2p alpha), N(n-1)/(2p alpha)}
  double l_upper = 0.0;  // min{m, n}
  double c1 = 0.0;       // audited semigroup constants
  double c3 = 0.0;
  double c0 = 0.0;
  double h_integral = 0.0;
  SmallnessResult smallness_literal;
  SmallnessResult smallness_derivation;
  std::string decay_case;  // "b_i" or "b_ii"

  bool all_pass() const;
  const HypothesisEntry* find(const std::string& name) const;
};

/// 3^{q*-1} (C1 delta^{-alpha} ||u0||_p)^{q*} + 5^{q*-1} (C3 delta^{-alpha} ||w0||_p)^{q*}
double initial_bound_constant(double q_star, double alpha, double delta, double c1, double c3,
                              double u0_lp, double w0_lp);

/// int_0^inf max_i{weight_i h_i^{q*}(s)} ds; the tail beyond `horizon` is
/// bounded by the sum of the weighted closed-form tails.
double combined_h_integral(const SystemParams& params, double q_star,
                           const std::array<double, 4>& weights, double horizon);

HypothesisReport check_hypotheses(const SystemParams& params, const CheckOptions& opts);

}  // namespace rdecay
