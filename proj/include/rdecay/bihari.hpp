#pragma once

// Bihari-type bounds for y(t) <= M + int_0^t lambda(s) g(y(s)) ds with
// g(y) = y + y^l, in closed form.

#include "rdecay/coefficients.hpp"
#include "rdecay/hypotheses.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rdecay {

/// Raised when the integrated kernel reaches the blow-up horizon of G_M^{-1}.
struct HorizonError : std::domain_error {
  HorizonError(const std::string& what, double z, double limit)
      : std::domain_error(what), z(z), limit(limit) {}
  double z;
  double limit;
};

double g_eval(double y, double l);

/// G_M(y) = int_M^y ds / (s + s^l).
double g_m(double y, double M, double l);

/// sup of G_M, i.e. int_M^inf ds / (s + s^l).
double g_m_horizon(double M, double l);

/// Inverse of G_M; throws HorizonError for z >= g_m_horizon(M, l).
double g_m_inverse(double z, double M, double l);

/// G_M by adaptive quadrature, for cross-checks.
double g_m_quadrature(double y, double M, double l);

struct BihariProblem {
  double M = 1.0;
  double l = 2.0;
  HProfile lambda = ConstantProfile{1.0};
  double horizon = 1.0;

  void validate() const;
};

/// G_M^{-1}(int_0^t lambda). Throws HorizonError when the integral reaches the
/// horizon value, std::invalid_argument for t outside [0, horizon].
double bihari_bound(const BihariProblem& prob, double t);

/// Closed-form bound on F(t) given C0 and H = int_0^t h. The derivation
/// variant puts C0^{l-1} inside the bracket, the literal variant C0.
/// Throws HorizonError when the bracket is not positive.
double paper_f_bound(double c0, double l, double h_integral,
                     SmallnessVariant variant = SmallnessVariant::derivation);

/// Classical RK4 for y' = lambda(t) (y + y^l), y(0) = M, sampled at every
/// `stride`-th step. Returns (t, y) pairs.
std::vector<std::pair<double, double>> bihari_rk4(const BihariProblem& prob, double t_end,
                                                  double step, int stride = 1);

struct DominanceRow {
  int draw = 0;
  double M = 0.0, l = 0.0;
  std::string kernel;
  double t_end = 0.0;
  /// max over checkpoints of (rk4 - bound) / bound; <= tolerance means dominance.
  double max_relative_excess = 0.0;
  int violations = 0;
};

struct DominanceAudit {
  std::vector<DominanceRow> rows;
  int violations = 0;
  double tolerance = 0.0;
};

/// Random admissible (M, l, lambda) draws integrated up to 90% of the horizon.
/// The equality ODE is solved exactly by the bound, so a checkpoint counts as a
/// violation only when RK4 exceeds it by more than `tolerance` relative.
DominanceAudit bihari_dominance_audit(int draws, std::uint64_t seed, double step = 1e-4,
                                      double tolerance = 1e-8);

}  // namespace rdecay
