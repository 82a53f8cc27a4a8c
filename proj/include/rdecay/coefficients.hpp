#pragma once

// Time-dependent reaction coefficients a_i(t) = t^{sigma_i} h_i(t) and the
// model parameters of the three-species system.

#include "rdecay/spectral.hpp"

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace rdecay {

struct ConstantProfile {
  double value = 1.0;
};
/// e^{-rate t}
struct ExponentialProfile {
  double rate = 1.0;
};
/// (1 + t)^{-exponent}
struct PowerProfile {
  double exponent = 1.0;
};
/// height * cos^2(pi (t - center) / (2 width)) on |t - center| < width, else 0.
struct BumpProfile {
  double center = 1.0;
  double width = 1.0;
  double height = 1.0;
};
/// Piecewise-linear through (times, values); held at values.front() before
/// the first sample and 0 after the last.
struct TabulatedProfile {
  std::vector<double> times;
  std::vector<double> values;
};

using HProfile =
    std::variant<ConstantProfile, ExponentialProfile, PowerProfile, BumpProfile, TabulatedProfile>;

double evaluate(const HProfile& h, double t);
std::string profile_kind(const HProfile& h);
/// Throws std::invalid_argument if the profile can take negative or
/// non-finite values on [0, inf).
void validate(const HProfile& h);
/// Last time at which the profile can be nonzero (infinity if unbounded support).
double support_end(const HProfile& h);

/// int_0^t h(s) ds by adaptive quadrature.
double profile_integral(const HProfile& h, double t);

struct CoefficientSpec {
  double sigma = 0.0;
  HProfile profile = ConstantProfile{1.0};
};

/// t^sigma h(t); t^0 is 1 at t = 0.
double eval_coefficient(const CoefficientSpec& spec, double t);

struct ConjugateExponents {
  double q_star;
  double q;
};

/// q* = 2/alpha - 1 for 1/2 <= alpha < 1, 2 for 0 < alpha < 1/2; q = q*/(q* - 1).
ConjugateExponents conjugate_exponents(double alpha);

struct LqStarNorm {
  double value = 0.0;        // over [0, inf) when converges, else over [0, horizon]
  double finite_part = 0.0;  // integral of h^{q*} over [0, horizon]
  double tail = 0.0;         // integral of h^{q*} over (horizon, inf)
  bool converges = true;
};

/// (int_0^inf h^{q*})^{1/q*} with the tail beyond `horizon` in closed form.
/// A divergent tail is reported through `converges`, never truncated silently.
LqStarNorm lqstar_norm(const HProfile& h, double q_star, double horizon);

/// Parameters of
///   u_t - (d1 Lap - b) u = a1 w^m - a2 u^n v^k
///   v_t -  d2 Lap      v = (a1 + a3) w^m - a2 u^n v^k
///   w_t - (d3 Lap - b) w = -(a1 + a3) w^m - a4 w + a2 u^n v^k
/// with homogeneous Neumann data, plus the exponents used by the decay theory.
struct SystemParams {
  std::array<double, 3> d{1.0, 1.0, 1.0};
  double b = 1.0;
  double m = 1.5;
  double n = 1.01;
  double k = 1.01;
  /// a1..a4; sigma of a4 must be 0.
  std::array<CoefficientSpec, 4> a{};

  double alpha = 0.4;
  double p = 4.0;
  double l = 1.005;
  double epsilon = 0.1;
  double mu = 0.5;

  DomainSpec domain = DomainSpec::interval(3.141592653589793, 128);

  int dimension() const { return domain.dimension; }
  OperatorSpec op_u() const { return {d[0], b}; }
  OperatorSpec op_v() const { return {d[1], 0.0}; }
  OperatorSpec op_w() const { return {d[2], b}; }

  /// Structural checks only; inequality hypotheses are reported by check_hypotheses.
  void validate() const;
};

}  // namespace rdecay
