#include "rdecay/bihari.hpp"

#include "rdecay/quadrature.hpp"
#include "rdecay/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdecay {
namespace {

// log(1 + e^s) without overflow.
double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

void require_l(double l) {
  if (!(l > 1.0) || !std::isfinite(l)) throw std::invalid_argument("l must exceed 1");
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

double g_eval(double y, double l) {
  if (!(y >= 0.0)) throw std::invalid_argument("y must be nonnegative");
  require_l(l);
  return y + std::pow(y, l);
}

double g_m(double y, double M, double l) {
  require_positive(y, "y");
  require_positive(M, "M");
  require_l(l);
  const double e = l - 1.0;
  const double sy = e * std::log(y), sm = e * std::log(M);
  // log(y^e / (1 + y^e)) - log(M^e / (1 + M^e)) = softplus(-sm) - softplus(-sy)
  return (softplus(-sm) - softplus(-sy)) / e;
}

double g_m_horizon(double M, double l) {
  require_positive(M, "M");
  require_l(l);
  const double e = l - 1.0;
  return softplus(-e * std::log(M)) / e;
}

double g_m_inverse(double z, double M, double l) {
  const double limit = g_m_horizon(M, l);
  if (!std::isfinite(z)) throw std::invalid_argument("z must be finite");
  if (!(z < limit)) throw HorizonError("integrated kernel reaches the Bihari horizon", z, limit);
  const double e = l - 1.0;
  const double sm = e * std::log(M);
  const double log_c = sm - softplus(sm) + e * z;
  if (!(log_c < 0.0)) throw HorizonError("integrated kernel reaches the Bihari horizon", z, limit);
  const double log_one_minus_c = std::log(-std::expm1(log_c));
  return std::exp((log_c - log_one_minus_c) / e);
}

double g_m_quadrature(double y, double M, double l) {
  require_positive(y, "y");
  require_positive(M, "M");
  require_l(l);
  // In t = log s the integrand 1 / (1 + s^{l-1}) is smooth and bounded.
  auto f = [l](double t) { return 1.0 / (1.0 + std::exp((l - 1.0) * t)); };
  return quad::checked(quad::integrate(f, std::log(M), std::log(y), {1e-15, 1e-13, 50000}));
}

void BihariProblem::validate() const {
  require_positive(M, "M");
  require_l(l);
  rdecay::validate(lambda);
  require_positive(horizon, "horizon");
}

double bihari_bound(const BihariProblem& prob, double t) {
  prob.validate();
  if (!(t >= 0.0 && t <= prob.horizon)) throw std::invalid_argument("t must lie in [0, horizon]");
  return g_m_inverse(profile_integral(prob.lambda, t), prob.M, prob.l);
}

double paper_f_bound(double c0, double l, double h_integral, SmallnessVariant variant) {
  require_positive(c0, "C0");
  require_l(l);
  if (!(h_integral >= 0.0) || !std::isfinite(h_integral))
    throw std::invalid_argument("H must be finite and nonnegative");
  const double e = l - 1.0;
  const double ce = std::pow(c0, e);
  const double inner = variant == SmallnessVariant::literal ? c0 : ce;
  const double bracket = 1.0 - inner / (1.0 + ce) * std::exp(e * h_integral);
  if (!(bracket > 0.0))
    throw HorizonError("F-bound bracket is not positive", h_integral,
                       std::log((1.0 + ce) / inner) / e);
  const double inv = 1.0 / (1.0 - l);
  return c0 * std::pow(1.0 + ce, inv) * std::exp(h_integral) * std::pow(bracket, inv);
}

std::vector<std::pair<double, double>> bihari_rk4(const BihariProblem& prob, double t_end,
                                                  double step, int stride) {
  prob.validate();
  require_positive(step, "step");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  if (stride < 1) throw std::invalid_argument("stride must be positive");
  auto rhs = [&](double t, double y) { return evaluate(prob.lambda, t) * g_eval(std::max(y, 0.0), prob.l); };
  const auto steps = static_cast<long>(std::ceil(t_end / step - 1e-9));
  std::vector<std::pair<double, double>> out{{0.0, prob.M}};
  double y = prob.M;
  for (long i = 0; i < steps; ++i) {
    const double t = t_end * static_cast<double>(i) / static_cast<double>(steps);
    const double h = t_end / static_cast<double>(steps);
    const double k1 = rhs(t, y);
    const double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = rhs(t + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((i + 1) % stride == 0 || i + 1 == steps)
      out.emplace_back(t_end * static_cast<double>(i + 1) / static_cast<double>(steps), y);
  }
  return out;
}

DominanceAudit bihari_dominance_audit(int draws, std::uint64_t seed, double step, double tolerance) {
  if (draws < 1) throw std::invalid_argument("need at least one draw");
  Rng rng(seed);
  DominanceAudit audit;
  audit.tolerance = tolerance;
  for (int i = 0; i < draws; ++i) {
    BihariProblem prob;
    prob.M = std::exp(rng.uniform(std::log(0.01), std::log(2.0)));
    prob.l = rng.uniform(1.05, 3.0);
    const double limit = g_m_horizon(prob.M, prob.l);
    DominanceRow row;
    row.draw = i;
    row.M = prob.M;
    row.l = prob.l;
    // Kernel scaled so that its integral stays below 90% of the horizon.
    double t_end = 2.0;
    switch (rng.integer(0, 2)) {
      case 0: {
        const double c = rng.uniform(0.1, 1.0) * 0.9 * limit / t_end;
        prob.lambda = ConstantProfile{c};
        row.kernel = "constant";
        break;
      }
      case 1: {
        // int_0^inf e^{-r s} = 1/r
        const double r = std::max(rng.uniform(0.2, 3.0), 1.0 / (0.9 * limit));
        prob.lambda = ExponentialProfile{r};
        row.kernel = "exponential";
        break;
      }
      default: {
        const double c = 0.9 * limit / t_end;
        prob.lambda = BumpProfile{rng.uniform(0.5, 1.5), 0.5, std::min(c, rng.uniform(0.1, 2.0))};
        row.kernel = "bump";
        break;
      }
    }
    prob.horizon = t_end;
    row.t_end = t_end;
    const int stride = 100;
    for (const auto& [t, y] : bihari_rk4(prob, t_end, step, stride)) {
      const double bound = bihari_bound(prob, t);
      const double excess = (y - bound) / bound;
      row.max_relative_excess = std::max(row.max_relative_excess, excess);
      if (!(excess <= tolerance)) ++row.violations;
    }
    audit.violations += row.violations;
    audit.rows.push_back(row);
  }
  return audit;
}

}  // namespace rdecay
