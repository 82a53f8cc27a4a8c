#include "rdecay/hypotheses.hpp"

#include "rdecay/quadrature.hpp"
#include "rdecay/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rdecay {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Distance of a profile's decay exponent from the L^{q*} integrability threshold.
double integrability_margin(const HProfile& h, double q_star) {
  if (const auto* c = std::get_if<ConstantProfile>(&h)) return c->value == 0.0 ? 1.0 : -c->value;
  if (const auto* e = std::get_if<ExponentialProfile>(&h)) return e->rate;
  if (const auto* p = std::get_if<PowerProfile>(&h)) return p->exponent - 1.0 / q_star;
  return 1.0;  // compact support
}

}  // namespace

SmallnessResult smallness_condition(double c0, double l, double h_integral,
                                    SmallnessVariant variant) {
  if (!(c0 > 0.0)) throw std::invalid_argument("C0 must be positive");
  if (!(l > 1.0)) throw std::invalid_argument("l must exceed 1");
  if (!(h_integral >= 0.0)) throw std::invalid_argument("integral of h must be nonnegative");
  const double cl = std::pow(c0, l - 1.0);
  const double denom = variant == SmallnessVariant::literal ? c0 : cl;
  SmallnessResult r;
  r.rhs = std::log((1.0 + cl) / denom);
  r.margin = r.rhs - (l - 1.0) * h_integral;
  r.pass = r.margin > 0.0;
  return r;
}

GrowthAudit growth_condition_audit(const HProfile& h, double rho, double rho_tilde, double q_star,
                                   double horizon, int intervals) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (intervals < 10) throw std::invalid_argument("growth audit needs at least 10 intervals");
  validate(h);
  GrowthAudit out;
  const double dt = horizon / intervals;
  double log_j = -kInf;
  out.times.reserve(static_cast<std::size_t>(intervals));
  out.log_ratios.reserve(static_cast<std::size_t>(intervals));
  double sup_log = -kInf;
  for (int i = 0; i < intervals; ++i) {
    const double t0 = i * dt, t1 = (i + 1) * dt;
    // Increment = e^{q* rho t0 - q* rho~ t1} int_{t0}^{t1} e^{q* rho (s - t0)} h^{q*}(s) ds.
    const double piece = quad::checked(quad::integrate(
        [&](double s) { return std::exp(q_star * rho * (s - t0)) * std::pow(evaluate(h, s), q_star); },
        t0, t1));
    const double log_inc =
        piece > 0.0 ? q_star * rho * t0 - q_star * rho_tilde * t1 + std::log(piece) : -kInf;
    log_j = log_add_exp(log_j - q_star * rho_tilde * dt, log_inc);
    out.times.push_back(t1);
    out.log_ratios.push_back(log_j);
    sup_log = std::max(sup_log, log_j);
  }
  const double log_max = std::log(std::numeric_limits<double>::max());
  out.saturated = sup_log >= log_max;
  out.sup_ratio = out.saturated ? kInf : std::exp(sup_log);
  if (sup_log == -kInf) {
    out.pass = true;
    return out;
  }
  out.pass = !out.saturated;
  const std::size_t start = out.log_ratios.size() - out.log_ratios.size() / 10;
  for (std::size_t i = std::max<std::size_t>(start, 1); i < out.log_ratios.size() && out.pass; ++i)
    if (out.log_ratios[i] > out.log_ratios[i - 1] + 1e-9) out.pass = false;
  return out;
}

bool HypothesisReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const HypothesisEntry& e) { return e.pass; });
}

const HypothesisEntry* HypothesisReport::find(const std::string& name) const {
  for (const auto& e : conditions)
    if (e.name == name) return &e;
  return nullptr;
}

double initial_bound_constant(double q_star, double alpha, double delta, double c1, double c3,
                              double u0_lp, double w0_lp) {
  const double scale = std::pow(delta, -alpha);
  return std::pow(3.0, q_star - 1.0) * std::pow(c1 * scale * u0_lp, q_star) +
         std::pow(5.0, q_star - 1.0) * std::pow(c3 * scale * w0_lp, q_star);
}

double combined_h_integral(const SystemParams& params, double q_star,
                           const std::array<double, 4>& weights, double horizon) {
  auto h = [&](double s) {
    double v = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      v = std::max(v, weights[i] * std::pow(evaluate(params.a[i].profile, s), q_star));
    return v;
  };
  std::vector<double> breaks{0.0, horizon};
  for (const auto& c : params.a) {
    if (const auto* t = std::get_if<TabulatedProfile>(&c.profile))
      for (double x : t->times)
        if (x > 0.0 && x < horizon) breaks.push_back(x);
    if (const auto* b = std::get_if<BumpProfile>(&c.profile))
      for (double x : {b->center - b->width, b->center, b->center + b->width})
        if (x > 0.0 && x < horizon) breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i)
    total += quad::checked(quad::integrate(h, breaks[i - 1], breaks[i]));
  for (std::size_t i = 0; i < 4; ++i) {
    if (weights[i] == 0.0) continue;
    const auto norm = lqstar_norm(params.a[i].profile, q_star, horizon);
    if (!norm.converges) return kInf;
    total += weights[i] * norm.tail;
  }
  return total;
}

HypothesisReport check_hypotheses(const SystemParams& params, const CheckOptions& opts) {
  params.validate();
  HypothesisReport rep;
  auto add = [&](std::string name, double margin, bool strict, std::string detail = {}) {
    const bool pass = strict ? margin > 0.0 : margin >= 0.0;
    rep.conditions.push_back({std::move(name), pass, margin, strict, std::move(detail)});
  };

  const double alpha = params.alpha, p = params.p, l = params.l;
  const double m = params.m, n = params.n, k = params.k, b = params.b, eps = params.epsilon;
  const double dim = params.dimension();
  const auto ce = conjugate_exponents(alpha);
  rep.q_star = ce.q_star;
  rep.q = ce.q;

  // Existence: (GE1), (GE2). The exponent slack is the configured epsilon.
  add("GE1.m_range", std::min(m, 2.0 + eps - m), false, "0 <= m <= 2 + eps");
  add("GE1.nk_sum", 2.0 + eps - (n + k), false, "n + k <= 2 + eps");
  add("GE2.nonnegative_initial", std::isfinite(opts.initial_sup) ? opts.initial_min : -kInf,
      false, "initial data bounded and >= 0");

  // Convergence.
  add("T2.one_minus_q_alpha", 1.0 - ce.q * alpha, true, "1 - q alpha > 0");
  for (std::size_t i = 0; i < 3; ++i)
    add("T2.sigma_" + std::to_string(i + 1), 1.0 + ce.q * (params.a[i].sigma - alpha * l), true,
        "1 + q (sigma_i - alpha l) > 0");
  add("T2.l_range", std::min(l - 1.0, std::min({m, n, k}) - l), true, "1 < l < min{m, n, k}");
  for (std::size_t i = 0; i < 4; ++i) {
    rep.lqstar[i] = lqstar_norm(params.a[i].profile, ce.q_star, opts.horizon);
    const double margin = integrability_margin(params.a[i].profile, ce.q_star);
    add("T2.h" + std::to_string(i + 1) + "_in_Lqstar", margin, true,
        "norm " + fmt(rep.lqstar[i].value) + (rep.lqstar[i].converges ? "" : " (tail diverges)"));
  }
  {
    double c = 0.0;
    bool feasible = true;
    const int npts = std::max(opts.comparison_grid, 2);
    for (int i = 0; i < npts; ++i) {
      const double t = opts.horizon * i / (npts - 1);
      const double a1 = eval_coefficient(params.a[0], t), a3 = eval_coefficient(params.a[2], t);
      if (a1 == 0.0) continue;
      if (a3 == 0.0) {
        feasible = false;
        break;
      }
      c = std::max(c, a1 / a3);
    }
    if (feasible) rep.comparison_constant = c;
    add("T2.comparison_a1_le_C_a3", feasible ? 1.0 : -1.0, true,
        feasible ? "minimal C " + fmt(c) : "a3 vanishes where a1 does not");
  }

  // (H)
  rep.l_lower = std::max({1.0, dim * (m - 1.0) / (2.0 * p * alpha),
                          dim * (n - 1.0) / (2.0 * p * alpha)});
  rep.l_upper = std::min(m, n);
  add("H.two_alpha_gt_N_over_p", 2.0 * alpha - dim / p, true, "2 alpha > N / p");
  add("H.l_interval_nonempty", rep.l_upper - rep.l_lower, true, "max{1, ...} < min{m, n}");

  // Decay.
  add("T3.l_in_interval", std::min(l - rep.l_lower, rep.l_upper - l), true,
      "l in (" + fmt(rep.l_lower) + ", " + fmt(rep.l_upper) + ")");
  add("T3.epsilon_range", std::min(eps, b - eps), true, "0 < eps < b");
  add("T3.mu_range", params.mu >= 0.0 ? 2.0 * alpha - dim / p - params.mu : params.mu, true,
      "0 <= mu < 2 alpha - N / p");

  auto domain = make_domain(params.domain);
  rep.lambda1 = domain->least_positive_eigenvalue();
  const auto t_grid = log_grid(1e-3, 1e3, 121);
  rep.c1 = semigroup_estimate_audit(*domain, params.op_u(), alpha, opts.semigroup_slack, t_grid)
               .max_ratio;
  rep.c3 = semigroup_estimate_audit(*domain, params.op_w(), alpha, opts.semigroup_slack, t_grid)
               .max_ratio;
  rep.c0 = initial_bound_constant(ce.q_star, alpha, opts.delta, rep.c1, rep.c3, opts.u0_lp,
                                  opts.w0_lp);
  rep.h_integral = combined_h_integral(params, ce.q_star, opts.h_weights, opts.horizon);
  if (rep.c0 > 0.0 && std::isfinite(rep.h_integral)) {
    rep.smallness_literal = smallness_condition(rep.c0, l, rep.h_integral, SmallnessVariant::literal);
    rep.smallness_derivation =
        smallness_condition(rep.c0, l, rep.h_integral, SmallnessVariant::derivation);
  } else if (rep.c0 == 0.0) {
    // Zero data: F vanishes and the bound holds trivially.
    rep.smallness_literal = rep.smallness_derivation = {true, kInf, kInf};
  } else {
    rep.smallness_literal = rep.smallness_derivation = {false, -kInf, 0.0};
  }
  const auto& chosen = opts.variant == SmallnessVariant::literal ? rep.smallness_literal
                                                                 : rep.smallness_derivation;
  add("T3.smallness", chosen.margin, true,
      std::string(opts.variant == SmallnessVariant::literal ? "literal" : "derivation") +
          " variant, C0 " + fmt(rep.c0) + ", H " + fmt(rep.h_integral));

  const double d2_lambda = params.d[1] * rep.lambda1;
  rep.decay_case = d2_lambda < l * b ? "b_i" : "b_ii";
  if (rep.decay_case == "b_ii") {
    const double rho_min = d2_lambda - l * (b - eps);
    if (!opts.rho || !opts.rho_tilde) {
      add("T3.rho_lower", -kInf, true, "rho not configured");
      add("T3.rho_tilde_upper", -kInf, true, "rho_tilde not configured");
    } else {
      add("T3.rho_lower", *opts.rho - rho_min, true, "rho > d2 lambda - l (b - eps)");
      add("T3.rho_tilde_upper", d2_lambda - *opts.rho_tilde, true, "rho_tilde < d2 lambda");
      for (std::size_t i = 0; i < 3; ++i) {
        const auto g = growth_condition_audit(params.a[i].profile, *opts.rho, *opts.rho_tilde,
                                              ce.q_star, opts.horizon);
        add("T3.growth_h" + std::to_string(i + 1), g.pass ? 1.0 : -1.0, true,
            "sup ratio " + fmt(g.sup_ratio) + (g.saturated ? " (saturated)" : ""));
      }
    }
  }
  return rep;
}

}  // namespace rdecay
