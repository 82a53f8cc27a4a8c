#include "rdecay/analysis.hpp"

#include "rdecay/quadrature.hpp"
#include "rdecay/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdecay {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DecayEntry make_entry(std::string name, const Trajectory& traj, double Sample::*field,
                      double predicted, const DecayOptions& opts) {
  std::vector<double> ts, vs;
  ts.reserve(traj.samples.size());
  vs.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    ts.push_back(s.t);
    vs.push_back(s.*field);
  }
  DecayEntry e;
  e.quantity = std::move(name);
  e.predicted_rate = predicted;
  try {
    e.fit = fit_decay_rate(ts, vs, opts.window, opts.t_min);
    e.relative_deviation = predicted != 0.0 && std::isfinite(predicted)
                               ? (e.fit.rate - predicted) / predicted
                               : kNaN;
  } catch (const std::invalid_argument&) {
    e.fit.rate = kNaN;
    e.relative_deviation = kNaN;
  }
  return e;
}

}  // namespace

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                        double window, double t_min) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("window must lie in (0, 1]");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("times must be increasing");

  const std::size_t n = times.size();
  const auto take = static_cast<std::size_t>(std::ceil(window * static_cast<double>(n)));
  const std::size_t start = n - std::min(take, n);
  std::vector<double> x, y;
  for (std::size_t i = start; i < n; ++i) {
    if (times[i] < t_min) continue;
    if (!(values[i] > kDecayFloor) || !std::isfinite(values[i])) continue;
    x.push_back(times[i]);
    y.push_back(-std::log(values[i]));
  }
  if (x.size() < 4) throw std::invalid_argument("fewer than 4 usable samples for a decay fit");

  // Centred normal equations.
  const double m = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  DecayFit fit;
  fit.rate = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (ym + fit.rate * (x[i] - xm));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  fit.samples = x.size();
  fit.t_from = x.front();
  fit.t_to = x.back();
  return fit;
}

const DecayEntry* DecayReport::find(const std::string& quantity) const {
  for (const auto& e : entries)
    if (e.quantity == quantity) return &e;
  return nullptr;
}

DecayReport decay_report(const Trajectory& traj, const SystemParams& params,
                         const DecayOptions& opts) {
  DecayReport rep;
  const auto domain = make_domain(params.domain);
  rep.lambda1 = domain->least_positive_eigenvalue();
  const double d2_lambda = params.d[1] * rep.lambda1;
  const double b_eps = params.b - params.epsilon;
  rep.decay_case = d2_lambda < params.l * params.b ? "b_i" : "b_ii";
  rep.predicted_uw = b_eps;
  double qplus_rate = d2_lambda;
  if (rep.decay_case == "b_i") {
    rep.predicted_v = std::min(b_eps, d2_lambda);
  } else if (opts.rho_tilde) {
    rep.predicted_v = std::min(b_eps, d2_lambda - *opts.rho_tilde);
    qplus_rate = d2_lambda - *opts.rho_tilde;
  } else {
    rep.predicted_v = kNaN;
    qplus_rate = kNaN;
  }

  rep.entries.push_back(make_entry("sup_u", traj, &Sample::sup_u, b_eps, opts));
  rep.entries.push_back(make_entry("sup_w", traj, &Sample::sup_w, b_eps, opts));
  rep.entries.push_back(make_entry("holder_u", traj, &Sample::holder_u, b_eps, opts));
  rep.entries.push_back(make_entry("holder_w", traj, &Sample::holder_w, b_eps, opts));
  rep.entries.push_back(make_entry("frac_u", traj, &Sample::frac_u, b_eps, opts));
  rep.entries.push_back(make_entry("frac_w", traj, &Sample::frac_w, b_eps, opts));
  rep.entries.push_back(
      make_entry("holder_v_minus_vinf", traj, &Sample::holder_v_minus_vinf, rep.predicted_v, opts));
  rep.entries.push_back(make_entry("frac_qplus_v", traj, &Sample::frac_qplus_v, qplus_rate, opts));
  return rep;
}

VInfinityEstimate v_infinity(const Trajectory& traj, const SystemParams& /*params*/) {
  if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");
  const Sample& first = traj.samples.front();
  const Sample& last = traj.samples.back();
  VInfinityEstimate est;
  est.simulated = last.q0_v;
  est.integral_identity = first.q0_v + last.reaction_integral_accum / traj.volume;
  est.paper_formula = first.q0_w - last.w_loss_accum / traj.volume;
  est.gap_simulated_identity = est.simulated - est.integral_identity;
  est.gap_simulated_paper = est.simulated - est.paper_formula;
  est.gap_identity_paper = est.integral_identity - est.paper_formula;
  est.relative_gap = std::abs(est.gap_simulated_identity) / (1.0 + std::abs(est.simulated));
  return est;
}

double mass_balance_residual(const Trajectory& traj) {
  if (traj.samples.empty()) return 0.0;
  const double v0 = traj.samples.front().q0_v;
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double r = traj.volume * (s.q0_v - v0) - s.reaction_integral_accum;
    worst = std::max(worst, std::abs(r));
  }
  return worst / (traj.volume * (1.0 + v0));
}

GridField random_band_limited(const std::shared_ptr<const Domain>& domain, int modes,
                              std::uint64_t seed, bool shift_nonnegative) {
  Rng rng(seed);
  SpectralField c{domain, VectorX<double>::Zero(domain->node_count())};
  const int k0 = std::min(modes, domain->size(0) - 1);
  const int k1 = domain->dimension() == 2 ? std::min(modes, domain->size(1) - 1) : 0;
  for (int j = 0; j <= k1; ++j)
    for (int i = 0; i <= k0; ++i) {
      if (i == 0 && j == 0) continue;
      c[{i, j}] = rng.uniform(-1.0, 1.0) / static_cast<double>(1 + i + j);
    }
  GridField f = to_grid(c);
  if (shift_nonnegative) {
    const double lo = f.values.minCoeff();
    const double spread = f.values.cwiseAbs().maxCoeff();
    f.values.array() += -lo + rng.uniform() * spread;
  }
  return f;
}

double interpolation_ratio(const GridField& y, const OperatorSpec& op, double alpha, double p,
                           double l, double theta) {
  const double top = lp_norm(y, p * l);
  if (top == 0.0) return kNaN;
  const double frac = fractional_norm(op, alpha, y, p);
  const double base = lp_norm(y, p);
  return top / (std::pow(frac, theta) * std::pow(base, 1.0 - theta));
}

InterpolationAudit interpolation_audit(const std::shared_ptr<const Domain>& domain,
                                       const OperatorSpec& op, double alpha, double p, double l,
                                       double theta, int samples, std::uint64_t seed, int modes) {
  op.validate();
  require_fractional_order(alpha);
  if (!(p >= 1.0) || !(l >= 1.0)) throw std::invalid_argument("need p >= 1 and l >= 1");
  const double lower = domain->dimension() * (l - 1.0) / (2.0 * p * l * alpha);
  if (!(theta > lower && theta < 1.0))
    throw std::invalid_argument("theta must lie in (N (l - 1) / (2 p l alpha), 1)");
  if (samples < 1) throw std::invalid_argument("need at least one sample");

  InterpolationAudit out;
  out.samples = samples;
  Rng seeds(seed);
  for (int i = 0; i < samples; ++i) {
    const GridField y = random_band_limited(domain, modes, seeds.bits());
    if (y.values.cwiseAbs().maxCoeff() == 0.0) {
      ++out.skipped;
      continue;
    }
    const double r = interpolation_ratio(y, op, alpha, p, l, theta);
    if (!std::isfinite(r)) {
      ++out.violations;
      continue;
    }
    out.fitted_c = std::max(out.fitted_c, r);
  }
  return out;
}

IntegralBoundAudit integral_bound_audit(double alpha, double beta,
                                        const std::vector<double>& t_grid) {
  require_fractional_order(alpha);
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  IntegralBoundAudit out;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("audit times must be positive");
    // For beta > 0 the envelope e^{beta t} is folded into the integrand.
    const double shift = beta > 0.0 ? t : 0.0;
    auto f = [&](double s) {
      const double w = alpha == 0.0 ? 1.0 : std::pow(s, -alpha);
      return w * std::exp(beta * (s - shift));
    };
    const double integral = quad::checked(quad::integrate_left_singular(f, 0.0, t, alpha));
    const double envelope = beta > 0.0 ? 1.0 : (beta == 0.0 ? t + 1.0 : 1.0);
    IntegralBoundRow row{alpha, beta, t, integral / envelope};
    out.all_finite = out.all_finite && std::isfinite(row.integral_over_envelope);
    out.sup_ratio = std::max(out.sup_ratio, row.integral_over_envelope);
    out.rows.push_back(row);
  }
  return out;
}

double convolution_integral(double nu, double mu, double tau, double z) {
  if (!(nu > 0.0 && mu > 0.0 && tau > 0.0 && z > 0.0))
    throw std::invalid_argument("nu, mu, tau and z must be positive");
  const double half = 0.5 * z;
  // Left half: singular like xi^{mu-1} at 0.
  auto left = [&](double xi) {
    return std::pow(z - xi, nu - 1.0) * std::pow(xi, mu - 1.0) * std::exp(-tau * xi);
  };
  // Right half in the distance r = z - xi: singular like r^{nu-1} at 0.
  auto right = [&](double r) {
    return std::pow(r, nu - 1.0) * std::pow(z - r, mu - 1.0) * std::exp(-tau * (z - r));
  };
  const double a = quad::checked(quad::integrate_left_singular(left, 0.0, half, std::max(0.0, 1.0 - mu)));
  const double b = quad::checked(quad::integrate_left_singular(right, 0.0, half, std::max(0.0, 1.0 - nu)));
  return a + b;
}

ConvolutionBoundAudit convolution_bound_audit(const std::vector<double>& nus,
                                              const std::vector<double>& mus,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& zs) {
  ConvolutionBoundAudit out;
  for (double nu : nus)
    for (double mu : mus)
      for (double tau : taus)
        for (double z : zs) {
          ConvolutionBoundRow row{nu, mu, tau, z, 0.0};
          row.scaled = std::pow(tau, mu) * std::pow(z, 1.0 - nu) * convolution_integral(nu, mu, tau, z);
          out.all_finite = out.all_finite && std::isfinite(row.scaled);
          out.sup_scaled = std::max(out.sup_scaled, row.scaled);
          out.rows.push_back(row);
        }
  return out;
}

}  // namespace rdecay
