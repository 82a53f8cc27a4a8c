#include "rdecay/solver.hpp"

#include "rdecay/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdecay {
namespace {

using Vec = VectorX<double>;
using Triple = std::array<Vec, 3>;

struct Rates {
  double a1, a2, a3, a4;
};

Rates rates_at(const SystemParams& p, double t) {
  return {eval_coefficient(p.a[0], t), eval_coefficient(p.a[1], t), eval_coefficient(p.a[2], t),
          eval_coefficient(p.a[3], t)};
}

Vec clamped_pow(const Vec& x, double e) {
  if (e == 1.0) return x.cwiseMax(0.0);
  return x.cwiseMax(0.0).array().pow(e).matrix();
}

Triple reaction(const Triple& y, double t, const SystemParams& p) {
  const Rates r = rates_at(p, t);
  const Vec wm = clamped_pow(y[2], p.m);
  const Vec uv = (clamped_pow(y[0], p.n).array() * clamped_pow(y[1], p.k).array()).matrix();
  Triple f;
  f[0] = r.a1 * wm - r.a2 * uv;
  f[1] = (r.a1 + r.a3) * wm - r.a2 * uv;
  f[2] = -(r.a1 + r.a3) * wm - r.a4 * y[2] + r.a2 * uv;
  return f;
}

Triple as_triple(const State& s) { return {s.u.values, s.v.values, s.w.values}; }

State as_state(const Triple& y, double t, const std::shared_ptr<const Domain>& d) {
  return {t, GridField(d, y[0]), GridField(d, y[1]), GridField(d, y[2])};
}

void axpy(Triple& y, double a, const Triple& x) {
  for (std::size_t c = 0; c < 3; ++c) y[c] += a * x[c];
}

// Diffusion multipliers e^{-h (d_i lambda_k + shift_i)} cached per step size.
class Stepper {
 public:
  Stepper(const SystemParams& params, const SolverConfig& config,
          std::shared_ptr<const Domain> domain)
      : params_(params), config_(config), domain_(std::move(domain)) {
    ops_ = {params_.op_u(), params_.op_v(), params_.op_w()};
  }

  void advance(Triple& y, double t, double h) {
    if (config_.scheme == Scheme::lie) {
      Triple f = forced_reaction(y, t);
      axpy(y, h, f);
      diffuse(y, h);
    } else {
      diffuse(y, 0.5 * h);
      Triple k1 = forced_reaction(y, t);
      Triple mid = y;
      axpy(mid, 0.5 * h, k1);
      Triple k2 = forced_reaction(mid, t + 0.5 * h);
      axpy(y, h, k2);
      diffuse(y, 0.5 * h);
    }
    check(y, t + h);
  }

 private:
  Triple forced_reaction(const Triple& y, double t) const {
    Triple f = reaction(y, t, params_);
    if (config_.manufactured) {
      const auto g = config_.manufactured->source(t);
      for (std::size_t c = 0; c < 3; ++c) f[c] += g[c];
    }
    return f;
  }

  const std::array<Vec, 3>& factors(double h) {
    for (auto& entry : cache_)
      if (entry.first == h) return entry.second;
    std::array<Vec, 3> fac;
    const auto& lam = domain_->eigenvalues();
    for (std::size_t c = 0; c < 3; ++c)
      fac[c] = lam.unaryExpr([&](double l) { return std::exp(-h * ops_[c].multiplier(l)); });
    if (cache_.size() > 4) cache_.erase(cache_.begin());
    cache_.emplace_back(h, std::move(fac));
    return cache_.back().second;
  }

  void diffuse(Triple& y, double h) {
    const auto& fac = factors(h);
    const auto& d = *domain_;
    for (std::size_t c = 0; c < 3; ++c) {
      Vec coeff = detail::tensor_apply(d, d.analysis(0), d.analysis(1), y[c]);
      coeff.array() *= fac[c].array();
      y[c] = detail::tensor_apply(d, d.synthesis(0), d.synthesis(1), coeff);
    }
  }

  void check(const Triple& y, double t) const {
    for (const auto& comp : y) {
      if (!comp.allFinite()) throw BlowUp(t, "non-finite value");
      if (comp.cwiseAbs().maxCoeff() > config_.blowup_threshold)
        throw BlowUp(t, "sup norm exceeded blow-up threshold");
    }
  }

  const SystemParams& params_;
  const SolverConfig& config_;
  std::shared_ptr<const Domain> domain_;
  std::array<OperatorSpec, 3> ops_;
  std::vector<std::pair<double, std::array<Vec, 3>>> cache_;
};

Sample observe(const State& s, const SystemParams& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Sample o;
  o.t = s.t;
  o.sup_u = lp_norm(s.u, inf);
  o.sup_v = lp_norm(s.v, inf);
  o.sup_w = lp_norm(s.w, inf);
  o.q0_u = q0(s.u);
  o.q0_v = q0(s.v);
  o.q0_w = q0(s.w);
  o.lp_u = lp_norm(s.u, p.p);
  o.lp_w = lp_norm(s.w, p.p);
  o.frac_u = fractional_norm(p.op_u(), p.alpha, s.u, p.p);
  o.frac_w = fractional_norm(p.op_w(), p.alpha, s.w, p.p);
  // B^alpha with b = 0 already annihilates the mean, so this is ||B+^alpha Q+ v||_p.
  o.frac_qplus_v = fractional_norm(p.op_v(), p.alpha, q_plus(s.v), p.p);
  o.holder_u = holder_norm(s.u, p.mu);
  o.holder_w = holder_norm(s.w, p.mu);
  o.min_u = s.u.values.minCoeff();
  o.min_v = s.v.values.minCoeff();
  o.min_w = s.w.values.minCoeff();
  return o;
}

}  // namespace

void State::validate() const {
  if (!u.domain || !v.domain || !w.domain) throw std::invalid_argument("state has no domain");
  detail::require_same_domain(u.domain.get(), v.domain.get());
  detail::require_same_domain(u.domain.get(), w.domain.get());
  if (!u.all_finite() || !v.all_finite() || !w.all_finite())
    throw std::domain_error("state holds non-finite values");
  if (!(t >= 0.0)) throw std::invalid_argument("state time must be nonnegative");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
  if (!(dt < t_end)) throw std::invalid_argument("dt must be smaller than t_end");
  if (sample_stride < 1) throw std::invalid_argument("sample_stride must be positive");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("blow-up threshold must be positive");
  if (!(negativity_tolerance >= 0.0))
    throw std::invalid_argument("negativity tolerance must be nonnegative");
}

ManufacturedForcing::ManufacturedForcing(ExactSolution exact, const SystemParams& params,
                                         std::shared_ptr<const Domain> domain)
    : exact_(std::move(exact)), params_(params), domain_(std::move(domain)) {
  for (std::size_t c = 0; c < 3; ++c)
    for (const auto& term : exact_.components[c]) {
      if (!std::isfinite(term.amplitude) || !std::isfinite(term.rate))
        throw std::invalid_argument("exact-solution terms must be finite");
      if (domain_->dimension() == 1 && term.mode[1] != 0)
        throw std::invalid_argument("second mode index must be 0 on an interval");
      SpectralField unit{domain_, Vec::Zero(domain_->node_count())};
      unit[term.mode] = 1.0;  // throws out_of_range for unsupported modes
      shapes_[c].push_back(to_grid(unit).values);
      eigenvalues_[c].push_back(laplacian_eigenvalue(*domain_, term.mode));
    }
}

VectorX<double> ManufacturedForcing::exact_values(int c, double t) const {
  const auto ci = static_cast<std::size_t>(c);
  Vec out = Vec::Zero(domain_->node_count());
  for (std::size_t i = 0; i < exact_.components[ci].size(); ++i) {
    const auto& term = exact_.components[ci][i];
    out += term.amplitude * std::exp(-term.rate * t) * shapes_[ci][i];
  }
  return out;
}

State ManufacturedForcing::exact_state(double t) const {
  return as_state({exact_values(0, t), exact_values(1, t), exact_values(2, t)}, t, domain_);
}

std::array<VectorX<double>, 3> ManufacturedForcing::source(double t) const {
  const std::array<OperatorSpec, 3> ops{params_.op_u(), params_.op_v(), params_.op_w()};
  Triple q{exact_values(0, t), exact_values(1, t), exact_values(2, t)};
  Triple g = reaction(q, t, params_);
  for (std::size_t c = 0; c < 3; ++c) {
    g[c] = -g[c];
    for (std::size_t i = 0; i < exact_.components[c].size(); ++i) {
      const auto& term = exact_.components[c][i];
      const double linear = -term.rate + ops[c].multiplier(eigenvalues_[c][i]);
      g[c] += linear * term.amplitude * std::exp(-term.rate * t) * shapes_[c][i];
    }
  }
  return g;
}

ManufacturedForcing manufactured_forcing(const ExactSolution& exact, const SystemParams& params) {
  return ManufacturedForcing(exact, params, make_domain(params.domain));
}

ReactionTerms reaction_terms(const State& state, double t, const SystemParams& params) {
  state.validate();
  const Triple f = reaction(as_triple(state), t, params);
  for (const auto& c : f)
    if (!c.allFinite()) throw BlowUp(t, "non-finite reaction term");
  const auto& d = state.u.domain;
  return {GridField(d, f[0]), GridField(d, f[1]), GridField(d, f[2])};
}

State step(const State& state, double dt, const SystemParams& params, const SolverConfig& config) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  state.validate();
  Stepper stepper(params, config, state.u.domain);
  Triple y = as_triple(state);
  stepper.advance(y, state.t, dt);
  return as_state(y, state.t + dt, state.u.domain);
}

Trajectory integrate(const State& initial, const SystemParams& params,
                     const SolverConfig& config) {
  initial.validate();
  config.validate();
  const auto domain = initial.u.domain;
  Stepper stepper(params, config, domain);
  const double volume = domain->volume();

  Trajectory traj;
  traj.volume = volume;
  std::vector<Vec> v_samples;

  Triple y = as_triple(initial);
  double t = initial.t;
  const double t_final = initial.t + config.t_end;
  double acc_reaction = 0.0, acc_wloss = 0.0;
  auto integrands = [&](const Triple& state, double time) {
    const Triple f = reaction(state, time, params);
    const double loss = eval_coefficient(params.a[3], time) + params.b;
    return std::pair{volume * f[1].mean(), volume * loss * state[2].mean()};
  };
  auto [i_reaction, i_wloss] = integrands(y, t);
  traj.running_min = std::min({y[0].minCoeff(), y[1].minCoeff(), y[2].minCoeff()});
  traj.running_sup_v = y[1].maxCoeff();

  auto record = [&](const Triple& state, double time) {
    const State s = as_state(state, time, domain);
    Sample o = observe(s, params);
    o.reaction_integral_accum = acc_reaction;
    o.w_loss_accum = acc_wloss;
    traj.samples.push_back(o);
    v_samples.push_back(state[1]);
    if (config.record_snapshots) traj.snapshots.push_back(s);
  };
  record(y, t);

  std::size_t n = 0;
  bool last_recorded = true;
  while (t < t_final) {
    double h = config.dt;
    // Land exactly on t_final; absorb a sliver into the last step.
    const bool last = t + h > t_final || t_final - (t + h) < 1e-9 * config.dt;
    if (last) h = t_final - t;
    const Triple before = y;
    try {
      stepper.advance(y, t, h);
    } catch (const BlowUp& e) {
      traj.abort = Abort{e.time, e.what()};
      y = before;
      break;
    }
    ++n;
    t = last ? t_final : initial.t + static_cast<double>(n) * config.dt;
    const auto [nr, nw] = integrands(y, t);
    acc_reaction += 0.5 * h * (i_reaction + nr);
    acc_wloss += 0.5 * h * (i_wloss + nw);
    i_reaction = nr;
    i_wloss = nw;
    traj.running_min = std::min({traj.running_min, y[0].minCoeff(), y[1].minCoeff(), y[2].minCoeff()});
    traj.running_sup_v = std::max(traj.running_sup_v, y[1].maxCoeff());
    last_recorded = false;
    if (n % static_cast<std::size_t>(config.sample_stride) == 0 || t >= t_final) {
      record(y, t);
      last_recorded = true;
    }
  }
  if (!last_recorded) record(y, t);
  traj.steps = n;
  traj.final_state = as_state(y, t, domain);

  // ||v - v_inf||_{C^mu} with v_inf the mean of v at the last sample.
  const double v_inf = traj.samples.back().q0_v;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    GridField diff(domain, (v_samples[i].array() - v_inf).matrix());
    traj.samples[i].holder_v_minus_vinf = holder_norm(diff, params.mu);
  }
  return traj;
}

std::array<double, 17> csv_row(const Sample& s) {
  return {s.t,        s.sup_u,    s.sup_v,      s.sup_w,  s.q0_v,
          s.lp_u,     s.lp_w,     s.frac_u,     s.frac_w, s.frac_qplus_v,
          s.holder_u, s.holder_w, s.holder_v_minus_vinf,  s.min_u,
          s.min_v,    s.min_w,    s.reaction_integral_accum};
}

}  // namespace rdecay
