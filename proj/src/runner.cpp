#include "rdecay/runner.hpp"

#include "rdecay/bihari.hpp"
#include "rdecay/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

namespace rdecay {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string brief(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

fs::path resolve_output_dir(const std::string& configured) {
  if (const char* env = std::getenv("RD_DECAY_OUT"); env && *env) return fs::path(env);
  return fs::path(configured);
}

std::vector<AssertionResult> evaluate_assertions(const Scenario& sc, const RunOutcome& run) {
  const Assertions& a = sc.assertions;
  const Trajectory& traj = run.trajectory;
  std::vector<AssertionResult> out;
  if (a.no_blowup)
    out.push_back({"no_blowup", traj.completed(),
                   traj.abort ? traj.abort->time : (traj.samples.empty() ? 0.0 : traj.samples.back().t),
                   "integrates to t_end"});
  if (a.min_floor)
    out.push_back({"min_floor", traj.running_min >= *a.min_floor, traj.running_min,
                   ">= " + brief(*a.min_floor)});
  if (a.hypotheses) {
    int failing = 0;
    for (const auto& c : run.hypotheses.conditions) failing += c.pass ? 0 : 1;
    out.push_back({"hypotheses", run.hypotheses.all_pass(), static_cast<double>(failing),
                   "all conditions pass"});
  }
  if (a.decay_tolerance) {
    const double tol = *a.decay_tolerance;
    const double b = sc.params.b, floor = b - sc.params.epsilon;
    for (const char* q : {"sup_u", "sup_w"}) {
      const DecayEntry* e = run.decay ? run.decay->find(q) : nullptr;
      const double rate = e ? e->fit.rate : std::nan("");
      const bool ok = std::isfinite(rate) && rate >= floor && std::abs(rate - b) <= tol * b;
      out.push_back({std::string("decay.") + q, ok, rate,
                     ">= " + brief(floor) + " and within " + brief(tol) + " of b"});
    }
    const DecayEntry* v = run.decay ? run.decay->find("holder_v_minus_vinf") : nullptr;
    const double dev = v ? v->relative_deviation : std::nan("");
    out.push_back({"decay.holder_v_minus_vinf", std::isfinite(dev) && std::abs(dev) <= tol,
                   v ? v->fit.rate : std::nan(""),
                   "within " + brief(tol) + " of predicted"});
  }
  if (a.v_infinity_tolerance) {
    const double gap = run.v_inf ? run.v_inf->relative_gap : std::nan("");
    out.push_back({"v_infinity", std::isfinite(gap) && gap < *a.v_infinity_tolerance, gap,
                   "< " + brief(*a.v_infinity_tolerance)});
  }
  if (a.mass_balance_tolerance) {
    const double r = traj.completed() ? run.mass_balance : std::nan("");
    out.push_back({"mass_balance", std::isfinite(r) && r < *a.mass_balance_tolerance, r,
                   "< " + brief(*a.mass_balance_tolerance)});
  }
  return out;
}

RunOutcome run_scenario(const Scenario& sc, const fs::path& out_dir, std::ostream& log) {
  RunOutcome run;
  fs::create_directories(out_dir);
  const auto domain = make_domain(sc.params.domain);
  const State initial = make_initial_state(sc.initial, domain, sc.seed);

  run.hypotheses = check_hypotheses(sc.params, check_options(sc, initial));
  write_json(out_dir / "hypotheses.json", hypotheses_json(run.hypotheses));
  run.files.push_back(out_dir / "hypotheses.json");
  log << "hypotheses: " << (run.hypotheses.all_pass() ? "all pass" : "some fail") << " (case "
      << run.hypotheses.decay_case << ")\n";

  SolverConfig config = sc.solver;
  if (sc.manufactured)
    config.manufactured = std::make_shared<const ManufacturedForcing>(*sc.manufactured, sc.params, domain);
  run.trajectory = integrate(initial, sc.params, config);
  {
    std::ofstream csv(out_dir / "trajectory.csv", std::ios::binary);
    write_trajectory_csv(csv, run.trajectory);
  }
  run.files.push_back(out_dir / "trajectory.csv");

  if (!run.trajectory.completed()) {
    log << "aborted at t = " << format_double(run.trajectory.abort->time) << ": "
        << run.trajectory.abort->reason << "\n";
    run.assertions = evaluate_assertions(sc, run);
    write_json(out_dir / "decay.json", aborted_run_json(run.trajectory, run.assertions));
    run.files.push_back(out_dir / "decay.json");
    run.status = kExitAbort;
    return run;
  }

  DecayOptions dopts;
  dopts.window = sc.analysis.fit_window;
  dopts.t_min = sc.analysis.fit_t_min;
  dopts.rho_tilde = sc.analysis.rho_tilde;
  run.decay = decay_report(run.trajectory, sc.params, dopts);
  run.v_inf = v_infinity(run.trajectory, sc.params);
  run.mass_balance = mass_balance_residual(run.trajectory);
  run.assertions = evaluate_assertions(sc, run);

  write_json(out_dir / "decay.json", decay_json(*run.decay, run.trajectory, run.assertions));
  write_json(out_dir / "v_infinity.json", v_infinity_json(*run.v_inf, run.mass_balance));
  run.files.push_back(out_dir / "decay.json");
  run.files.push_back(out_dir / "v_infinity.json");

  for (const auto& e : run.decay->entries)
    log << "rate " << e.quantity << ": fitted " << format_double(e.fit.rate) << ", predicted "
        << format_double(e.predicted_rate) << "\n";
  log << "v_inf: simulated " << format_double(run.v_inf->simulated) << ", identity "
      << format_double(run.v_inf->integral_identity) << ", formula "
      << format_double(run.v_inf->paper_formula) << "\n";
  for (const auto& a : run.assertions)
    log << (a.pass ? "PASS " : "FAIL ") << a.name << " = " << format_double(a.value) << " ("
        << a.requirement << ")\n";
  const bool ok = std::all_of(run.assertions.begin(), run.assertions.end(),
                              [](const AssertionResult& a) { return a.pass; });
  run.status = ok ? kExitPass : kExitAssertion;
  return run;
}

namespace {

struct AuditOutcome {
  std::string name;
  bool pass = false;
  std::string file;
  json summary;
};

std::ofstream open_csv(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

AuditOutcome semigroup_suite(const fs::path& dir) {
  const auto domain = make_domain(DomainSpec::interval(3.141592653589793, 128));
  const auto grid = log_grid(1e-3, 1e3, 121);
  const double slack = 0.1;
  auto out = open_csv(dir / "semigroup_audit.csv");
  CsvWriter csv(out, {"diffusion", "shift", "alpha", "slack", "mean_free", "max_ratio",
                      "certified_rate", "attaining_k0", "attaining_k1", "attaining_time",
                      "literal_failure_time"});
  bool pass = true;
  double sup = 0.0;
  const std::vector<std::pair<OperatorSpec, bool>> ops = {
      {{1.0, 1.0}, false}, {{1.0, 0.0}, true}, {{0.5, 2.0}, false}, {{2.0, 0.5}, false}};
  for (const auto& [op, mean_free] : ops)
    for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
      const auto r = semigroup_estimate_audit(*domain, op, alpha, slack, grid, mean_free);
      pass = pass && std::isfinite(r.max_ratio) && r.max_ratio > 0.0;
      sup = std::max(sup, r.max_ratio);
      csv.row(std::vector<double>{op.diffusion, op.shift, alpha, slack, mean_free ? 1.0 : 0.0,
                                  r.max_ratio, r.certified_rate,
                                  static_cast<double>(r.attaining_mode[0]),
                                  static_cast<double>(r.attaining_mode[1]), r.attaining_time,
                                  r.literal_failure_time.value_or(std::nan(""))});
    }
  return {"semigroup", pass, "semigroup_audit.csv", {{"sup_ratio", json_number(sup)}}};
}

AuditOutcome interpolation_suite(const fs::path& dir, std::uint64_t seed) {
  const auto domain = make_domain(DomainSpec::interval(3.141592653589793, 128));
  const OperatorSpec op{1.0, 1.0};
  const double alpha = 0.4, p = 2.0, l = 1.5, theta = 0.5;
  const int samples = 1000;
  auto out = open_csv(dir / "interpolation_audit.csv");
  CsvWriter csv(out, {"alpha", "p", "l", "theta", "seed", "samples", "fitted_c", "violations",
                      "skipped"});
  std::vector<double> cs;
  int violations = 0;
  for (std::uint64_t s : {seed, seed + 1}) {
    const auto r = interpolation_audit(domain, op, alpha, p, l, theta, samples, s);
    cs.push_back(r.fitted_c);
    violations += r.violations;
    csv.row(std::vector<double>{alpha, p, l, theta, static_cast<double>(s),
                                static_cast<double>(samples), r.fitted_c,
                                static_cast<double>(r.violations), static_cast<double>(r.skipped)});
  }
  const double spread = std::abs(cs[0] - cs[1]) / std::max(cs[0], cs[1]);
  const bool pass = violations == 0 && spread <= 0.1;
  return {"interpolation", pass, "interpolation_audit.csv",
          {{"violations", violations}, {"relative_spread", json_number(spread)}}};
}

AuditOutcome integrals_suite(const fs::path& dir) {
  bool finite = true;
  json sups = json::array();
  {
    auto out = open_csv(dir / "integral_bound_audit.csv");
    CsvWriter csv(out, {"alpha", "beta", "t", "ratio"});
    const std::vector<double> ts = {0.01, 0.1, 1.0, 10.0, 100.0};
    for (double alpha : {0.0, 0.25, 0.5, 0.75})
      for (double beta : {-1.0, 0.0, 1.0}) {
        const auto r = integral_bound_audit(alpha, beta, ts);
        finite = finite && r.all_finite;
        for (const auto& row : r.rows)
          csv.row(std::vector<double>{row.alpha, row.beta, row.t, row.integral_over_envelope});
        sups.push_back({{"alpha", alpha}, {"beta", beta}, {"sup_ratio", json_number(r.sup_ratio)}});
      }
  }
  double conv_sup = 0.0;
  {
    auto out = open_csv(dir / "convolution_bound_audit.csv");
    CsvWriter csv(out, {"nu", "mu", "tau", "z", "scaled"});
    const auto r = convolution_bound_audit({0.25, 0.5, 0.75, 1.0}, {0.25, 0.5, 0.75, 1.0},
                                           {0.1, 1.0, 10.0}, {0.1, 1.0, 10.0, 100.0});
    finite = finite && r.all_finite;
    conv_sup = r.sup_scaled;
    for (const auto& row : r.rows) csv.row(std::vector<double>{row.nu, row.mu, row.tau, row.z, row.scaled});
  }
  return {"integrals", finite, "integral_bound_audit.csv,convolution_bound_audit.csv",
          {{"envelope_suprema", sups}, {"convolution_sup", json_number(conv_sup)}}};
}

AuditOutcome bihari_suite(const fs::path& dir, std::uint64_t seed) {
  bool pass = true;
  double worst_quad = 0.0, worst_trip = 0.0;
  {
    auto out = open_csv(dir / "bihari_closed_form.csv");
    CsvWriter csv(out, {"y", "M", "l", "closed_form", "quadrature", "round_trip_error"});
    Rng rng(seed);
    for (int i = 0; i < 100; ++i) {
      const double M = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));
      const double y = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
      const double l = rng.uniform(1.01, 2.5);
      const double closed = g_m(y, M, l);
      const double quadv = g_m_quadrature(y, M, l);
      const double back = g_m_inverse(closed, M, l);
      const double trip = std::abs(back - y) / y;
      worst_quad = std::max(worst_quad, std::abs(closed - quadv));
      worst_trip = std::max(worst_trip, trip);
      csv.row(std::vector<double>{y, M, l, closed, quadv, trip});
    }
  }
  pass = worst_quad <= 1e-8 && worst_trip <= 1e-10;
  const auto dom = bihari_dominance_audit(100, seed);
  {
    auto out = open_csv(dir / "bihari_dominance.csv");
    CsvWriter csv(out, {"draw", "M", "l", "kernel", "t_end", "max_relative_excess", "violations"});
    for (const auto& r : dom.rows)
      csv.row(std::vector<std::string>{std::to_string(r.draw), format_double(r.M), format_double(r.l),
                                       r.kernel, format_double(r.t_end),
                                       format_double(r.max_relative_excess),
                                       std::to_string(r.violations)});
  }
  pass = pass && dom.violations == 0;
  return {"bihari", pass, "bihari_closed_form.csv,bihari_dominance.csv",
          {{"max_quadrature_gap", json_number(worst_quad)},
           {"max_round_trip_error", json_number(worst_trip)},
           {"dominance_violations", dom.violations}}};
}

}  // namespace

int run_audits(const std::string& suite, const fs::path& out_dir, std::uint64_t seed, std::ostream& log) {
  if (std::find(kAuditSuites.begin(), kAuditSuites.end(), suite) == kAuditSuites.end())
    throw std::invalid_argument("unknown audit suite '" + suite + "'");
  fs::create_directories(out_dir);
  const bool all = suite == "all";
  std::vector<AuditOutcome> results;
  if (all || suite == "semigroup") results.push_back(semigroup_suite(out_dir));
  if (all || suite == "interpolation") results.push_back(interpolation_suite(out_dir, seed));
  if (all || suite == "integrals") results.push_back(integrals_suite(out_dir));
  if (all || suite == "bihari") results.push_back(bihari_suite(out_dir, seed));

  bool pass = true;
  json audits = json::array();
  for (const auto& r : results) {
    pass = pass && r.pass;
    log << (r.pass ? "PASS " : "FAIL ") << r.name << " -> " << r.file << "\n";
    audits.push_back({{"name", r.name}, {"pass", r.pass}, {"files", r.file}, {"summary", r.summary}});
  }
  write_json(out_dir / "audit_summary.json",
             {{"report", "audit"}, {"suite", suite}, {"pass", pass}, {"audits", audits}});
  return pass ? kExitPass : kExitAssertion;
}

}  // namespace rdecay
