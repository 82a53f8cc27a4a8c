#include "rdecay/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
};

rdecay::Scenario load_with_overrides(const std::string& path, const Overrides& o) {
  rdecay::Scenario sc = rdecay::load_scenario(path);
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw rdecay::ConfigError("--dt", "must be positive");
    sc.solver.dt = *o.dt;
  }
  if (o.t_end) {
    if (!(*o.t_end > 0.0)) throw rdecay::ConfigError("--t-end", "must be positive");
    sc.solver.t_end = *o.t_end;
  }
  if (o.seed) sc.seed = *o.seed;
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion decay verification: scenario runs, hypothesis checks and audits"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  std::string out_override;

  auto* run = app.add_subcommand("run", "Check hypotheses, integrate and write reports");
  run->add_option("config", config_path, "Scenario JSON file")->required();

  auto* check = app.add_subcommand("check", "Run the hypothesis checker only");
  check->add_option("config", config_path, "Scenario JSON file")->required();

  for (auto* sub : {run, check}) {
    sub->add_option("--dt", ov.dt, "Override solver.dt");
    sub->add_option("--t-end", ov.t_end, "Override solver.t_end");
    sub->add_option("--seed", ov.seed, "Override the scenario seed");
    sub->add_option("--out", out_override, "Output directory (RD_DECAY_OUT takes precedence)");
  }

  std::string suite;
  std::uint64_t audit_seed = 1;
  std::string audit_out = "out/audits";
  auto* audit = app.add_subcommand("audit", "Run an audit suite and write CSV tables");
  audit->add_option("suite", suite, "semigroup, interpolation, integrals, bihari or all")->required();
  audit->add_option("--out", audit_out, "Output directory (RD_DECAY_OUT takes precedence)");
  audit->add_option("--seed", audit_seed, "Seed for randomized audits");

  std::string report_path;
  auto* validate = app.add_subcommand("validate-report", "Re-parse a report file written by this tool");
  validate->add_option("file", report_path, "CSV or JSON report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rdecay::kExitAbort;
  }

  try {
    if (*run || *check) {
      const rdecay::Scenario sc = load_with_overrides(config_path, ov);
      const auto out_dir =
          rdecay::resolve_output_dir(out_override.empty() ? sc.output_dir : out_override);
      if (*check) {
        const auto domain = rdecay::make_domain(sc.params.domain);
        const auto initial = rdecay::make_initial_state(sc.initial, domain, sc.seed);
        const auto rep = rdecay::check_hypotheses(sc.params, rdecay::check_options(sc, initial));
        std::filesystem::create_directories(out_dir);
        rdecay::write_json(out_dir / "hypotheses.json", rdecay::hypotheses_json(rep));
        for (const auto& c : rep.conditions)
          std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                    << " margin=" << rdecay::format_double(c.margin) << "\n";
        return rep.all_pass() ? rdecay::kExitPass : rdecay::kExitAssertion;
      }
      const auto outcome = rdecay::run_scenario(sc, out_dir, std::cout);
      std::cout << "status " << outcome.status << "\n";
      return outcome.status;
    }
    if (*audit) {
      if (std::find(rdecay::kAuditSuites.begin(), rdecay::kAuditSuites.end(), suite) ==
          rdecay::kAuditSuites.end()) {
        std::cerr << "unknown audit suite '" << suite
                  << "' (expected semigroup, interpolation, integrals, bihari or all)\n";
        return rdecay::kExitAbort;
      }
      return rdecay::run_audits(suite, rdecay::resolve_output_dir(audit_out), audit_seed, std::cout);
    }
    if (*validate) {
      const auto res = rdecay::validate_report(report_path);
      for (const auto& p : res.problems) std::cerr << report_path << ": " << p << "\n";
      std::cout << (res.ok ? "valid " : "invalid ") << res.kind << "\n";
      return res.ok ? rdecay::kExitPass : rdecay::kExitAbort;
    }
  } catch (const rdecay::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rdecay::kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rdecay::kExitAbort;
  }
  return rdecay::kExitAbort;
}
