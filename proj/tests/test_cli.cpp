#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = fs::path(RDECAY_SOURCE_DIR) / "configs";

fs::path workdir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "rdecay_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// Runs the CLI with RD_DECAY_OUT cleared unless `env` sets it; returns the exit status.
int cli(const std::string& args, const std::string& env = "env -u RD_DECAY_OUT") {
  const auto log = workdir() / "last.log";
  const std::string cmd = env + " " + quote(RDECAY_CLI) + " " + args + " >" + quote(log) + " 2>&1";
  const int raw = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
}

std::string last_log() {
  std::ifstream in(workdir() / "last.log");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_config(const std::string& name, const json& doc) {
  const auto p = workdir() / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

json reference_doc() { return read_json(kConfigs / "reference.json"); }

}  // namespace

TEST_CASE("reference run passes and writes four valid reports") {
  const auto out = workdir() / "ref";
  CHECK(cli("run " + quote(kConfigs / "reference.json") + " --out " + quote(out)) == 0);
  for (const char* f : {"hypotheses.json", "trajectory.csv", "decay.json", "v_infinity.json"}) {
    INFO(f);
    REQUIRE(fs::exists(out / f));
    CHECK(cli("validate-report " + quote(out / f)) == 0);
  }
  const auto decay = read_json(out / "decay.json");
  for (const auto& a : decay["assertions"]) CHECK(a["pass"].get<bool>());
  CHECK(read_json(out / "hypotheses.json")["all_pass"].get<bool>());
}

TEST_CASE("failed assertions exit with status 2") {
  // Too short for a tail fit: the decay assertions cannot hold.
  const auto out = workdir() / "short";
  CHECK(cli("run " + quote(kConfigs / "reference.json") + " --t-end 2 --out " + quote(out)) == 2);
  const auto decay = read_json(out / "decay.json");
  CHECK(decay["run"]["completed"].get<bool>());
  bool any_failed = false;
  for (const auto& a : decay["assertions"]) any_failed |= !a["pass"].get<bool>();
  CHECK(any_failed);
}

TEST_CASE("configuration errors exit with status 1 and name the field") {
  auto doc = reference_doc();
  doc["system"]["alpha"] = 1.5;
  CHECK(cli("run " + quote(write_config("alpha.json", doc)) + " --out " + quote(workdir() / "alpha")) == 1);
  CHECK(last_log().find("system.alpha") != std::string::npos);

  doc = reference_doc();
  doc["solver"]["dtt"] = 0.1;
  CHECK(cli("check " + quote(write_config("typo.json", doc))) == 1);
  CHECK(last_log().find("solver.dtt") != std::string::npos);

  CHECK(cli("run " + quote(workdir() / "does_not_exist.json")) == 1);
  CHECK(cli("run " + quote(kConfigs / "reference.json") + " --dt -1") == 1);
  CHECK(cli("") == 1);
  CHECK(cli("frobnicate") == 1);
}

TEST_CASE("blow-up run exits with status 1 and records the abort time") {
  const auto out = workdir() / "blowup";
  CHECK(cli("run " + quote(kConfigs / "blowup.json") + " --out " + quote(out)) == 1);
  const auto decay = read_json(out / "decay.json");
  CHECK_FALSE(decay["run"]["completed"].get<bool>());
  CHECK(decay["run"]["abort_time"].get<double>() > 0.0);
  CHECK_FALSE(fs::exists(out / "v_infinity.json"));
  CHECK(cli("validate-report " + quote(out / "trajectory.csv")) == 0);
  CHECK(cli("validate-report " + quote(out / "decay.json")) == 0);
}

TEST_CASE("check subcommand") {
  const auto out = workdir() / "check";
  CHECK(cli("check " + quote(kConfigs / "reference.json") + " --out " + quote(out)) == 0);
  CHECK(cli("validate-report " + quote(out / "hypotheses.json")) == 0);
  auto doc = reference_doc();
  doc["system"]["alpha"] = 0.6;
  CHECK(cli("check " + quote(write_config("alpha06.json", doc)) + " --out " + quote(out)) == 2);
  CHECK(last_log().find("FAIL T2.one_minus_q_alpha") != std::string::npos);
}

TEST_CASE("audits") {
  const auto out = workdir() / "audits";
  CHECK(cli("audit bihari --out " + quote(out)) == 0);
  CHECK(fs::exists(out / "bihari_dominance.csv"));
  CHECK(cli("audit integrals --out " + quote(out)) == 0);
  for (const char* f : {"bihari_dominance.csv", "bihari_closed_form.csv", "integral_bound_audit.csv",
                        "convolution_bound_audit.csv", "audit_summary.json"}) {
    INFO(f);
    CHECK(cli("validate-report " + quote(out / f)) == 0);
  }
  CHECK(cli("audit nonsense --out " + quote(out)) == 1);
}

TEST_CASE("RD_DECAY_OUT overrides the output directory") {
  const auto env_dir = workdir() / "env";
  const auto flag_dir = workdir() / "flag";
  CHECK(cli("check " + quote(kConfigs / "reference.json") + " --out " + quote(flag_dir),
            "env RD_DECAY_OUT=" + quote(env_dir)) == 0);
  CHECK(fs::exists(env_dir / "hypotheses.json"));
  CHECK_FALSE(fs::exists(flag_dir));
}

TEST_CASE("identical configuration and seed give bit-identical CSV") {
  const auto a = workdir() / "det_a";
  const auto b = workdir() / "det_b";
  const auto c = workdir() / "det_c";
  const std::string cfg = quote(kConfigs / "rectangle.json") + " --t-end 1";
  REQUIRE(cli("run " + cfg + " --out " + quote(a)) == 0);
  REQUIRE(cli("run " + cfg + " --out " + quote(b)) == 0);
  REQUIRE(cli("run " + cfg + " --seed 12 --out " + quote(c)) == 0);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "trajectory.csv") != slurp(c / "trajectory.csv"));
}

TEST_CASE("validate-report rejects foreign files") {
  const auto bad = workdir() / "bad.csv";
  std::ofstream(bad) << "a,b\n1,x\n";
  CHECK(cli("validate-report " + quote(bad)) == 1);
  CHECK(cli("validate-report " + quote(workdir() / "absent.json")) == 1);
}
