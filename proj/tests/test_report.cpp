#include "rdecay/report.hpp"
#include "rdecay/random.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

using namespace rdecay;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rdecay_test_report";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::filesystem::path write_text(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

Trajectory short_run() {
  SystemParams p;
  p.domain = DomainSpec::interval(std::numbers::pi, 16);
  for (auto& a : p.a) a = CoefficientSpec{0.0, ExponentialProfile{1.0}};
  const auto d = make_domain(p.domain);
  const auto one = GridField::constant(d, 1.0);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.sample_stride = 10;
  return integrate(State{0.0, one, one, one}, p, cfg);
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(json_number(std::nan("")).is_null());
  CHECK(json_number(1.5).get<double>() == 1.5);

  Rng rng(71);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.integer(-300, 300)));
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("CSV writer") {
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b"});
  csv.row(std::vector<double>{1.0, 0.5});
  csv.row(std::vector<std::string>{"x", "2"});
  CHECK(out.str() == "a,b\n1,0.5\nx,2\n");
  CHECK_THROWS_AS(csv.row(std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(csv.row(std::vector<std::string>{"1,2", "3"}), std::invalid_argument);
}

TEST_CASE("trajectory CSV validates") {
  const auto traj = short_run();
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  const auto file = write_text("trajectory.csv", out.str());
  const auto res = validate_report(file);
  CHECK(res.ok);
  CHECK(res.kind == "trajectory");
  std::istringstream lines(out.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == static_cast<int>(traj.samples.size()) + 1);
}

TEST_CASE("malformed CSV is rejected") {
  CHECK_FALSE(validate_report(write_text("crlf.csv", "a,b\r\n1,2\r\n")).ok);
  CHECK_FALSE(validate_report(write_text("ragged.csv", "a,b\n1,2\n3\n")).ok);
  CHECK_FALSE(validate_report(write_text("text.csv", "a,b\n1,hello\n")).ok);
  CHECK_FALSE(validate_report(write_text("nolf.csv", "a,b\n1,2")).ok);
  CHECK(validate_report(write_text("label.csv", "kernel,x\nbump,2\n")).ok);
  std::string header;
  for (std::size_t i = 0; i < kTrajectoryColumns.size(); ++i) header += (i ? "," : "") + std::string(kTrajectoryColumns[i]);
  auto numeric_row = [](const char* t) {
    std::string r = t;
    for (int i = 1; i < 17; ++i) r += ",0";
    return r;
  };
  CHECK(validate_report(write_text("order_ok.csv", header + "\n" + numeric_row("0.5") + "\n" + numeric_row("1") + "\n")).ok);
  CHECK_FALSE(validate_report(write_text("order.csv", header + "\n" + numeric_row("1") + "\n" + numeric_row("0.5") + "\n")).ok);
  CHECK_FALSE(validate_report(scratch("absent.csv")).ok);
  CHECK_FALSE(validate_report(write_text("x.txt", "")).ok);
}

TEST_CASE("JSON reports validate") {
  const auto traj = short_run();
  SystemParams p;
  p.domain = DomainSpec::interval(std::numbers::pi, 16);
  for (auto& a : p.a) a = CoefficientSpec{0.0, ExponentialProfile{1.0}};
  const auto est = v_infinity(traj, p);
  auto file = scratch("v.json");
  write_json(file, v_infinity_json(est, 1e-9));
  CHECK(validate_report(file).ok);
  CHECK(validate_report(file).kind == "v_infinity");

  DecayReport rep;
  rep.entries.push_back({"sup_u", {}, 0.9, std::nan("")});
  file = scratch("decay.json");
  write_json(file, decay_json(rep, traj, {{"no_blowup", true, 1.0, "integrates to t_end"}}));
  CHECK(validate_report(file).ok);
  file = scratch("aborted.json");
  write_json(file, aborted_run_json(traj, {}));
  CHECK(validate_report(file).ok);

  CHECK_FALSE(validate_report(write_text("bad.json", "{\"report\": \"v_infinity\"}")).ok);
  CHECK_FALSE(validate_report(write_text("kind.json", "{\"report\": \"other\"}")).ok);
  CHECK_FALSE(validate_report(write_text("broken.json", "{")).ok);
  CHECK_FALSE(validate_report(write_text("nokind.json", "[]")).ok);
}
