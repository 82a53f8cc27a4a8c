#include "rdecay/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rdecay {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json json_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::invalid_argument("CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].find_first_of(",\"\n\r") != std::string::npos)
      throw std::invalid_argument("CSV cell contains a separator: " + cells[i]);
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  CsvWriter csv(out, {kTrajectoryColumns.begin(), kTrajectoryColumns.end()});
  for (const auto& s : traj.samples) {
    const auto r = csv_row(s);
    csv.row(std::vector<double>(r.begin(), r.end()));
  }
}

namespace {

json lqstar_json(const LqStarNorm& n) {
  return {{"value", json_number(n.value)},
          {"finite_part", json_number(n.finite_part)},
          {"tail", json_number(n.tail)},
          {"converges", n.converges}};
}

json smallness_json(const SmallnessResult& s) {
  return {{"pass", s.pass}, {"margin", json_number(s.margin)}, {"rhs", json_number(s.rhs)}};
}

json assertions_json(const std::vector<AssertionResult>& assertions) {
  json arr = json::array();
  for (const auto& a : assertions)
    arr.push_back({{"name", a.name},
                   {"pass", a.pass},
                   {"value", json_number(a.value)},
                   {"requirement", a.requirement}});
  return arr;
}

json run_json(const Trajectory& traj) {
  json run = {{"completed", traj.completed()},
              {"steps", traj.steps},
              {"samples", traj.samples.size()},
              {"running_min", json_number(traj.running_min)},
              {"running_sup_v", json_number(traj.running_sup_v)}};
  if (traj.abort) {
    run["abort_time"] = json_number(traj.abort->time);
    run["abort_reason"] = traj.abort->reason;
  }
  return run;
}

}  // namespace

json hypotheses_json(const HypothesisReport& rep) {
  json conds = json::array();
  for (const auto& c : rep.conditions)
    conds.push_back({{"name", c.name},
                     {"pass", c.pass},
                     {"margin", json_number(c.margin)},
                     {"strict", c.strict},
                     {"detail", c.detail}});
  json lq = json::array();
  for (const auto& n : rep.lqstar) lq.push_back(lqstar_json(n));
  return {{"report", "hypotheses"},
          {"all_pass", rep.all_pass()},
          {"conditions", conds},
          {"q_star", json_number(rep.q_star)},
          {"q", json_number(rep.q)},
          {"comparison_constant",
           rep.comparison_constant ? json_number(*rep.comparison_constant) : json(nullptr)},
          {"lqstar", lq},
          {"lambda1", json_number(rep.lambda1)},
          {"l_lower", json_number(rep.l_lower)},
          {"l_upper", json_number(rep.l_upper)},
          {"c1", json_number(rep.c1)},
          {"c3", json_number(rep.c3)},
          {"c0", json_number(rep.c0)},
          {"h_integral", json_number(rep.h_integral)},
          {"smallness_literal", smallness_json(rep.smallness_literal)},
          {"smallness_derivation", smallness_json(rep.smallness_derivation)},
          {"decay_case", rep.decay_case}};
}

json decay_json(const DecayReport& rep, const Trajectory& traj,
                const std::vector<AssertionResult>& assertions) {
  json entries = json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"quantity", e.quantity},
                       {"fitted_rate", json_number(e.fit.rate)},
                       {"predicted_rate", json_number(e.predicted_rate)},
                       {"relative_deviation", json_number(e.relative_deviation)},
                       {"fit_residual", json_number(e.fit.residual)},
                       {"fit_samples", e.fit.samples},
                       {"window_start", json_number(e.fit.t_from)},
                       {"window_end", json_number(e.fit.t_to)}});
  return {{"report", "decay"},
          {"decay_case", rep.decay_case},
          {"lambda1", json_number(rep.lambda1)},
          {"predicted_uw", json_number(rep.predicted_uw)},
          {"predicted_v", json_number(rep.predicted_v)},
          {"entries", entries},
          {"run", run_json(traj)},
          {"assertions", assertions_json(assertions)}};
}

json aborted_run_json(const Trajectory& traj, const std::vector<AssertionResult>& assertions) {
  return {{"report", "decay"},
          {"entries", json::array()},
          {"run", run_json(traj)},
          {"assertions", assertions_json(assertions)}};
}

json v_infinity_json(const VInfinityEstimate& est, double mass_balance) {
  return {{"report", "v_infinity"},
          {"simulated", json_number(est.simulated)},
          {"integral_identity", json_number(est.integral_identity)},
          {"paper_formula", json_number(est.paper_formula)},
          {"gap_simulated_identity", json_number(est.gap_simulated_identity)},
          {"gap_simulated_paper", json_number(est.gap_simulated_paper)},
          {"gap_identity_paper", json_number(est.gap_identity_paper)},
          {"relative_gap", json_number(est.relative_gap)},
          {"mass_balance_residual", json_number(mass_balance)}};
}

void write_json(const std::filesystem::path& file, const json& doc) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << doc.dump(2) << '\n';
}

namespace {

bool parse_number(const std::string& cell) {
  if (cell == "nan" || cell == "inf" || cell == "-inf") return true;
  if (cell.empty()) return false;
  char* end = nullptr;
  std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Columns of audit tables that hold labels rather than numbers.
bool label_column(const std::string& name) { return name == "kernel" || name == "operator"; }

void validate_csv(const std::string& text, ValidationResult& res) {
  if (text.find('\r') != std::string::npos) res.problems.push_back("CR line endings");
  if (text.empty() || text.back() != '\n') res.problems.push_back("missing final LF");
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line.empty()) {
    res.problems.push_back("missing header");
    return;
  }
  const auto header = split(line);
  const bool trajectory = header.size() == kTrajectoryColumns.size() &&
                          std::equal(header.begin(), header.end(), kTrajectoryColumns.begin());
  res.kind = trajectory ? "trajectory" : "csv";
  std::size_t row = 1;
  double last_t = -std::numeric_limits<double>::infinity();
  while (std::getline(ss, line)) {
    ++row;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      res.problems.push_back("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()));
      continue;
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (!label_column(header[i]) && !parse_number(cells[i]))
        res.problems.push_back("row " + std::to_string(row) + " column " + header[i] +
                               ": not a number");
    if (trajectory && parse_number(cells[0])) {
      const double t = std::strtod(cells[0].c_str(), nullptr);
      if (!(t > last_t)) res.problems.push_back("row " + std::to_string(row) + ": time not increasing");
      last_t = t;
    }
  }
}

void require_keys(const json& doc, std::initializer_list<const char*> keys, ValidationResult& res) {
  for (const char* k : keys)
    if (!doc.contains(k)) res.problems.push_back(std::string("missing field '") + k + "'");
}

void validate_json(const std::string& text, ValidationResult& res) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    res.problems.push_back(std::string("malformed JSON: ") + e.what());
    return;
  }
  if (!doc.is_object() || !doc.contains("report") || !doc["report"].is_string()) {
    res.problems.push_back("missing 'report' kind");
    return;
  }
  res.kind = doc["report"].get<std::string>();
  if (res.kind == "hypotheses") {
    require_keys(doc, {"all_pass", "conditions", "q_star", "q", "c0", "h_integral", "decay_case"}, res);
    if (doc.contains("conditions")) {
      if (!doc["conditions"].is_array()) {
        res.problems.push_back("'conditions' is not an array");
      } else {
        for (const auto& c : doc["conditions"])
          if (!c.is_object() || !c.contains("name") || !c.contains("pass") || !c.contains("margin"))
            res.problems.push_back("condition without name, pass or margin");
      }
    }
  } else if (res.kind == "decay") {
    require_keys(doc, {"entries", "run", "assertions"}, res);
    if (doc.contains("entries") && doc["entries"].is_array())
      for (const auto& e : doc["entries"])
        if (!e.is_object() || !e.contains("quantity") || !e.contains("fitted_rate") ||
            !e.contains("predicted_rate"))
          res.problems.push_back("decay entry without quantity or rates");
  } else if (res.kind == "v_infinity") {
    require_keys(doc, {"simulated", "integral_identity", "paper_formula", "gap_simulated_identity",
                       "gap_simulated_paper", "gap_identity_paper", "relative_gap",
                       "mass_balance_residual"},
                 res);
  } else if (res.kind == "audit") {
    require_keys(doc, {"suite", "pass", "audits"}, res);
  } else {
    res.problems.push_back("unknown report kind '" + res.kind + "'");
  }
}

}  // namespace

ValidationResult validate_report(const std::filesystem::path& file) {
  ValidationResult res;
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    res.ok = false;
    res.problems.push_back("cannot read " + file.string());
    return res;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto ext = file.extension().string();
  if (ext == ".csv") {
    validate_csv(text, res);
  } else if (ext == ".json") {
    validate_json(text, res);
  } else {
    res.problems.push_back("unsupported extension '" + ext + "'");
  }
  res.ok = res.problems.empty();
  return res;
}

}  // namespace rdecay
