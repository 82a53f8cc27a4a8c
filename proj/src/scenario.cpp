#include "rdecay/scenario.hpp"

#include "rdecay/norms.hpp"
#include "rdecay/random.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace rdecay {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Object view that records which keys were read so that leftovers can be
// rejected as unknown.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(join(path_, key), "missing required field");
    return j_.at(key);
  }

  Node child(const std::string& key) { return Node(raw(key), join(path_, key)); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(join(path_, key), "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || j_.at(key).is_null()) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key);
  }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(join(path_, key), "expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

DomainSpec parse_domain(Node node) {
  const auto lengths = node.numbers("lengths");
  const auto grid = node.numbers("grid");
  node.finish();
  const std::string p = node.path();
  require(lengths.size() == 1 || lengths.size() == 2, join(p, "lengths"), "expected 1 or 2 entries");
  require(grid.size() == lengths.size(), join(p, "grid"), "must have as many entries as lengths");
  for (double x : lengths) require(x > 0.0 && std::isfinite(x), join(p, "lengths"), "must be positive");
  std::vector<int> k;
  for (double g : grid) {
    require(g == std::floor(g) && g >= 4 && g <= kDefaultNodeCap, join(p, "grid"),
            "entries must be integers >= 4");
    k.push_back(static_cast<int>(g));
  }
  DomainSpec spec = lengths.size() == 1 ? DomainSpec::interval(lengths[0], k[0])
                                        : DomainSpec::rectangle(lengths[0], lengths[1], k[0], k[1]);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(p, e.what());
  }
  return spec;
}

HProfile parse_profile(Node node) {
  const std::string kind = node.string("kind");
  HProfile h;
  if (kind == "constant") {
    h = ConstantProfile{node.number("value")};
  } else if (kind == "exponential") {
    h = ExponentialProfile{node.number("rate")};
  } else if (kind == "power") {
    h = PowerProfile{node.number("exponent")};
  } else if (kind == "bump") {
    h = BumpProfile{node.number("center"), node.number("width"), node.number("height")};
  } else if (kind == "tabulated") {
    h = TabulatedProfile{node.numbers("times"), node.numbers("values")};
  } else {
    throw ConfigError(join(node.path(), "kind"),
                      "unknown profile '" + kind + "' (constant, exponential, power, bump, tabulated)");
  }
  node.finish();
  try {
    validate(h);
  } catch (const std::exception& e) {
    throw ConfigError(node.path(), e.what());
  }
  return h;
}

ModeIndex parse_mode(const std::vector<double>& raw, const std::string& path) {
  require(raw.size() == 1 || raw.size() == 2, path, "expected 1 or 2 entries");
  ModeIndex m{0, 0};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    require(raw[i] >= 0 && raw[i] == std::floor(raw[i]), path, "mode indices must be integers >= 0");
    m[i] = static_cast<int>(raw[i]);
  }
  return m;
}

SystemParams parse_system(Node node, const DomainSpec& domain) {
  SystemParams sp;
  sp.domain = domain;
  const std::string p = node.path();
  const auto d = node.numbers("d");
  require(d.size() == 3, join(p, "d"), "expected 3 entries");
  for (int i = 0; i < 3; ++i) {
    require(d[static_cast<std::size_t>(i)] > 0.0, join(p, "d"), "diffusion coefficients must be positive");
    sp.d[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)];
  }
  sp.b = node.number("b");
  require(sp.b >= 0.0, join(p, "b"), "must be >= 0");
  sp.m = node.number("m");
  sp.n = node.number("n");
  sp.k = node.number("k");
  require(sp.m >= 0.0, join(p, "m"), "must be >= 0");
  require(sp.n >= 0.0, join(p, "n"), "must be >= 0");
  require(sp.k >= 0.0, join(p, "k"), "must be >= 0");

  const json& coeffs = node.raw("coefficients");
  const std::string cpath = join(p, "coefficients");
  require(coeffs.is_array() && coeffs.size() == 4, cpath, "expected an array of 4 coefficients");
  for (std::size_t i = 0; i < 4; ++i) {
    Node c(coeffs[i], cpath + "[" + std::to_string(i) + "]");
    CoefficientSpec spec;
    spec.sigma = c.number("sigma", 0.0);
    require(spec.sigma >= 0.0, join(c.path(), "sigma"), "must be >= 0");
    require(i != 3 || spec.sigma == 0.0, join(c.path(), "sigma"), "sigma of a4 must be 0");
    spec.profile = parse_profile(c.child("profile"));
    c.finish();
    sp.a[i] = spec;
  }

  sp.alpha = node.number("alpha");
  require(sp.alpha > 0.0 && sp.alpha < 1.0, join(p, "alpha"), "must lie in (0, 1)");
  sp.p = node.number("p");
  require(sp.p > 1.0, join(p, "p"), "must exceed 1");
  sp.l = node.number("l");
  require(sp.l > 1.0, join(p, "l"), "must exceed 1");
  sp.epsilon = node.number("epsilon");
  require(sp.epsilon > 0.0, join(p, "epsilon"), "must be positive");
  sp.mu = node.number("mu");
  require(sp.mu >= 0.0 && sp.mu < 2.0, join(p, "mu"), "must lie in [0, 2)");
  node.finish();
  try {
    sp.validate();
  } catch (const std::exception& e) {
    throw ConfigError(p, e.what());
  }
  return sp;
}

SolverConfig parse_solver(Node node) {
  SolverConfig c;
  const std::string p = node.path();
  const std::string scheme = node.string("scheme", "strang");
  if (scheme == "strang") {
    c.scheme = Scheme::strang;
  } else if (scheme == "lie") {
    c.scheme = Scheme::lie;
  } else {
    throw ConfigError(join(p, "scheme"), "expected 'lie' or 'strang'");
  }
  c.dt = node.number("dt", c.dt);
  require(c.dt > 0.0, join(p, "dt"), "must be positive");
  c.t_end = node.number("t_end", c.t_end);
  require(c.t_end > 0.0, join(p, "t_end"), "must be positive");
  const long long stride = node.integer("sample_stride", c.sample_stride);
  require(stride >= 1 && stride <= 1000000000, join(p, "sample_stride"), "must be a positive integer");
  c.sample_stride = static_cast<int>(stride);
  c.blowup_threshold = node.number("blowup_threshold", c.blowup_threshold);
  require(c.blowup_threshold > 0.0, join(p, "blowup_threshold"), "must be positive");
  c.negativity_tolerance = node.number("negativity_tolerance", c.negativity_tolerance);
  require(c.negativity_tolerance >= 0.0, join(p, "negativity_tolerance"), "must be >= 0");
  node.finish();
  return c;
}

InitialField parse_initial_field(Node node) {
  const std::string kind = node.string("kind");
  InitialField f;
  if (kind == "constant") {
    f = ConstantInit{node.number("value")};
  } else if (kind == "cosine_bump") {
    CosineInit c;
    c.base = node.number("base");
    c.amplitude = node.number("amplitude");
    c.mode = parse_mode(node.numbers("mode"), join(node.path(), "mode"));
    f = c;
  } else if (kind == "random") {
    RandomInit r;
    r.base = node.number("base");
    r.amplitude = node.number("amplitude");
    const long long modes = node.integer("modes", r.modes);
    require(modes >= 1 && modes <= 4096, join(node.path(), "modes"), "must lie in [1, 4096]");
    r.modes = static_cast<int>(modes);
    f = r;
  } else {
    throw ConfigError(join(node.path(), "kind"),
                      "unknown initial data '" + kind + "' (constant, cosine_bump, random)");
  }
  node.finish();
  return f;
}

InitialData parse_initial(Node node, const DomainSpec& domain) {
  InitialData init;
  const char* names[3] = {"u", "v", "w"};
  for (std::size_t c = 0; c < 3; ++c) {
    init.fields[c] = parse_initial_field(node.child(names[c]));
    if (const auto* cos = std::get_if<CosineInit>(&init.fields[c])) {
      const std::string mp = join(join(node.path(), names[c]), "mode");
      require(cos->mode[0] < domain.grid_sizes[0], mp, "mode exceeds the grid");
      require(domain.dimension == 2 ? cos->mode[1] < domain.grid_sizes[1] : cos->mode[1] == 0, mp,
              "mode exceeds the grid");
    }
  }
  node.finish();
  return init;
}

ExactSolution parse_manufactured(Node node, const DomainSpec& domain) {
  ExactSolution ex;
  const char* names[3] = {"u", "v", "w"};
  for (std::size_t c = 0; c < 3; ++c) {
    const json& terms = node.raw(names[c]);
    const std::string tp = join(node.path(), names[c]);
    require(terms.is_array(), tp, "expected an array of terms");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Node t(terms[i], tp + "[" + std::to_string(i) + "]");
      ExactTerm term;
      term.amplitude = t.number("amplitude");
      term.rate = t.number("rate");
      term.mode = parse_mode(t.numbers("mode"), join(t.path(), "mode"));
      require(term.mode[0] < domain.grid_sizes[0], join(t.path(), "mode"), "mode exceeds the grid");
      require(domain.dimension == 2 ? term.mode[1] < domain.grid_sizes[1] : term.mode[1] == 0,
              join(t.path(), "mode"), "mode exceeds the grid");
      t.finish();
      ex.components[c].push_back(term);
    }
  }
  node.finish();
  return ex;
}

AnalysisOptions parse_analysis(Node node) {
  AnalysisOptions a;
  const std::string p = node.path();
  a.fit_window = node.number("fit_window", a.fit_window);
  require(a.fit_window > 0.0 && a.fit_window <= 1.0, join(p, "fit_window"), "must lie in (0, 1]");
  a.fit_t_min = node.number("fit_t_min", a.fit_t_min);
  a.rho = node.optional_number("rho");
  a.rho_tilde = node.optional_number("rho_tilde");
  a.delta = node.number("delta", a.delta);
  require(a.delta > 0.0, join(p, "delta"), "must be positive");
  if (node.has("h_weights")) {
    const auto w = node.numbers("h_weights");
    require(w.size() == 4, join(p, "h_weights"), "expected 4 entries");
    for (std::size_t i = 0; i < 4; ++i) {
      require(w[i] >= 0.0, join(p, "h_weights"), "weights must be >= 0");
      a.h_weights[i] = w[i];
    }
  }
  a.semigroup_slack = node.number("semigroup_slack", a.semigroup_slack);
  require(a.semigroup_slack > 0.0 && a.semigroup_slack < 1.0, join(p, "semigroup_slack"),
          "must lie in (0, 1)");
  a.horizon = node.number("horizon", a.horizon);
  require(a.horizon > 0.0, join(p, "horizon"), "must be positive");
  const std::string variant = node.string("smallness_variant", "derivation");
  if (variant == "derivation") {
    a.smallness_variant = SmallnessVariant::derivation;
  } else if (variant == "literal") {
    a.smallness_variant = SmallnessVariant::literal;
  } else {
    throw ConfigError(join(p, "smallness_variant"), "expected 'literal' or 'derivation'");
  }
  node.finish();
  return a;
}

Assertions parse_assertions(Node node) {
  Assertions a;
  const std::string p = node.path();
  a.no_blowup = node.boolean("no_blowup", false);
  a.min_floor = node.optional_number("min_floor");
  a.hypotheses = node.boolean("hypotheses", false);
  a.decay_tolerance = node.optional_number("decay_tolerance");
  a.v_infinity_tolerance = node.optional_number("v_infinity_tolerance");
  a.mass_balance_tolerance = node.optional_number("mass_balance_tolerance");
  for (const auto& [key, v] : {std::pair{"decay_tolerance", a.decay_tolerance},
                               std::pair{"v_infinity_tolerance", a.v_infinity_tolerance},
                               std::pair{"mass_balance_tolerance", a.mass_balance_tolerance}})
    require(!v || *v > 0.0, join(p, key), "must be positive");
  node.finish();
  return a;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  Node root(doc, "");
  Scenario sc;
  sc.name = root.string("name", sc.name);
  const long long seed = root.integer("seed", 0);
  require(seed >= 0, "seed", "must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.output_dir = root.string("output_dir", "out/" + sc.name);
  const DomainSpec domain = parse_domain(root.child("domain"));
  sc.params = parse_system(root.child("system"), domain);
  sc.solver = root.has("solver") ? parse_solver(root.child("solver")) : SolverConfig{};
  sc.initial = parse_initial(root.child("initial"), domain);
  if (root.has("manufactured")) sc.manufactured = parse_manufactured(root.child("manufactured"), domain);
  if (root.has("analysis")) sc.analysis = parse_analysis(root.child("analysis"));
  if (root.has("assertions")) sc.assertions = parse_assertions(root.child("assertions"));
  root.finish();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

Scenario reference_scenario() {
  Scenario sc;
  sc.name = "reference";
  sc.seed = 7;
  sc.output_dir = "out/reference";
  sc.params.domain = DomainSpec::interval(std::numbers::pi, 128);
  sc.params.d = {1.0, 1.0, 1.0};
  sc.params.b = 1.0;
  sc.params.m = 1.5;
  sc.params.n = 1.01;
  sc.params.k = 1.01;
  for (auto& a : sc.params.a) a = CoefficientSpec{0.0, ExponentialProfile{1.0}};
  sc.params.alpha = 0.4;
  sc.params.p = 4.0;
  sc.params.l = 1.005;
  sc.params.epsilon = 0.1;
  sc.params.mu = 0.5;
  sc.solver.scheme = Scheme::strang;
  sc.solver.dt = 1e-3;
  sc.solver.t_end = 20.0;
  sc.solver.sample_stride = 100;
  sc.initial.fields = {CosineInit{1.0, 0.5, {1, 0}}, CosineInit{1.0, 0.5, {1, 0}},
                       CosineInit{0.5, 0.25, {2, 0}}};
  sc.assertions.no_blowup = true;
  sc.assertions.min_floor = -1e-8;
  sc.assertions.hypotheses = true;
  sc.assertions.decay_tolerance = 0.15;
  sc.assertions.v_infinity_tolerance = 1e-3;
  sc.assertions.mass_balance_tolerance = 1e-4;
  return sc;
}

State make_initial_state(const InitialData& init, const std::shared_ptr<const Domain>& domain,
                         std::uint64_t seed) {
  Rng seeds(seed);
  State s = State::zeros(domain);
  GridField* out[3] = {&s.u, &s.v, &s.w};
  for (std::size_t c = 0; c < 3; ++c) {
    const std::uint64_t component_seed = seeds.bits();
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ConstantInit>) {
            *out[c] = GridField::constant(domain, f.value);
          } else if constexpr (std::is_same_v<T, CosineInit>) {
            SpectralField coef{domain, VectorX<double>::Zero(domain->node_count())};
            coef[f.mode] = f.amplitude;
            GridField g = to_grid(coef);
            g.values.array() += f.base;
            *out[c] = g;
          } else {
            GridField g = random_band_limited(domain, f.modes, component_seed, false);
            const double peak = g.values.cwiseAbs().maxCoeff();
            if (peak > 0.0) g.values /= peak;
            g.values = (f.base + f.amplitude * g.values.array()).max(0.0).matrix();
            *out[c] = g;
          }
        },
        init.fields[c]);
  }
  return s;
}

CheckOptions check_options(const Scenario& sc, const State& initial) {
  CheckOptions o;
  o.u0_lp = lp_norm(initial.u, sc.params.p);
  o.w0_lp = lp_norm(initial.w, sc.params.p);
  o.initial_min = std::min({initial.u.values.minCoeff(), initial.v.values.minCoeff(),
                            initial.w.values.minCoeff()});
  o.initial_sup = std::max({initial.u.values.maxCoeff(), initial.v.values.maxCoeff(),
                            initial.w.values.maxCoeff()});
  o.delta = sc.analysis.delta;
  o.h_weights = sc.analysis.h_weights;
  o.semigroup_slack = sc.analysis.semigroup_slack;
  o.horizon = sc.analysis.horizon;
  o.variant = sc.analysis.smallness_variant;
  o.rho = sc.analysis.rho;
  o.rho_tilde = sc.analysis.rho_tilde;
  return o;
}

}  // namespace rdecay
