#include "rdecay/hypotheses.hpp"
#include "rdecay/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rdecay;

namespace {

SystemParams reference_params() {
  SystemParams p;
  p.domain = DomainSpec::interval(std::numbers::pi, 128);
  for (auto& a : p.a) a = CoefficientSpec{0.0, ExponentialProfile{1.0}};
  return p;
}

CheckOptions reference_options() {
  CheckOptions o;
  o.u0_lp = 1.4;
  o.w0_lp = 0.7;
  o.initial_min = 0.25;
  o.initial_sup = 1.5;
  return o;
}

double margin(const HypothesisReport& r, const std::string& name) {
  const auto* e = r.find(name);
  REQUIRE(e != nullptr);
  return e->margin;
}

}  // namespace

TEST_CASE("smallness condition examples") {
  auto r = smallness_condition(1.0, 2.0, 0.5);
  CHECK(r.pass);
  CHECK(r.margin == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));
  CHECK(smallness_condition(1.0, 2.0, 0.5, SmallnessVariant::literal).margin == doctest::Approx(r.margin));
  r = smallness_condition(1.0, 2.0, 1.0);
  CHECK_FALSE(r.pass);
  CHECK(r.margin == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-12));
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const double c0 = std::exp(rng.uniform(-5.0, 5.0)), l = rng.uniform(1.01, 4.0);
    CHECK(smallness_condition(c0, l, 0.0).pass);
  }
  // Variants differ away from C0 = 1.
  CHECK(smallness_condition(4.0, 2.0, 0.0, SmallnessVariant::literal).rhs == doctest::Approx(std::log(5.0 / 4.0)));
  CHECK(smallness_condition(4.0, 3.0, 0.0, SmallnessVariant::literal).rhs == doctest::Approx(std::log(17.0 / 4.0)));
  CHECK(smallness_condition(4.0, 3.0, 0.0, SmallnessVariant::derivation).rhs == doctest::Approx(std::log(17.0 / 16.0)));
  CHECK_THROWS_AS(smallness_condition(0.0, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("growth condition audit") {
  const auto zero = growth_condition_audit(ConstantProfile{0.0}, 1.0, 0.5, 2.0, 20.0);
  CHECK(zero.pass);
  CHECK(zero.sup_ratio == 0.0);

  // Constant h, rho~ < rho: e^{-q rho~ t} (e^{q rho t} - 1) / (q rho) grows.
  const auto grow = growth_condition_audit(ConstantProfile{1.0}, 1.0, 0.5, 2.0, 20.0);
  CHECK_FALSE(grow.pass);

  // Exponential h with beta > rho: the scaled integral against the closed form
  // (e^{q (rho - beta) t} - 1) / (q (rho - beta)) e^{-q rho~ t}.
  const double q = 2.0, rho = 0.5, beta = 1.0, rt = 0.2;
  const auto ok = growth_condition_audit(ExponentialProfile{beta}, rho, rt, q, 20.0, 400);
  CHECK(ok.pass);
  for (std::size_t i = 0; i < ok.times.size(); i += 37) {
    const double t = ok.times[i];
    const double closed = (std::exp(q * (rho - beta) * t) - 1.0) / (q * (rho - beta)) * std::exp(-q * rt * t);
    CHECK(std::exp(ok.log_ratios[i]) == doctest::Approx(closed).epsilon(1e-9));
  }

  // Huge exponents saturate instead of overflowing.
  const auto sat = growth_condition_audit(ConstantProfile{1.0}, 400.0, 0.0, 2.0, 10.0);
  CHECK(sat.saturated);
  CHECK_FALSE(sat.pass);
}

TEST_CASE("reference configuration passes every condition") {
  const auto rep = check_hypotheses(reference_params(), reference_options());
  for (const auto& c : rep.conditions) {
    INFO(c.name);
    CHECK(c.pass);
  }
  CHECK(rep.all_pass());
  CHECK(margin(rep, "T2.one_minus_q_alpha") == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(margin(rep, "T2.sigma_1") == doctest::Approx(0.196).epsilon(1e-12));
  CHECK(margin(rep, "H.two_alpha_gt_N_over_p") == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(rep.l_lower == 1.0);
  CHECK(rep.l_upper == doctest::Approx(1.01));
  CHECK(rep.decay_case == "b_i");
  CHECK(rep.comparison_constant.value() == doctest::Approx(1.0));
  CHECK(rep.lqstar[0].value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(rep.h_integral == doctest::Approx(0.5).epsilon(1e-9));
  // Names are unique.
  for (std::size_t i = 0; i < rep.conditions.size(); ++i)
    for (std::size_t j = i + 1; j < rep.conditions.size(); ++j) CHECK(rep.conditions[i].name != rep.conditions[j].name);
}

TEST_CASE("listed inequalities for l = 1.2") {
  auto p = reference_params();
  p.l = 1.2;
  const auto rep = check_hypotheses(p, reference_options());
  CHECK(margin(rep, "T2.one_minus_q_alpha") == doctest::Approx(0.2));
  CHECK(margin(rep, "T2.sigma_2") == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(margin(rep, "H.two_alpha_gt_N_over_p") == doctest::Approx(0.55));
  // l above min{m, n}.
  CHECK_FALSE(rep.find("T3.l_in_interval")->pass);
}

TEST_CASE("alpha = 0.6 fails 1 - q alpha") {
  auto p = reference_params();
  p.alpha = 0.6;
  const auto rep = check_hypotheses(p, reference_options());
  CHECK(rep.q == doctest::Approx(1.75));
  const auto* e = rep.find("T2.one_minus_q_alpha");
  CHECK_FALSE(e->pass);
  CHECK(e->margin == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("comparison constant") {
  auto p = reference_params();
  p.a[0].profile = ConstantProfile{2.0};
  p.a[2].profile = ConstantProfile{1.0};
  auto rep = check_hypotheses(p, reference_options());
  CHECK(rep.comparison_constant.value() == doctest::Approx(2.0));
  CHECK(rep.find("T2.comparison_a1_le_C_a3")->pass);

  p.a[2].profile = BumpProfile{2.0, 1.0, 1.0};
  p.a[0].profile = ExponentialProfile{1.0};
  rep = check_hypotheses(p, reference_options());
  CHECK_FALSE(rep.comparison_constant.has_value());
  CHECK_FALSE(rep.find("T2.comparison_a1_le_C_a3")->pass);
}

TEST_CASE("integrability and case (b)(ii) entries") {
  auto p = reference_params();
  p.a[1].profile = PowerProfile{0.3};
  auto rep = check_hypotheses(p, reference_options());
  CHECK_FALSE(rep.find("T2.h2_in_Lqstar")->pass);
  CHECK(margin(rep, "T2.h2_in_Lqstar") == doctest::Approx(0.3 - 0.5));

  // d2 lambda = 4 >= l b puts the run in case (b)(ii); rho, rho~ are required.
  p = reference_params();
  p.d[1] = 4.0;
  rep = check_hypotheses(p, reference_options());
  CHECK(rep.decay_case == "b_ii");
  CHECK_FALSE(rep.find("T3.rho_lower")->pass);
  auto opts = reference_options();
  opts.rho = 4.0 - 1.005 * 0.9 + 0.1;
  opts.rho_tilde = 3.5;
  rep = check_hypotheses(p, opts);
  CHECK(rep.find("T3.rho_lower")->pass);
  CHECK(rep.find("T3.rho_tilde_upper")->pass);
  CHECK(rep.find("T3.growth_h1") != nullptr);
}

TEST_CASE("GE conditions are closed inequalities") {
  auto p = reference_params();
  p.m = 2.1;  // 2 + eps exactly
  auto rep = check_hypotheses(p, reference_options());
  CHECK(rep.find("GE1.m_range")->pass);
  CHECK_FALSE(rep.find("GE1.m_range")->strict);
  auto o = reference_options();
  o.initial_min = -0.1;
  rep = check_hypotheses(reference_params(), o);
  CHECK_FALSE(rep.find("GE2.nonnegative_initial")->pass);
}

TEST_CASE("property: margins are consistent with pass flags and continuous") {
  Rng rng(21);
  for (int i = 0; i < 30; ++i) {
    auto p = reference_params();
    p.domain = DomainSpec::interval(std::numbers::pi, 32);
    p.alpha = rng.uniform(0.3, 0.9);
    p.p = rng.uniform(2.0, 6.0);
    p.m = rng.uniform(1.1, 2.5);
    p.n = p.k = rng.uniform(1.0, 1.2);
    p.l = rng.uniform(1.0001, 1.5);
    const auto opts = reference_options();
    const auto rep = check_hypotheses(p, opts);
    for (const auto& c : rep.conditions) CHECK(c.pass == (c.strict ? c.margin > 0.0 : c.margin >= 0.0));

    // Move towards the boundary by less than half the margin: the flag holds.
    const double m0 = margin(rep, "T2.one_minus_q_alpha");
    if (p.alpha < 0.45) {
      auto p2 = p;
      p2.alpha += 0.49 * m0 / rep.q;  // q = 2 is locally constant here
      const auto rep2 = check_hypotheses(p2, opts);
      CHECK(rep2.find("T2.one_minus_q_alpha")->pass == rep.find("T2.one_minus_q_alpha")->pass);
    }
    const double mh = margin(rep, "H.two_alpha_gt_N_over_p");
    const double shifted = 1.0 / p.p + 0.49 * mh;  // new N / p
    if (shifted > 0.0 && shifted < 1.0) {
      auto p3 = p;
      p3.p = 1.0 / shifted;
      const auto rep3 = check_hypotheses(p3, opts);
      CHECK(rep3.find("H.two_alpha_gt_N_over_p")->pass == rep.find("H.two_alpha_gt_N_over_p")->pass);
    }
  }
}

TEST_CASE("initial bound constant") {
  CHECK(initial_bound_constant(2.0, 0.4, 1.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(3.0 + 5.0));
  CHECK(initial_bound_constant(2.0, 0.5, 4.0, 2.0, 0.0, 1.0, 1.0) == doctest::Approx(3.0 * 1.0));
}
