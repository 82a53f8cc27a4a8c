#include "rdecay/norms.hpp"
#include "rdecay/quadrature.hpp"
#include "rdecay/random.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace rdecay;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

GridField random_field(const std::shared_ptr<const Domain>& d, Rng& rng) {
  VectorX<double> v(d->node_count());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-2.0, 2.0);
  return {d, v};
}

// sup over pairs of a fine uniform grid including the endpoints.
double brute_force_seminorm(double (*f)(double), double a, double b, int n, double theta) {
  std::vector<double> x(n), fx(n);
  for (int i = 0; i < n; ++i) {
    x[i] = a + (b - a) * i / (n - 1);
    fx[i] = f(x[i]);
  }
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) best = std::max(best, std::abs(fx[i] - fx[j]) / std::pow(x[j] - x[i], theta));
  return best;
}

double cosine(double x) { return std::cos(x); }

}  // namespace

TEST_CASE("L^p norm examples") {
  const auto d = make_domain(DomainSpec::interval(kPi, 64));
  CHECK(lp_norm(GridField::constant(d, 2.0), 2.0) == doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-14));
  const auto c = GridField::sample(d, [](double x) { return std::cos(x); });
  const double exact = std::sqrt(quad::checked(quad::integrate([](double x) { return std::cos(x) * std::cos(x); }, 0.0, kPi)));
  CHECK(exact == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-13));
  CHECK(lp_norm(c, 2.0) == doctest::Approx(exact).epsilon(1e-13));
  CHECK(lp_norm(c, kInf) == c.values.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(lp_norm(c, 0.5), std::invalid_argument);
  CHECK(lp_norm(GridField::constant(d, 0.0), 3.0) == 0.0);
  // Large p does not overflow.
  CHECK(std::isfinite(lp_norm(GridField::constant(d, 1e10), 200.0)));
}

TEST_CASE("property: L^p norms on a unit-volume domain are monotone in p and below the sup") {
  Rng rng(31);
  for (auto spec : {DomainSpec::interval(1.0, 32), DomainSpec::rectangle(2.0, 0.5, 8, 8)}) {
    const auto d = make_domain(spec);
    for (int i = 0; i < 40; ++i) {
      const auto f = random_field(d, rng);
      double prev = 0.0;
      for (double p : {1.0, 1.5, 2.0, 3.0, 6.0, 20.0}) {
        const double n = lp_norm(f, p);
        CHECK(n >= prev * (1.0 - 1e-14));
        prev = n;
      }
      CHECK(lp_norm(f, kInf) >= prev * (1.0 - 1e-14));
    }
  }
  // Sup dominates the volume-scaled norm on any domain.
  const auto d = make_domain(DomainSpec::interval(7.0, 16));
  for (int i = 0; i < 40; ++i) {
    const auto f = random_field(d, rng);
    for (double p : {1.0, 2.0, 4.0})
      CHECK(lp_norm(f, kInf) >= std::pow(7.0, -1.0 / p) * lp_norm(f, p) * (1.0 - 1e-14));
  }
}

TEST_CASE("fractional norm is the L^p norm of the fractional power") {
  const auto d = make_domain(DomainSpec::interval(kPi, 32));
  const auto f = GridField::sample(d, [](double x) { return std::cos(2.0 * x); });
  const OperatorSpec op{1.0, 0.0};
  // cos 2x is an eigenfunction with eigenvalue 4: (op)^0.5 multiplies by 2.
  CHECK(fractional_norm(op, 0.5, f, 2.0) == doctest::Approx(2.0 * lp_norm(f, 2.0)).epsilon(1e-12));
}

TEST_CASE("Hoelder norm examples") {
  const auto d = make_domain(DomainSpec::interval(kPi, 64));
  CHECK(holder_norm(GridField::constant(d, 3.0), 0.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(holder_norm(GridField::constant(d, 3.0), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(holder_norm(GridField::constant(d, 3.0), -0.1), std::invalid_argument);

  const auto c = GridField::sample(d, [](double x) { return std::cos(x); });
  const double oracle = 1.0 + brute_force_seminorm(cosine, 0.0, kPi, 3001, 0.5);
  CHECK(holder_norm(c, 0.5) == doctest::Approx(oracle).epsilon(0.02));

  // mu = 1: max of the sup and the derivative sup, both about 1.
  CHECK(holder_norm(c, 1.0) == doctest::Approx(1.0).epsilon(1e-3));
  // mu = 1.5: derivative -sin x has the same seminorm profile as cos on [0, pi].
  const double oracle_d = brute_force_seminorm([](double x) { return std::sin(x); }, 0.0, kPi, 3001, 0.5);
  CHECK(holder_norm(c, 1.5) == doctest::Approx(1.0 + oracle_d).epsilon(0.02));
}

TEST_CASE("property: Hoelder norm at mu = 0 equals the sup norm") {
  Rng rng(32);
  const auto d = make_domain(DomainSpec::rectangle(1.0, 2.0, 8, 6));
  for (int i = 0; i < 50; ++i) {
    const auto f = random_field(d, rng);
    CHECK(holder_norm(f, 0.0) == lp_norm(f, kInf));
  }
}

TEST_CASE("property: Hoelder seminorm is monotone in the exponent on short domains") {
  // On a domain of diameter below 1, |x - y|^{-theta} grows with theta.
  Rng rng(33);
  const auto d = make_domain(DomainSpec::interval(0.9, 24));
  for (int i = 0; i < 30; ++i) {
    const auto f = random_field(d, rng);
    CHECK(holder_norm(f, 0.3) <= holder_norm(f, 0.7) * (1.0 + 1e-14));
  }
}

TEST_CASE("spectral gradient") {
  const auto d = make_domain(DomainSpec::rectangle(kPi, kPi, 16, 16));
  const auto f = GridField::sample(d, [](double x, double y) { return std::cos(x) * std::cos(2.0 * y); });
  const auto g = gradient_at_nodes(f);
  for (Eigen::Index j = 0; j < f.values.size(); ++j) {
    const double x = d->coordinate(j, 0), y = d->coordinate(j, 1);
    CHECK(g(j, 0) == doctest::Approx(-std::sin(x) * std::cos(2.0 * y)).epsilon(1e-12).scale(1.0));
    CHECK(g(j, 1) == doctest::Approx(-2.0 * std::cos(x) * std::sin(2.0 * y)).epsilon(1e-12).scale(1.0));
  }
}
