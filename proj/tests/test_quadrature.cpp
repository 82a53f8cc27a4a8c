#include "rdecay/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rdecay;

TEST_CASE("polynomials and smooth integrands") {
  CHECK(quad::integrate([](double x) { return x * x; }, 0.0, 3.0).value == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(quad::integrate([](double x) { return std::exp(-x); }, 0.0, 50.0).value ==
        doctest::Approx(1.0 - std::exp(-50.0)).epsilon(1e-13));
}

TEST_CASE("orientation and empty intervals") {
  auto f = [](double x) { return std::cos(x); };
  CHECK(quad::integrate(f, 1.0, 1.0).value == 0.0);
  CHECK(quad::integrate(f, 2.0, 0.5).value == doctest::Approx(-quad::integrate(f, 0.5, 2.0).value));
  CHECK_THROWS_AS(quad::integrate(f, 0.0, INFINITY), std::invalid_argument);
}

TEST_CASE("endpoint power singularities") {
  for (double alpha : {0.25, 0.5, 0.75, 0.9}) {
    auto f = [alpha](double s) { return std::pow(s, -alpha); };
    const double exact = std::pow(2.0, 1.0 - alpha) / (1.0 - alpha);
    const auto r = quad::integrate_left_singular(f, 0.0, 2.0, alpha);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-11));
  }
  // Beta function B(0.3, 0.6) via Gamma.
  const double beta = std::tgamma(0.3) * std::tgamma(0.6) / std::tgamma(0.9);
  auto left = [](double x) { return std::pow(x, -0.7) * std::pow(1.0 - x, -0.4); };
  auto right = [](double r) { return std::pow(r, -0.4) * std::pow(1.0 - r, -0.7); };
  const double split = quad::checked(quad::integrate_left_singular(left, 0.0, 0.5, 0.7)) +
                       quad::checked(quad::integrate_left_singular(right, 0.0, 0.5, 0.4));
  CHECK(split == doctest::Approx(beta).epsilon(1e-10));
  CHECK_THROWS_AS(quad::integrate_left_singular(left, 0.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("non-convergence is reported") {
  quad::Options tight{0.0, 0.0, 5};
  const auto r = quad::integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, tight);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(quad::checked(r), quad::NonConvergence);
}
