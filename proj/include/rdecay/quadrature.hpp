#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals, plus a graded
// change of variables for integrable power singularities at an endpoint.

#include <functional>
#include <stdexcept>

namespace rdecay::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
};

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_intervals = 20000;
};

/// Globally adaptive G7K15: repeatedly bisects the interval with the largest
/// error estimate until the total estimate meets the tolerance.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Integral of f over [a, b] where f behaves like (s - a)^{-alpha} near a.
/// Substitutes s = a + (b - a) u^g with g = 1 / (1 - alpha), which cancels the
/// singularity; the resulting smooth integrand is handed to `integrate`.
Result integrate_left_singular(const std::function<double(double)>& f, double a, double b,
                               double alpha, const Options& opts = {});

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Throws NonConvergence when the adaptive scheme exhausts its interval budget.
inline double checked(const Result& r) {
  if (!r.converged) throw NonConvergence("quadrature did not converge");
  return r.value;
}

}  // namespace rdecay::quad
