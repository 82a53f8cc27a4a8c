#pragma once

// Discrete L^p, fractional-power and Holder norms of grid fields.

#include "rdecay/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdecay {

/// (|Omega| / K sum_j |f_j|^p)^{1/p}; p = infinity gives the nodal max. The
/// uniform weight is the midpoint rule on the cell-centred nodes.
template <typename Scalar>
Scalar lp_norm(const BasicGridField<Scalar>& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm needs p >= 1");
  if (f.values.size() == 0) return Scalar(0);
  const Scalar sup = f.values.cwiseAbs().maxCoeff();
  if (std::isinf(p)) return sup;
  if (sup == Scalar(0)) return Scalar(0);
  // Scale by the max so |f|^p cannot overflow for large p.
  const Scalar ps = static_cast<Scalar>(p);
  const Scalar sum = (f.values.cwiseAbs() / sup).array().pow(ps).sum();
  const Scalar weight = f.domain->volume() / static_cast<Scalar>(f.values.size());
  return sup * std::pow(weight * sum, Scalar(1) / ps);
}

/// ||op^alpha f||_p, the fractional-power norm.
template <typename Scalar>
Scalar fractional_norm(const OperatorSpec& op, Scalar alpha, const BasicGridField<Scalar>& f,
                       double p) {
  return lp_norm(apply_fractional(op, alpha, f), p);
}

/// Nodal values of each partial derivative, computed spectrally.
template <typename Scalar>
MatrixX<Scalar> gradient_at_nodes(const BasicGridField<Scalar>& f) {
  const auto c = to_spectral(f);
  const auto& d = *f.domain;
  MatrixX<Scalar> g(f.values.size(), d.dimension());
  g.col(0) = detail::tensor_apply(d, d.derivative_synthesis(0), d.synthesis(1), c.coefficients);
  if (d.dimension() == 2)
    g.col(1) = detail::tensor_apply(d, d.synthesis(0), d.derivative_synthesis(1), c.coefficients);
  return g;
}

/// sup over distinct node pairs of |g(x) - g(y)| / |x - y|^theta, with g a
/// (possibly vector-valued) nodal function stored one row per node.
template <typename Scalar>
Scalar holder_seminorm(const BasicDomain<Scalar>& d, const MatrixX<Scalar>& g, Scalar theta) {
  const Eigen::Index n = g.rows();
  Scalar best = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar xi = d.coordinate(i, 0), yi = d.dimension() == 2 ? d.coordinate(i, 1) : Scalar(0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar dx = d.coordinate(j, 0) - xi;
      const Scalar dy = d.dimension() == 2 ? d.coordinate(j, 1) - yi : Scalar(0);
      const Scalar dist = std::sqrt(dx * dx + dy * dy);
      const Scalar diff = (g.row(i) - g.row(j)).norm();
      best = std::max(best, diff / std::pow(dist, theta));
    }
  }
  return best;
}

/// Discrete C^mu norm for mu in [0, 2):
///   mu in [0, 1): ||f||_inf + [f]_mu
///   mu = 1:       max(||f||_inf, ||grad f||_inf)
///   mu in (1, 2): max(||f||_inf, ||grad f||_inf) + [grad f]_{mu - 1}
/// The seminorm is the pairwise sup over collocation nodes; derivatives are
/// spectral.
template <typename Scalar>
Scalar holder_norm(const BasicGridField<Scalar>& f, double mu) {
  if (!(mu >= 0.0 && mu < 2.0)) throw std::invalid_argument("Holder exponent must lie in [0, 2)");
  const Scalar sup = lp_norm(f, std::numeric_limits<double>::infinity());
  const auto& d = *f.domain;
  if (mu < 1.0) {
    if (mu == 0.0) return sup;
    return sup + holder_seminorm(d, MatrixX<Scalar>(f.values), static_cast<Scalar>(mu));
  }
  const MatrixX<Scalar> grad = gradient_at_nodes(f);
  const Scalar grad_sup = grad.rowwise().norm().maxCoeff();
  const Scalar base = std::max(sup, grad_sup);
  if (mu == 1.0) return base;
  return base + holder_seminorm(d, grad, static_cast<Scalar>(mu - 1.0));
}

}  // namespace rdecay
