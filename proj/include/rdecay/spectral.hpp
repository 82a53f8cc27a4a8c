#pragma once

// Cosine-basis spectral calculus on intervals and rectangles with homogeneous
// Neumann boundary conditions.
//
// Nodal values live on the cell-centred DCT-II nodes x_j = (j + 1/2) L / K.
// A field is represented as f(x) = sum_k c_k prod_i cos(k_i pi x_i / L_i),
// so c_0 is the spatial mean and every mode k is an eigenfunction of the
// Neumann Laplacian with eigenvalue sum_i (k_i pi / L_i)^2.
//
// In 2-D the nodal vector is stored column-major as a K0 x K1 matrix
// (index j0 + K0 * j1), matching Eigen's default layout.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace rdecay {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ModeIndex = std::array<int, 2>;

inline constexpr std::size_t kDefaultNodeCap = 1u << 16;

struct DomainSpec {
  int dimension = 1;
  std::array<double, 2> lengths{std::numbers::pi, 1.0};
  std::array<int, 2> grid_sizes{64, 1};

  static DomainSpec interval(double length, int nodes) {
    return DomainSpec{1, {length, 1.0}, {nodes, 1}};
  }
  static DomainSpec rectangle(double lx, double ly, int kx, int ky) {
    return DomainSpec{2, {lx, ly}, {kx, ky}};
  }

  std::size_t node_count() const {
    std::size_t n = 1;
    for (int i = 0; i < dimension; ++i) n *= static_cast<std::size_t>(grid_sizes[i]);
    return n;
  }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dimension; ++i) v *= lengths[i];
    return v;
  }

  void validate(std::size_t node_cap = kDefaultNodeCap) const {
    if (dimension != 1 && dimension != 2)
      throw std::invalid_argument("domain dimension must be 1 or 2");
    for (int i = 0; i < dimension; ++i) {
      if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i]))
        throw std::invalid_argument("domain lengths must be positive and finite");
      if (grid_sizes[i] < 4) throw std::invalid_argument("grid sizes must be at least 4");
    }
    if (node_count() > node_cap)
      throw std::invalid_argument("grid has " + std::to_string(node_count()) +
                                  " nodes, cap is " + std::to_string(node_cap));
  }
};

/// Immutable discretisation of a DomainSpec: collocation nodes, transform
/// matrices and Laplacian eigenvalues. Shared read-only by every field on it.
template <typename Scalar>
class BasicDomain {
 public:
  explicit BasicDomain(const DomainSpec& spec, std::size_t node_cap = kDefaultNodeCap)
      : spec_(spec) {
    spec_.validate(node_cap);
    if (spec_.dimension == 1) spec_.grid_sizes[1] = 1;
    for (int a = 0; a < spec_.dimension; ++a) build_axis(a);
    if (spec_.dimension == 1) {
      axes_[1].synthesis = MatrixX<Scalar>::Ones(1, 1);
      axes_[1].analysis = MatrixX<Scalar>::Ones(1, 1);
      axes_[1].derivative = MatrixX<Scalar>::Zero(1, 1);
      axes_[1].wavenumbers = VectorX<Scalar>::Zero(1);
      axes_[1].nodes = VectorX<Scalar>::Zero(1);
    }
    const int k0 = spec_.grid_sizes[0], k1 = spec_.grid_sizes[1];
    eigenvalues_.resize(static_cast<Eigen::Index>(k0) * k1);
    for (int j1 = 0; j1 < k1; ++j1)
      for (int j0 = 0; j0 < k0; ++j0) {
        const Scalar w0 = axes_[0].wavenumbers(j0), w1 = axes_[1].wavenumbers(j1);
        eigenvalues_(j0 + k0 * j1) = w0 * w0 + w1 * w1;
      }
    lambda1_ = std::numeric_limits<Scalar>::infinity();
    for (int a = 0; a < spec_.dimension; ++a) {
      const Scalar w = axes_[a].wavenumbers(1);
      lambda1_ = std::min(lambda1_, w * w);
    }
  }

  const DomainSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }
  int size(int axis) const { return spec_.grid_sizes[axis]; }
  Eigen::Index node_count() const { return eigenvalues_.size(); }
  Scalar volume() const { return static_cast<Scalar>(spec_.volume()); }

  /// Collocation nodes along one axis.
  const VectorX<Scalar>& nodes(int axis) const { return axes_[axis].nodes; }
  /// Coordinate of flat node index j along an axis.
  Scalar coordinate(Eigen::Index j, int axis) const {
    const int k0 = spec_.grid_sizes[0];
    return axis == 0 ? axes_[0].nodes(j % k0) : axes_[1].nodes(j / k0);
  }

  /// Nodal values from coefficients: S_{jk} = cos(k pi x_j / L).
  const MatrixX<Scalar>& synthesis(int axis) const { return axes_[axis].synthesis; }
  /// Exact inverse of synthesis on the truncated basis.
  const MatrixX<Scalar>& analysis(int axis) const { return axes_[axis].analysis; }
  /// Nodal values of d/dx of each basis function: -(k pi / L) sin(k pi x_j / L).
  const MatrixX<Scalar>& derivative_synthesis(int axis) const { return axes_[axis].derivative; }

  /// Neumann Laplacian eigenvalue per flat mode index.
  const VectorX<Scalar>& eigenvalues() const { return eigenvalues_; }
  /// Least positive eigenvalue over the truncated basis.
  Scalar least_positive_eigenvalue() const { return lambda1_; }

  Eigen::Index flat_index(const ModeIndex& k) const {
    for (int a = 0; a < 2; ++a)
      if (k[a] < 0 || k[a] >= spec_.grid_sizes[a])
        throw std::out_of_range("mode index out of range on axis " + std::to_string(a));
    return k[0] + static_cast<Eigen::Index>(spec_.grid_sizes[0]) * k[1];
  }
  ModeIndex mode_index(Eigen::Index flat) const {
    const int k0 = spec_.grid_sizes[0];
    return {static_cast<int>(flat % k0), static_cast<int>(flat / k0)};
  }

 private:
  struct Axis {
    VectorX<Scalar> nodes;
    VectorX<Scalar> wavenumbers;
    MatrixX<Scalar> synthesis;
    MatrixX<Scalar> analysis;
    MatrixX<Scalar> derivative;
  };

  void build_axis(int a) {
    const int n = spec_.grid_sizes[a];
    const Scalar length = static_cast<Scalar>(spec_.lengths[a]);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Axis& ax = axes_[a];
    ax.nodes.resize(n);
    ax.wavenumbers.resize(n);
    ax.synthesis.resize(n, n);
    ax.analysis.resize(n, n);
    ax.derivative.resize(n, n);
    for (int j = 0; j < n; ++j) ax.nodes(j) = (Scalar(j) + Scalar(0.5)) * length / Scalar(n);
    for (int k = 0; k < n; ++k) ax.wavenumbers(k) = Scalar(k) * pi / length;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // Phase k (j + 1/2) pi / n computed from integers keeps nodes symmetric.
        const Scalar phase = pi * Scalar(k) * (Scalar(2 * j + 1)) / Scalar(2 * n);
        ax.synthesis(j, k) = std::cos(phase);
        ax.derivative(j, k) = -ax.wavenumbers(k) * std::sin(phase);
      }
    for (int k = 0; k < n; ++k) {
      const Scalar weight = (k == 0 ? Scalar(1) : Scalar(2)) / Scalar(n);
      ax.analysis.row(k) = weight * ax.synthesis.col(k).transpose();
    }
  }

  DomainSpec spec_;
  std::array<Axis, 2> axes_;
  VectorX<Scalar> eigenvalues_;
  Scalar lambda1_{};
};

using Domain = BasicDomain<double>;

template <typename Scalar = double>
std::shared_ptr<const BasicDomain<Scalar>> make_domain(const DomainSpec& spec,
                                                       std::size_t node_cap = kDefaultNodeCap) {
  return std::make_shared<const BasicDomain<Scalar>>(spec, node_cap);
}

template <typename Scalar>
struct BasicGridField {
  std::shared_ptr<const BasicDomain<Scalar>> domain;
  VectorX<Scalar> values;

  BasicGridField() = default;
  BasicGridField(std::shared_ptr<const BasicDomain<Scalar>> d, VectorX<Scalar> v)
      : domain(std::move(d)), values(std::move(v)) {
    if (values.size() != domain->node_count())
      throw std::invalid_argument("value count does not match the domain grid");
  }

  static BasicGridField constant(std::shared_ptr<const BasicDomain<Scalar>> d, Scalar c) {
    const auto n = d->node_count();
    return BasicGridField(std::move(d), VectorX<Scalar>::Constant(n, c));
  }
  /// Nodal samples of a callable f(x) (1-D) or f(x, y) (2-D).
  template <typename F>
  static BasicGridField sample(std::shared_ptr<const BasicDomain<Scalar>> d, F&& f) {
    VectorX<Scalar> v(d->node_count());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if constexpr (std::is_invocable_v<F, Scalar, Scalar>)
        v(j) = f(d->coordinate(j, 0), d->coordinate(j, 1));
      else
        v(j) = f(d->coordinate(j, 0));
    }
    return BasicGridField(std::move(d), std::move(v));
  }

  bool all_finite() const { return values.allFinite(); }
};

template <typename Scalar>
struct BasicSpectralField {
  std::shared_ptr<const BasicDomain<Scalar>> domain;
  VectorX<Scalar> coefficients;

  Scalar& operator[](const ModeIndex& k) { return coefficients(domain->flat_index(k)); }
  Scalar operator[](const ModeIndex& k) const { return coefficients(domain->flat_index(k)); }
};

using GridField = BasicGridField<double>;
using SpectralField = BasicSpectralField<double>;

/// Diffusion-plus-shift operator y -> -(d Laplacian - b) y; per-mode
/// multiplier d * lambda_k + b.
struct OperatorSpec {
  double diffusion = 1.0;
  double shift = 0.0;

  void validate() const {
    if (!(diffusion > 0.0) || !std::isfinite(diffusion))
      throw std::invalid_argument("operator diffusion must be positive");
    if (!(shift >= 0.0) || !std::isfinite(shift))
      throw std::invalid_argument("operator shift must be nonnegative");
  }
  template <typename Scalar>
  Scalar multiplier(Scalar eigenvalue) const {
    return static_cast<Scalar>(diffusion) * eigenvalue + static_cast<Scalar>(shift);
  }
};

namespace detail {

template <typename Scalar>
void require_same_domain(const BasicDomain<Scalar>* a, const BasicDomain<Scalar>* b) {
  if (a != b && !(a && b && a->spec().dimension == b->spec().dimension &&
                  a->spec().lengths == b->spec().lengths &&
                  a->spec().grid_sizes == b->spec().grid_sizes))
    throw std::invalid_argument("fields live on different domains");
}

// Y = M0 * X * M1^T where X is the K0 x K1 view of a flat vector.
template <typename Scalar>
VectorX<Scalar> tensor_apply(const BasicDomain<Scalar>& d, const MatrixX<Scalar>& m0,
                             const MatrixX<Scalar>& m1, const VectorX<Scalar>& x) {
  if (d.dimension() == 1) return m0 * x;
  const Eigen::Index k0 = d.size(0), k1 = d.size(1);
  Eigen::Map<const MatrixX<Scalar>> xm(x.data(), k0, k1);
  MatrixX<Scalar> y = m0 * xm * m1.transpose();
  return Eigen::Map<const VectorX<Scalar>>(y.data(), y.size());
}

}  // namespace detail

template <typename Scalar>
Scalar laplacian_eigenvalue(const BasicDomain<Scalar>& domain, const ModeIndex& k) {
  return domain.eigenvalues()(domain.flat_index(k));
}

template <typename Scalar>
BasicSpectralField<Scalar> to_spectral(const BasicGridField<Scalar>& f) {
  if (!f.domain) throw std::invalid_argument("field has no domain");
  if (!f.all_finite()) throw std::domain_error("non-finite nodal values");
  const auto& d = *f.domain;
  return {f.domain, detail::tensor_apply(d, d.analysis(0), d.analysis(1), f.values)};
}

template <typename Scalar>
BasicGridField<Scalar> to_grid(const BasicSpectralField<Scalar>& c) {
  if (!c.domain) throw std::invalid_argument("field has no domain");
  if (!c.coefficients.allFinite()) throw std::domain_error("non-finite coefficients");
  const auto& d = *c.domain;
  return {c.domain, detail::tensor_apply(d, d.synthesis(0), d.synthesis(1), c.coefficients)};
}

/// Multiplies every mode by fn(eigenvalue) in coefficient space.
template <typename Scalar, typename Fn>
BasicSpectralField<Scalar> apply_multiplier(BasicSpectralField<Scalar> c, Fn&& fn) {
  const auto& lam = c.domain->eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) c.coefficients(i) *= fn(lam(i));
  return c;
}

template <typename Scalar>
BasicGridField<Scalar> apply_operator(const OperatorSpec& op, const BasicGridField<Scalar>& f) {
  op.validate();
  return to_grid(apply_multiplier(to_spectral(f), [&](Scalar lam) { return op.multiplier(lam); }));
}

/// Multiplier (d lambda_k + b)^alpha. With b = 0 the constant mode maps to 0
/// for alpha > 0, i.e. the operator acts as its restriction to mean-free fields.
template <typename Scalar>
Scalar fractional_multiplier(const OperatorSpec& op, Scalar alpha, Scalar eigenvalue) {
  if (alpha == Scalar(0)) return Scalar(1);
  const Scalar m = op.multiplier(eigenvalue);
  return m == Scalar(0) ? Scalar(0) : std::pow(m, alpha);
}

inline void require_fractional_order(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("fractional order must lie in [0, 1)");
}

template <typename Scalar>
BasicSpectralField<Scalar> apply_fractional(const OperatorSpec& op, Scalar alpha,
                                            BasicSpectralField<Scalar> c) {
  op.validate();
  require_fractional_order(static_cast<double>(alpha));
  return apply_multiplier(std::move(c),
                          [&](Scalar lam) { return fractional_multiplier(op, alpha, lam); });
}

template <typename Scalar>
BasicGridField<Scalar> apply_fractional(const OperatorSpec& op, Scalar alpha,
                                        const BasicGridField<Scalar>& f) {
  return to_grid(apply_fractional(op, alpha, to_spectral(f)));
}

template <typename Scalar>
BasicSpectralField<Scalar> apply_semigroup(const OperatorSpec& op, Scalar t,
                                           BasicSpectralField<Scalar> c) {
  op.validate();
  if (!(t >= Scalar(0))) throw std::invalid_argument("semigroup time must be nonnegative");
  if (t == Scalar(0)) return c;
  return apply_multiplier(std::move(c),
                          [&](Scalar lam) { return std::exp(-t * op.multiplier(lam)); });
}

template <typename Scalar>
BasicGridField<Scalar> apply_semigroup(const OperatorSpec& op, Scalar t,
                                       const BasicGridField<Scalar>& f) {
  if (t == Scalar(0)) {
    op.validate();
    return f;
  }
  return to_grid(apply_semigroup(op, t, to_spectral(f)));
}

/// Mean value, i.e. the k = 0 coefficient.
template <typename Scalar>
Scalar q0(const BasicGridField<Scalar>& f) {
  return f.values.mean();
}

template <typename Scalar>
BasicSpectralField<Scalar> q_plus(BasicSpectralField<Scalar> c) {
  c.coefficients(0) = Scalar(0);
  return c;
}

template <typename Scalar>
BasicGridField<Scalar> q_plus(const BasicGridField<Scalar>& f) {
  return to_grid(q_plus(to_spectral(f)));
}

// ---------------------------------------------------------------------------
// Smoothing-estimate audit for ||A^alpha e^{-tA} y|| <= C t^{-alpha} e^{-r t} ||y||.

struct SemigroupAuditReport {
  double max_ratio = 0.0;
  ModeIndex attaining_mode{0, 0};
  double attaining_time = 0.0;
  double certified_rate = 0.0;  // (1 - slack) * r
  /// First grid time at which the unslackened ratio exceeds max_ratio.
  std::optional<double> literal_failure_time;
};

/// Sup over modes and t of m_k^alpha t^alpha e^{-t m_k} e^{(1 - slack) r t},
/// with r = b, or r = d * lambda_1 when `mean_free` (the constant mode is
/// dropped, as for the restriction of the operator to mean-free fields).
template <typename Scalar>
SemigroupAuditReport semigroup_estimate_audit(const BasicDomain<Scalar>& domain,
                                              const OperatorSpec& op, double alpha, double slack,
                                              const std::vector<double>& t_grid,
                                              bool mean_free = false) {
  op.validate();
  require_fractional_order(alpha);
  if (!(slack > 0.0 && slack < 1.0)) throw std::invalid_argument("slack must lie in (0, 1)");
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  for (double t : t_grid)
    if (!(t > 0.0)) throw std::invalid_argument("audit times must be positive");

  const double rate = mean_free
                          ? op.diffusion * static_cast<double>(domain.least_positive_eigenvalue())
                          : op.shift;
  SemigroupAuditReport rep;
  rep.certified_rate = (1.0 - slack) * rate;
  const auto& lam = domain.eigenvalues();

  auto log_ratio = [&](double m, double t, double r) {
    // Logs avoid overflow of e^{r t} at large t; m^alpha t^alpha with m = 0
    // and alpha = 0 is 1.
    const double mt = (alpha == 0.0) ? 0.0 : alpha * std::log(m * t);
    return mt - t * m + r * t;
  };
  std::vector<double> literal_max(t_grid.size(), -std::numeric_limits<double>::infinity());
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = (mean_free ? 1 : 0); i < lam.size(); ++i) {
    if (mean_free && lam(i) == Scalar(0)) continue;
    const double m = op.multiplier(static_cast<double>(lam(i)));
    if (m == 0.0 && alpha > 0.0) continue;  // multiplier is exactly 0
    for (std::size_t s = 0; s < t_grid.size(); ++s) {
      const double t = t_grid[s];
      const double lr = log_ratio(m, t, rep.certified_rate);
      if (lr > best) {
        best = lr;
        rep.attaining_mode = domain.mode_index(i);
        rep.attaining_time = t;
      }
      literal_max[s] = std::max(literal_max[s], log_ratio(m, t, rate));
    }
  }
  rep.max_ratio = std::exp(best);
  for (std::size_t s = 0; s < t_grid.size(); ++s)
    if (literal_max[s] > best) {
      rep.literal_failure_time = t_grid[s];
      break;
    }
  return rep;
}

/// Log-spaced grid of n points on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] =
        n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

}  // namespace rdecay
