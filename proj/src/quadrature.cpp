#include "rdecay/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace rdecay::quad {
namespace {

// Kronrod 15-point abscissae and weights; every other node is a Gauss 7 node.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k15 = fc * kWk[7];
  double g7 = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXk[static_cast<std::size_t>(i)];
    const double s = f(c - x) + f(c + x);
    k15 += kWk[static_cast<std::size_t>(i)] * s;
    if (i % 2 == 1) g7 += kWg[static_cast<std::size_t>(i / 2)] * s;
  }
  return {a, b, k15 * h, std::abs((k15 - g7) * h)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("quadrature bounds must be finite");
  if (a == b) return {};
  if (b < a) {
    Result r = integrate(f, b, a, opts);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod(f, a, b);
  double total = first.value, err = first.error;
  heap.push(first);
  int count = 1;
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (count >= opts.max_intervals) return {total, err, count, false};
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval cannot be split further in floating point.
      return {total, err, count, false};
    }
    Segment left = kronrod(f, worst.a, mid), right = kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
    if (!std::isfinite(total)) return {total, err, count, false};
  }
  // Recompute the sum to shed accumulated update rounding.
  double sum = 0.0, esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, count, true};
}

Result integrate_left_singular(const std::function<double(double)>& f, double a, double b,
                               double alpha, const Options& opts) {
  if (!(alpha < 1.0)) throw std::invalid_argument("singularity exponent must be below 1");
  if (alpha <= 0.0) return integrate(f, a, b, opts);
  const double g = 1.0 / (1.0 - alpha), len = b - a;
  auto smooth = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double ug = std::pow(u, g);
    return f(a + len * ug) * g * len * ug / u;
  };
  return integrate(smooth, 0.0, 1.0, opts);
}

}  // namespace rdecay::quad
