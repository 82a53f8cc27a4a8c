#include "rdecay/coefficients.hpp"

#include "rdecay/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rdecay {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double evaluate(const HProfile& h, double t) {
  return std::visit(
      overloaded{
          [](const ConstantProfile& c) { return c.value; },
          [t](const ExponentialProfile& e) { return std::exp(-e.rate * t); },
          [t](const PowerProfile& p) { return std::pow(1.0 + t, -p.exponent); },
          [t](const BumpProfile& b) {
            const double x = (t - b.center) / b.width;
            if (std::abs(x) >= 1.0) return 0.0;
            const double c = std::cos(0.5 * std::numbers::pi * x);
            return b.height * c * c;
          },
          [t](const TabulatedProfile& tab) {
            const auto& ts = tab.times;
            if (t <= ts.front()) return tab.values.front();
            if (t > ts.back()) return 0.0;
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            if (it == ts.end()) return tab.values.back();
            const auto i = static_cast<std::size_t>(it - ts.begin());
            const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
            return (1.0 - w) * tab.values[i - 1] + w * tab.values[i];
          },
      },
      h);
}

std::string profile_kind(const HProfile& h) {
  return std::visit(overloaded{
                        [](const ConstantProfile&) { return std::string("constant"); },
                        [](const ExponentialProfile&) { return std::string("exponential"); },
                        [](const PowerProfile&) { return std::string("power"); },
                        [](const BumpProfile&) { return std::string("bump"); },
                        [](const TabulatedProfile&) { return std::string("tabulated"); },
                    },
                    h);
}

void validate(const HProfile& h) {
  std::visit(overloaded{
                 [](const ConstantProfile& c) {
                   if (!(c.value >= 0.0) || !std::isfinite(c.value))
                     throw std::invalid_argument("constant profile must be nonnegative");
                 },
                 [](const ExponentialProfile& e) {
                   if (!std::isfinite(e.rate))
                     throw std::invalid_argument("exponential rate must be finite");
                 },
                 [](const PowerProfile& p) {
                   if (!std::isfinite(p.exponent))
                     throw std::invalid_argument("power exponent must be finite");
                 },
                 [](const BumpProfile& b) {
                   if (!(b.width > 0.0) || !(b.height >= 0.0) || !std::isfinite(b.center) ||
                       !std::isfinite(b.height) || !std::isfinite(b.width))
                     throw std::invalid_argument("bump needs width > 0 and height >= 0");
                 },
                 [](const TabulatedProfile& t) {
                   if (t.times.empty() || t.times.size() != t.values.size())
                     throw std::invalid_argument("tabulated profile needs matching samples");
                   if (t.times.front() < 0.0)
                     throw std::invalid_argument("tabulated times must be nonnegative");
                   for (std::size_t i = 1; i < t.times.size(); ++i)
                     if (!(t.times[i] > t.times[i - 1]))
                       throw std::invalid_argument("tabulated times must be increasing");
                   for (double v : t.values)
                     if (!(v >= 0.0) || !std::isfinite(v))
                       throw std::invalid_argument("tabulated values must be nonnegative");
                 },
             },
             h);
}

double support_end(const HProfile& h) {
  return std::visit(overloaded{
                        [](const ConstantProfile& c) { return c.value == 0.0 ? 0.0 : kInf; },
                        [](const ExponentialProfile&) { return kInf; },
                        [](const PowerProfile&) { return kInf; },
                        [](const BumpProfile& b) { return std::max(0.0, b.center + b.width); },
                        [](const TabulatedProfile& t) { return t.times.back(); },
                    },
                    h);
}

double eval_coefficient(const CoefficientSpec& spec, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("coefficient time must be nonnegative");
  const double h = evaluate(spec.profile, t);
  if (spec.sigma == 0.0) return h;
  if (h == 0.0) return 0.0;
  return std::pow(t, spec.sigma) * h;
}

ConjugateExponents conjugate_exponents(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const double q_star = alpha >= 0.5 ? 2.0 / alpha - 1.0 : 2.0;
  return {q_star, q_star / (q_star - 1.0)};
}

namespace {

// Splits at kinks of compactly supported profiles so the quadrature sees
// smooth pieces.
double piecewise_integral(const HProfile& h, const std::function<double(double)>& f, double t) {
  std::vector<double> breaks{0.0, t};
  if (const auto* tab = std::get_if<TabulatedProfile>(&h))
    for (double x : tab->times)
      if (x > 0.0 && x < t) breaks.push_back(x);
  if (const auto* b = std::get_if<BumpProfile>(&h))
    for (double x : {b->center - b->width, b->center, b->center + b->width})
      if (x > 0.0 && x < t) breaks.push_back(x);
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i)
    sum += quad::checked(quad::integrate(f, breaks[i - 1], breaks[i]));
  return sum;
}

}  // namespace

double profile_integral(const HProfile& h, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("integration end must be finite and >= 0");
  if (t == 0.0) return 0.0;
  return piecewise_integral(h, [&](double s) { return evaluate(h, s); }, t);
}

LqStarNorm lqstar_norm(const HProfile& h, double q_star, double horizon) {
  if (!(q_star >= 1.0)) throw std::invalid_argument("q* must be at least 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  validate(h);
  auto integrand = [&](double s) { return std::pow(evaluate(h, s), q_star); };

  LqStarNorm out;
  out.finite_part = piecewise_integral(h, integrand, horizon);

  std::visit(overloaded{
                 [&](const ConstantProfile& c) {
                   out.converges = c.value == 0.0;
                   out.tail = c.value == 0.0 ? 0.0 : kInf;
                 },
                 [&](const ExponentialProfile& e) {
                   const double r = q_star * e.rate;
                   out.converges = r > 0.0;
                   out.tail = out.converges ? std::exp(-r * horizon) / r : kInf;
                 },
                 [&](const PowerProfile& p) {
                   const double r = q_star * p.exponent;
                   out.converges = r > 1.0;
                   out.tail = out.converges ? std::pow(1.0 + horizon, 1.0 - r) / (r - 1.0) : kInf;
                 },
                 [&](const BumpProfile& b) {
                   double tail = 0.0, lo = horizon;
                   for (double x : {b.center - b.width, b.center, b.center + b.width})
                     if (x > lo) {
                       tail += quad::checked(quad::integrate(integrand, lo, x));
                       lo = x;
                     }
                   out.tail = tail;
                 },
                 [&](const TabulatedProfile& t) {
                   // Zero beyond the last sample by construction.
                   double tail = 0.0;
                   double lo = horizon;
                   for (double x : t.times)
                     if (x > lo) {
                       tail += quad::checked(quad::integrate(integrand, lo, x));
                       lo = x;
                     }
                   out.tail = tail;
                 },
             },
             h);
  out.value = std::pow(out.finite_part + (out.converges ? out.tail : 0.0), 1.0 / q_star);
  return out;
}

void SystemParams::validate() const {
  for (double di : d)
    if (!(di > 0.0) || !std::isfinite(di))
      throw std::invalid_argument("diffusion coefficients must be positive");
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be nonnegative");
  for (double e : {m, n, k})
    if (!std::isfinite(e) || e < 0.0) throw std::invalid_argument("exponents must be finite and >= 0");
  for (const auto& c : a) {
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma))
      throw std::invalid_argument("sigma must be nonnegative");
    rdecay::validate(c.profile);
  }
  if (a[3].sigma != 0.0) throw std::invalid_argument("sigma of a4 must be 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must exceed 1");
  if (!(l > 1.0) || !std::isfinite(l)) throw std::invalid_argument("l must exceed 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be positive");
  if (!(mu >= 0.0 && mu < 2.0)) throw std::invalid_argument("mu must lie in [0, 2)");
  domain.validate();
}

}  // namespace rdecay
