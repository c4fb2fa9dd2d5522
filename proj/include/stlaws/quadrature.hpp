#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "stlaws/errors.hpp"

namespace stlaws::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

struct Options {
  double abs_tol = 1e-9;
  double rel_tol = 1e-12;
  int max_depth = 30;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), depth};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]. Bisects the
/// segment with the largest error estimate until the total estimate meets
/// max(abs_tol, rel_tol * |value|). Throws NumericError if a segment would
/// need more than max_depth bisections, or if f produced a non-finite value.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  if (a == b) return {};
  int evals = 0;
  auto counted = [&](double x) {
    ++evals;
    return f(x);
  };
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(counted, a, b, 0);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    const auto worst = heap.top();
    if (worst.depth >= opt.max_depth || !std::isfinite(total)) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << a << ", " << b << "]: estimate " << total << " +/- " << err
          << " after " << evals << " evaluations; worst segment [" << worst.a << ", " << worst.b << "]";
      throw NumericError(msg.str());
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(counted, worst.a, mid, worst.depth + 1);
    const auto right = detail::gk15(counted, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  double value = 0.0;
  double error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(value)) throw NumericError("quadrature produced a non-finite value");
  return {value, error, evals};
}

/// Integrates over [a, b] after t = a + (b - a)(3s^2 - 2s^3), whose Jacobian
/// vanishes at both ends. Absorbs inverse-square-root and logarithmic
/// endpoint singularities; the integrand is never evaluated at a or b.
template <class F>
Result integrate_endpoint_singular(F&& f, double a, double b, const Options& opt = {}) {
  const double width = b - a;
  auto mapped = [&](double s) {
    const double t = a + width * s * s * (3.0 - 2.0 * s);
    const double jac = 6.0 * width * s * (1.0 - s);
    if (jac == 0.0 || t <= a || t >= b) return 0.0;
    return f(t) * jac;
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

}  // namespace stlaws::quad
