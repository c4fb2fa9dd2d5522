#pragma once

// Chebyshev polynomials of the second kind and Beurling-Selberg
// majorant/minorant cosine polynomials for interval indicators on [0, pi].

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "stlaws/errors.hpp"

namespace stlaws {

/// U_m(cos theta) = sin((m+1) theta) / sin(theta), by the three-term
/// recurrence so the endpoints theta = 0, pi need no special casing.
inline double chebyshev_u(int m, double theta) {
  if (m < 0 || m > 10000) throw ArgumentError("chebyshev_u: degree must lie in [0, 10^4]");
  const double x = std::cos(theta);
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 2; k <= m; ++k) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// theta -> sum_{m=0}^{M} c_m cos(m theta).
struct CosinePolynomial {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  double operator()(double theta) const {
    // Clenshaw for the cosine series.
    const double two_cos = 2.0 * std::cos(theta);
    double b1 = 0.0;
    double b2 = 0.0;
    for (int m = degree(); m >= 1; --m) {
      const double b0 = coeffs[m] + two_cos * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return coeffs[0] + b1 * std::cos(theta) - b2;
  }
};

/// (theta, theta') -> sum c_{m,m'} cos(m theta) cos(m' theta'), row-major.
struct CosinePolynomial2D {
  int M = 0;
  std::vector<double> coeffs;

  double at(int m, int mp) const { return coeffs[static_cast<std::size_t>(m) * (M + 1) + mp]; }
  double& at(int m, int mp) { return coeffs[static_cast<std::size_t>(m) * (M + 1) + mp]; }

  double operator()(double theta, double theta_p) const {
    std::vector<double> cm(M + 1), cmp(M + 1);
    for (int m = 0; m <= M; ++m) {
      cm[m] = std::cos(m * theta);
      cmp[m] = std::cos(m * theta_p);
    }
    double total = 0.0;
    for (int m = 0; m <= M; ++m) {
      double row = 0.0;
      for (int mp = 0; mp <= M; ++mp) row += at(m, mp) * cmp[mp];
      total += cm[m] * row;
    }
    return total;
  }
};

enum class Side { Major, Minor };

inline Side parse_side(const std::string& s) {
  if (s == "major") return Side::Major;
  if (s == "minor") return Side::Minor;
  throw ArgumentError("side must be 'major' or 'minor', got '" + s + "'");
}

namespace detail {

/// Vaaler's weight J(u) = pi u (1 - u) cot(pi u) + u on (0, 1).
inline double vaaler_weight(double u) {
  return std::numbers::pi * u * (1.0 - u) / std::tan(std::numbers::pi * u) + u;
}

/// Fourier coefficients, k = 0..K, of the degree-K Selberg polynomial for the
/// closed arc [a, b] of R/Z (b - a <= 1). Built from Vaaler's approximation V
/// of the sawtooth psi and the Fejer kernel bounding psi - V:
///   S = (b - a) + V(a - x) + V(x - b) +/- (Delta(a - x) + Delta(x - b)) / (2K + 2).
inline std::vector<std::complex<double>> selberg_arc(double a, double b, int K, Side side) {
  using cplx = std::complex<double>;
  const double sign = side == Side::Major ? 1.0 : -1.0;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<cplx> out(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double fejer = 1.0 - static_cast<double>(k) / (K + 1);
    const cplx ea = std::polar(1.0, -two_pi * k * a);
    const cplx eb = std::polar(1.0, -two_pi * k * b);
    cplx c = sign * fejer / (2.0 * (K + 1)) * (ea + eb);
    if (k == 0) {
      c += b - a;
    } else {
      // v_k = -J(k/(K+1)) / (2 pi i k), and v_{-k} = conj(v_k).
      const cplx vk = -vaaler_weight(static_cast<double>(k) / (K + 1)) / cplx(0.0, two_pi * k);
      c += std::conj(vk) * ea + vk * eb;
    }
    out[k] = c;
  }
  return out;
}

inline void check_interval(double lo, double hi) {
  if (!(lo >= 0.0 && lo <= hi && hi <= std::numbers::pi)) {
    throw ArgumentError("interval must satisfy 0 <= lo <= hi <= pi");
  }
}

}  // namespace detail

/// Degree-M cosine polynomial F with F <= 1_I (minor) or F >= 1_I (major) on
/// [0, pi]. The even set [-hi, -lo] U [lo, hi] of R/2piZ is covered by one or
/// two arcs, and the resulting even polynomial is read off in cos(m theta).
inline CosinePolynomial selberg_polynomial(double lo, double hi, int M, Side side) {
  detail::check_interval(lo, hi);
  if (M < 1) throw ArgumentError("selberg_polynomial: M must be >= 1");
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::vector<std::complex<double>>> arcs;
  const bool touches_zero = lo == 0.0;
  const bool touches_pi = hi == std::numbers::pi;
  if (touches_zero && touches_pi) {
    arcs.push_back(detail::selberg_arc(0.0, 1.0, M, side));
  } else if (touches_zero) {
    arcs.push_back(detail::selberg_arc(-hi / two_pi, hi / two_pi, M, side));
  } else if (touches_pi) {
    arcs.push_back(detail::selberg_arc(lo / two_pi, 1.0 - lo / two_pi, M, side));
  } else {
    arcs.push_back(detail::selberg_arc(lo / two_pi, hi / two_pi, M, side));
    arcs.push_back(detail::selberg_arc(-hi / two_pi, -lo / two_pi, M, side));
  }
  CosinePolynomial poly{std::vector<double>(M + 1, 0.0)};
  for (const auto& arc : arcs) {
    // Real part of the symmetric sum: c_0 = S^(0), c_m = S^(m) + S^(-m).
    poly.coeffs[0] += arc[0].real();
    for (int m = 1; m <= M; ++m) poly.coeffs[m] += 2.0 * arc[m].real();
  }
  return poly;
}

/// Two-dimensional sandwich for 1_I(theta) 1_I'(theta'):
///   major = F+_I (x) F+_I',  minor = F-_I (x) F+_I' + F+_I (x) F-_I' - F+_I (x) F+_I'.
inline CosinePolynomial2D selberg_polynomial_2d(double lo, double hi, double lo_p, double hi_p, int M, Side side) {
  const auto plus = selberg_polynomial(lo, hi, M, Side::Major);
  const auto plus_p = selberg_polynomial(lo_p, hi_p, M, Side::Major);
  CosinePolynomial2D out{M, std::vector<double>(static_cast<std::size_t>(M + 1) * (M + 1), 0.0)};
  if (side == Side::Major) {
    for (int m = 0; m <= M; ++m)
      for (int mp = 0; mp <= M; ++mp) out.at(m, mp) = plus.coeffs[m] * plus_p.coeffs[mp];
    return out;
  }
  const auto minus = selberg_polynomial(lo, hi, M, Side::Minor);
  const auto minus_p = selberg_polynomial(lo_p, hi_p, M, Side::Minor);
  for (int m = 0; m <= M; ++m) {
    for (int mp = 0; mp <= M; ++mp) {
      out.at(m, mp) = minus.coeffs[m] * plus_p.coeffs[mp] + plus.coeffs[m] * minus_p.coeffs[mp] -
                      plus.coeffs[m] * plus_p.coeffs[mp];
    }
  }
  return out;
}

}  // namespace stlaws
