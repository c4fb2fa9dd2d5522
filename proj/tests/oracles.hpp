#pragma once

// Slow, independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

inline bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::int64_t mod(std::int64_t a, std::int64_t p) { return ((a % p) + p) % p; }

/// Number of y with y^2 = v mod p, by enumerating squares.
inline std::vector<int> square_roots_count(std::int64_t p) {
  std::vector<int> roots(p, 0);
  for (std::int64_t y = 0; y < p; ++y) ++roots[(y * y) % p];
  return roots;
}

/// a_p = p - #{(x, y) : y^2 = x^3 + a2 x^2 + a4 x + a6} with integer coefficients.
inline std::int64_t brute_trace(std::int64_t a2, std::int64_t a4, std::int64_t a6, std::int64_t p) {
  const auto roots = square_roots_count(p);
  std::int64_t affine = 0;
  for (std::int64_t x = 0; x < p; ++x) {
    const std::int64_t f = mod(mod(mod(x * x, p) * x, p) + mod(a2, p) * mod(x * x, p) + mod(a4, p) * x + a6, p);
    affine += roots[f];
  }
  return p - affine;
}

inline int legendre_by_squares(std::int64_t a, std::int64_t p) {
  a = mod(a, p);
  if (a == 0) return 0;
  for (std::int64_t y = 1; y < p; ++y) {
    if ((y * y) % p == a) return 1;
  }
  return -1;
}

/// Greene's 3F2(lambda) over F_p straight from the definition, with its own
/// generator search and characters chi_j(g^k) = exp(2 pi i jk/(p-1)).
inline double greene_3f2(std::int64_t lambda, std::int64_t p) {
  using cplx = std::complex<double>;
  const std::int64_t n = p - 1;
  std::int64_t g = 2;
  for (;; ++g) {
    std::int64_t x = 1;
    std::int64_t order = 0;
    do {
      x = x * g % p;
      ++order;
    } while (x != 1);
    if (order == n) break;
  }
  std::vector<std::int64_t> log(p, -1);
  for (std::int64_t k = 0, x = 1; k < n; ++k, x = x * g % p) log[x] = k;
  auto chi = [&](std::int64_t j, std::int64_t x) -> cplx {
    x = mod(x, p);
    if (x == 0) return 0.0;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((j * log[x]) % n) / static_cast<double>(n));
  };
  auto binom = [&](std::int64_t a, std::int64_t b) {
    // (A choose B) = B(-1)/p sum_x A(x) conj(B)(1 - x)
    cplx s = 0.0;
    for (std::int64_t x = 0; x < p; ++x) s += chi(a, x) * std::conj(chi(b, 1 - x));
    return chi(b, -1) * s / static_cast<double>(p);
  };
  const std::int64_t half = n / 2;
  cplx total = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const cplx b = binom((half + j) % n, j);
    total += b * b * b * chi(j, lambda);
  }
  return (total * static_cast<double>(p) / static_cast<double>(n)).real();
}

}  // namespace oracle
