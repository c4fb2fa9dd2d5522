#pragma once

// Dirichlet characters mod p, normalized Jacobi sums and the finite-field
// hypergeometric value 3F2(lambda, p). O(p^2) per evaluation: this is the
// reference path used to cross-check the O(p) elliptic-curve route.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "stlaws/arith.hpp"

namespace stlaws {

using cplx = std::complex<double>;

inline std::uint64_t primitive_root(std::uint64_t p) {
  if (p == 2) return 1;
  const auto factors = factorize(p - 1);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool generates = true;
    for (auto [q, e] : factors) {
      if (powmod(g, (p - 1) / q, p) == 1) {
        generates = false;
        break;
      }
    }
    if (generates) return g;
  }
  throw NumericError("no primitive root mod " + std::to_string(p));
}

/// The character group of (Z/pZ)^x. Character j sends g^k to
/// exp(2 pi i j k / (p-1)); every character, including the trivial one,
/// vanishes at 0.
class CharGroup {
 public:
  explicit CharGroup(std::uint64_t p) : p_(p) {
    if (p < 3 || p > 5000 || !is_prime(p)) {
      throw ArgumentError("char_group: need an odd prime in [3, 5000], got " + std::to_string(p));
    }
    g_ = primitive_root(p);
    const std::uint64_t n = p - 1;
    dlog_.assign(p, 0);
    std::uint64_t t = 1;
    for (std::uint64_t k = 0; k < n; ++k) {
      dlog_[t] = static_cast<std::uint32_t>(k);
      t = t * g_ % p;
    }
    roots_.resize(n);
    for (std::uint64_t k = 0; k < n; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      roots_[k] = cplx(std::cos(angle), std::sin(angle));
    }
  }

  std::uint64_t modulus() const { return p_; }
  std::uint64_t order() const { return p_ - 1; }
  std::uint64_t generator() const { return g_; }
  std::uint32_t dlog(std::uint64_t t) const { return dlog_[t % p_]; }
  /// Index of the quadratic character phi_p.
  std::uint64_t quadratic_index() const { return (p_ - 1) / 2; }

  /// chi_j(x) with chi_j(0) = 0 for every j.
  cplx chi(std::uint64_t j, std::int64_t x) const {
    const auto t = mod_reduce(x, p_);
    if (t == 0) return {0.0, 0.0};
    return roots_[(j % order()) * dlog_[t] % order()];
  }

 private:
  std::uint64_t p_;
  std::uint64_t g_ = 0;
  std::vector<std::uint32_t> dlog_;
  std::vector<cplx> roots_;
};

inline CharGroup char_group(std::uint64_t p) { return CharGroup(p); }

/// binom(chi_j, chi_jp) = chi_jp(-1)/p * sum_x chi_j(x) conj(chi_jp(1-x)).
inline cplx normalized_jacobi(const CharGroup& group, std::uint64_t j, std::uint64_t jp) {
  const auto p = group.modulus();
  if (j >= group.order() || jp >= group.order()) throw ArgumentError("character index out of range");
  cplx sum{0.0, 0.0};
  for (std::uint64_t x = 0; x < p; ++x) {
    sum += group.chi(j, static_cast<std::int64_t>(x)) *
           std::conj(group.chi(jp, 1 - static_cast<std::int64_t>(x)));
  }
  return group.chi(jp, -1) * sum / static_cast<double>(p);
}

namespace detail {

inline constexpr double kImagTolerance = 1e-6;

inline double checked_real(cplx value, std::uint64_t p) {
  if (std::abs(value.imag()) > kImagTolerance) {
    throw NumericError("3F2 sum has imaginary part " + std::to_string(value.imag()) + " at p=" + std::to_string(p));
  }
  return value.real();
}

}  // namespace detail

/// Cubes binom(phi chi_j, chi_j)^3 for every j: the lambda-independent part of
/// the 3F2 sum. Lets many lambda values share one O(p^2) precomputation.
class Hypergeometric3F2 {
 public:
  explicit Hypergeometric3F2(const CharGroup& group) : group_(&group) {
    const auto n = group.order();
    const auto half = group.quadratic_index();
    cubes_.resize(n);
    for (std::uint64_t j = 0; j < n; ++j) {
      const cplx b = normalized_jacobi(group, (j + half) % n, j);
      cubes_[j] = b * b * b;
    }
  }

  /// 3F2(lambda, p) for lambda given as a residue; lambda = 0 mod p is rejected.
  double operator()(std::int64_t lambda) const {
    const auto p = group_->modulus();
    if (mod_reduce(lambda, p) == 0) throw ArgumentError("gauss_3f2: lambda = 0 mod " + std::to_string(p));
    cplx sum{0.0, 0.0};
    for (std::uint64_t j = 0; j < cubes_.size(); ++j) sum += cubes_[j] * group_->chi(j, lambda);
    sum *= static_cast<double>(p) / static_cast<double>(p - 1);
    return detail::checked_real(sum, p);
  }

 private:
  const CharGroup* group_;
  std::vector<cplx> cubes_;
};

/// Greene's 3F2(lambda, p) = p/(p-1) sum_chi binom(phi chi, chi)^3 chi(lambda).
inline double gauss_3f2(const CharGroup& group, std::int64_t lambda) {
  const auto p = group.modulus();
  if (p > 2000) throw ArgumentError("gauss_3f2: p must be <= 2000");
  return Hypergeometric3F2(group)(lambda);
}

}  // namespace stlaws
