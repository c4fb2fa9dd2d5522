#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stlaws/errors.hpp"

namespace stlaws {

using i128 = __int128;

namespace detail {

inline std::int64_t narrow_checked(i128 v, const char* what) {
  if (v > static_cast<i128>(INT64_MAX) || v < -static_cast<i128>(INT64_MAX)) {
    throw NumericError(std::string("64-bit overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

inline i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

/// Exact rational number with 64-bit numerator and positive 64-bit denominator,
/// always stored in lowest terms. Arithmetic that would overflow throws
/// NumericError instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num) : num_(num), den_(1) {}  // NOLINT: implicit from integers is intended
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                     static_cast<i128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                     static_cast<i128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ArgumentError("rational division by zero");
    return from_wide(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<i128>(a.num_) * b.den_ < static_cast<i128>(b.num_) * a.den_;
  }

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "n" or "n/d" with optional sign on either part.
  static Rational parse(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
      std::int64_t v = 0;
      if (!s.empty() && s.front() == '+') s.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ArgumentError("malformed rational: '" + std::string(text) + "'");
      }
      return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ArgumentError("zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }

 private:
  static Rational from_wide(i128 num, i128 den) {
    if (den == 0) throw ArgumentError("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const i128 g = detail::gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    Rational r;
    r.num_ = detail::narrow_checked(num, "rational numerator");
    r.den_ = detail::narrow_checked(den, "rational denominator");
    return r;
  }
  void assign(std::int64_t num, std::int64_t den) { *this = from_wide(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

/// Reduces a signed integer into [0, m).
inline std::uint64_t mod_reduce(std::int64_t a, std::uint64_t m) {
  const auto r = static_cast<std::int64_t>(static_cast<i128>(a) % static_cast<i128>(m));
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(m) : r);
}

/// Modular inverse for prime m (Fermat). Caller guarantees gcd(a, m) = 1.
inline std::uint64_t invmod_prime(std::uint64_t a, std::uint64_t m) { return powmod(a, m - 2, m); }

/// Image of a rational in Z/pZ; the denominator must be a unit mod p.
inline std::uint64_t rational_mod(const Rational& r, std::uint64_t p) {
  const auto den = mod_reduce(r.den(), p);
  if (den == 0) throw ArgumentError("denominator of " + r.to_string() + " not invertible mod " + std::to_string(p));
  return mulmod(mod_reduce(r.num(), p), invmod_prime(den, p), p);
}

inline constexpr std::uint64_t kMaxFactorInput = std::uint64_t{1} << 62;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  if (n % 3 == 0) return n == 3;
  for (std::uint64_t d = 5; d <= n / d; d += 6) {
    if (n % d == 0 || n % (d + 2) == 0) return false;
  }
  return true;
}

/// Trial-division factorization into (prime, exponent) pairs, ascending.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  if (n == 0) throw ArgumentError("cannot factor 0");
  if (n > kMaxFactorInput) throw ArgumentError("factorization input exceeds 2^62");
  std::vector<std::pair<std::uint64_t, int>> out;
  auto take = [&](std::uint64_t d) {
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e > 0) out.emplace_back(d, e);
  };
  take(2);
  take(3);
  for (std::uint64_t d = 5; d <= n / d; d += 6) {
    take(d);
    take(d + 2);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

// ---------------------------------------------------------------------------
// Primes

struct PrimeTable {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> primes;

  std::size_t count() const { return primes.size(); }
};

inline constexpr std::uint64_t kMaxSieveLimit = std::uint64_t{1} << 40;

/// Segmented sieve of Eratosthenes over odd numbers.
inline PrimeTable sieve_primes(std::uint64_t limit) {
  if (limit < 2 || limit > kMaxSieveLimit) {
    throw ArgumentError("sieve limit must lie in [2, 2^40], got " + std::to_string(limit));
  }
  PrimeTable table{limit, {2}};
  if (limit < 3) return table;

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
  while (root * root > limit) --root;
  while ((root + 1) * (root + 1) <= limit) ++root;

  // Small odd primes up to sqrt(limit) by a plain sieve.
  std::vector<std::uint8_t> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 3; i <= root; i += 2) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += 2 * i) small[j] = 0;
  }

  table.primes.reserve(static_cast<std::size_t>(1.2 * static_cast<double>(limit) / std::log(static_cast<double>(limit))) + 16);
  constexpr std::uint64_t kSegment = std::uint64_t{1} << 18;  // odd numbers per segment
  std::vector<std::uint8_t> seg(kSegment);
  // Segment covers odd n = lo + 2k, k in [0, kSegment).
  for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSegment) {
    const std::uint64_t hi = std::min(limit, lo + 2 * (kSegment - 1));
    const std::uint64_t len = (hi - lo) / 2 + 1;
    std::fill_n(seg.begin(), len, std::uint8_t{1});
    for (std::uint64_t p : base) {
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t j = (start - lo) / 2; j < len; j += p) seg[j] = 0;
    }
    for (std::uint64_t k = 0; k < len; ++k) {
      if (seg[k]) table.primes.push_back(lo + 2 * k);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Quadratic characters

/// Legendre symbol (a/p) by Euler's criterion.
inline int legendre(std::int64_t a, std::uint64_t p) {
  if (p < 3 || p % 2 == 0) throw ArgumentError("legendre: modulus must be an odd prime, got " + std::to_string(p));
  const auto r = mod_reduce(a, p);
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

/// Quadratic-residue lookup table mod an odd prime p: entry t is 1 iff t is a
/// nonzero square. Built by walking x^2 for x = 1..(p-1)/2 incrementally.
class QrTable {
 public:
  explicit QrTable(std::uint64_t p) { rebuild(p); }
  QrTable() = default;

  void rebuild(std::uint64_t p) {
    if (p < 3 || p % 2 == 0 || p > (std::uint64_t{1} << 31)) {
      throw ArgumentError("qr_table: modulus must be an odd prime <= 2^31, got " + std::to_string(p));
    }
    p_ = p;
    residue_.assign(p, 0);
    std::uint64_t sq = 0;
    for (std::uint64_t x = 1; x <= (p - 1) / 2; ++x) {
      sq += 2 * x - 1;  // x^2 = (x-1)^2 + 2x - 1
      if (sq >= p) sq -= p;
      if (sq >= p) sq -= p;
      residue_[sq] = 1;
    }
  }

  std::uint64_t modulus() const { return p_; }
  bool is_residue(std::uint64_t t) const { return residue_[t % p_] != 0; }
  /// phi_p(t) for t already reduced mod p.
  int chi(std::uint64_t t) const { return t == 0 ? 0 : (residue_[t] ? 1 : -1); }
  const std::vector<std::uint8_t>& raw() const { return residue_; }

 private:
  std::uint64_t p_ = 0;
  std::vector<std::uint8_t> residue_;
};

inline QrTable qr_table(std::uint64_t p) { return QrTable(p); }

// ---------------------------------------------------------------------------
// Squarefree parts and the K3 parameter split

inline std::uint64_t squarefree_part(std::int64_t n) {
  if (n == 0) throw ArgumentError("squarefree_part of 0");
  const std::uint64_t mag = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  std::uint64_t d = 1;
  for (auto [p, e] : factorize(mag)) {
    if (e % 2 == 1) d *= p;
  }
  return d;
}

struct LambdaSplit {
  std::int64_t lambda1 = 0;  // numerator of lambda + 1
  std::int64_t lambda2 = 1;  // positive denominator of lambda + 1
  std::uint64_t q = 1;       // squarefree part of |lambda1 * lambda2|
  bool is_square = false;    // lambda + 1 is a nonzero rational square
};

inline void require_k3_parameter(const Rational& lambda) {
  if (lambda == Rational(0) || lambda == Rational(-1)) {
    throw ArgumentError("lambda must not be 0 or -1, got " + lambda.to_string());
  }
}

inline LambdaSplit lambda_split(const Rational& lambda) {
  require_k3_parameter(lambda);
  const Rational shifted = lambda + Rational(1);
  LambdaSplit s;
  s.lambda1 = shifted.num();
  s.lambda2 = shifted.den();
  const std::int64_t prod = detail::narrow_checked(static_cast<i128>(s.lambda1) * s.lambda2, "lambda1*lambda2");
  s.q = squarefree_part(prod);
  s.is_square = s.lambda1 > 0 && s.q == 1;
  return s;
}

// ---------------------------------------------------------------------------
// Kronecker characters of the class-number-one imaginary quadratic fields

inline constexpr std::int64_t kCmDiscriminants[] = {-3, -4, -7, -8, -11, -19, -43, -67, -163};

inline bool is_cm_discriminant(std::int64_t d) {
  return std::find(std::begin(kCmDiscriminants), std::end(kCmDiscriminants), d) != std::end(kCmDiscriminants);
}

/// Kronecker symbol (D/n) for D one of the nine class-number-one fundamental
/// discriminants; completely multiplicative in n.
inline int kronecker(std::int64_t disc, std::uint64_t n) {
  if (!is_cm_discriminant(disc)) {
    throw ArgumentError("kronecker: unsupported discriminant " + std::to_string(disc));
  }
  if (n == 0) throw ArgumentError("kronecker: n must be positive");
  int result = 1;
  for (auto [p, e] : factorize(n)) {
    int local = 0;
    if (p == 2) {
      const auto r = mod_reduce(disc, 8);
      local = (disc % 2 == 0) ? 0 : ((r == 1 || r == 7) ? 1 : -1);
    } else {
      local = legendre(disc, p);
    }
    if (e % 2 == 0 && local != 0) local = 1;
    result *= local;
    if (result == 0) break;
  }
  return result;
}

}  // namespace stlaws
