#pragma once

// Normalized Frobenius traces of the K3 surfaces X_lambda and of the double
// quadric surfaces Z(E, E').

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "stlaws/charsums.hpp"
#include "stlaws/curves.hpp"

namespace stlaws {

/// True when p divides a numerator or denominator of lambda or lambda + 1.
inline bool divides_lambda_data(const Rational& lambda, std::uint64_t p) {
  const Rational shifted = lambda + Rational(1);
  for (std::int64_t v : {lambda.num(), lambda.den(), shifted.num(), shifted.den()}) {
    if (mod_reduce(v, p) == 0) return true;
  }
  return false;
}

/// phi_p(lambda + 1) * ((a_p / sqrt p)^2 - 1), where the record belongs to
/// k3_clausen_curve(lambda). Returns nullopt for primes that must be skipped
/// (bad record, p = 2, or p dividing the lambda data).
inline std::optional<double> k3_trace(const Rational& lambda, std::uint64_t p, const TraceRecord& clausen_record) {
  if (clausen_record.p != p) throw ArgumentError("k3_trace: record is for a different prime");
  if (!clausen_record.good || p < 3 || divides_lambda_data(lambda, p)) return std::nullopt;
  const Rational shifted = lambda + Rational(1);
  const int sign = legendre(shifted.num(), p) * legendre(shifted.den(), p);
  const auto a = static_cast<double>(clausen_record.a_p);
  return sign * (a * a / static_cast<double>(p) - 1.0);
}

/// p * 3F2(-lambda, p) through the character-sum route.
inline double k3_trace_oracle(const Rational& lambda, std::uint64_t p, const CharGroup& group) {
  if (group.modulus() != p) throw ArgumentError("k3_trace_oracle: character group modulus mismatch");
  if (p < 5 || p > 2000) throw ArgumentError("k3_trace_oracle: p must lie in [5, 2000]");
  if (divides_lambda_data(lambda, p)) throw ArgumentError("k3_trace_oracle: p divides lambda data");
  const auto minus_lambda = static_cast<std::int64_t>(rational_mod(-lambda, p));
  return static_cast<double>(p) * gauss_3f2(group, minus_lambda);
}

inline double k3_trace_oracle(const Rational& lambda, std::uint64_t p) {
  return k3_trace_oracle(lambda, p, CharGroup(p));
}

/// a*_E(p) a*_E'(p) for two records at the same good prime.
inline double double_quadric_trace(const TraceRecord& e, const TraceRecord& e_prime) {
  if (e.p != e_prime.p) throw ArgumentError("double_quadric_trace: records at different primes");
  if (!e.good || !e_prime.good) throw ArgumentError("double_quadric_trace: both records must be good");
  return e.normalized() * e_prime.normalized();
}

/// K3 traces over a Clausen sweep, skipping excluded primes.
struct TraceSamples {
  std::vector<std::uint64_t> primes;
  std::vector<double> values;
};

inline TraceSamples k3_samples(const Rational& lambda, const TraceSweep& clausen_sweep) {
  TraceSamples out;
  for (const auto& r : clausen_sweep.records) {
    if (auto t = k3_trace(lambda, r.p, r)) {
      out.primes.push_back(r.p);
      out.values.push_back(*t);
    }
  }
  return out;
}

inline TraceSamples double_quadric_samples(const TraceSweep& e, const TraceSweep& e_prime) {
  if (e.X != e_prime.X || e.records.size() != e_prime.records.size()) {
    throw ArgumentError("double quadric sweeps must share the same bound");
  }
  TraceSamples out;
  for (std::size_t i = 0; i < e.records.size(); ++i) {
    const auto& r = e.records[i];
    const auto& s = e_prime.records[i];
    if (!r.good || !s.good) continue;
    out.primes.push_back(r.p);
    out.values.push_back(double_quadric_trace(r, s));
  }
  return out;
}

}  // namespace stlaws
