#pragma once

#include <openssl/sha.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stlaws/arith.hpp"
#include "stlaws/parallel.hpp"

namespace stlaws {

struct ShortForm {
  Rational A;
  Rational B;
};

/// E^Cl_lambda : y^2 = (x - 1)(x^2 + lambda).
struct ClausenForm {
  Rational lambda;
};

/// Cubic coefficients reduced mod a good prime p.
struct ReducedCubic {
  std::uint64_t p;
  std::uint64_t a2, a4, a6;
};

/// Elliptic curve over Q in the model y^2 = x^3 + a2 x^2 + a4 x + a6.
class WeierstrassCurve {
 public:
  using Form = std::variant<ShortForm, ClausenForm>;

  static WeierstrassCurve short_form(const Rational& A, const Rational& B) {
    return WeierstrassCurve(ShortForm{A, B}, Rational(0), A, B);
  }

  static WeierstrassCurve clausen(const Rational& lambda) {
    if (lambda == Rational(0) || lambda == Rational(-1)) {
      throw ArgumentError("Clausen curve is singular at lambda = " + lambda.to_string());
    }
    // (x - 1)(x^2 + lambda) = x^3 - x^2 + lambda x - lambda
    return WeierstrassCurve(ClausenForm{lambda}, Rational(-1), lambda, -lambda);
  }

  /// "A,B" for y^2 = x^3 + Ax + B, "clausen:lambda" for E^Cl_lambda, or
  /// "k3clausen:lambda" for E^Cl_{-lambda/(lambda+1)}, the curve behind X_lambda.
  static WeierstrassCurve parse(std::string_view spec) {
    constexpr std::string_view prefix = "clausen:";
    constexpr std::string_view k3_prefix = "k3clausen:";
    if (spec.substr(0, prefix.size()) == prefix) return clausen(Rational::parse(spec.substr(prefix.size())));
    if (spec.substr(0, k3_prefix.size()) == k3_prefix) {
      const auto lambda = Rational::parse(spec.substr(k3_prefix.size()));
      require_k3_parameter(lambda);
      return clausen(-lambda / (lambda + Rational(1)));
    }
    const auto comma = spec.find(',');
    if (comma == std::string_view::npos) {
      throw ArgumentError("curve must be 'A,B', 'clausen:lambda' or 'k3clausen:lambda', got '" + std::string(spec) + "'");
    }
    return short_form(Rational::parse(spec.substr(0, comma)), Rational::parse(spec.substr(comma + 1)));
  }

  const Form& form() const { return form_; }
  const Rational& a2() const { return a2_; }
  const Rational& a4() const { return a4_; }
  const Rational& a6() const { return a6_; }

  /// 16 * disc(x^3 + a2 x^2 + a4 x + a6).
  const Rational& discriminant() const { return disc_; }
  /// Primes dividing the discriminant or a coefficient denominator, plus 2.
  const std::vector<std::uint64_t>& disc_support() const { return support_; }
  const Rational& j_invariant() const { return j_; }

  bool is_bad(std::uint64_t p) const {
    return std::binary_search(support_.begin(), support_.end(), p);
  }

  /// Product of the disc_support primes; stands in for the conductor.
  double conductor_surrogate() const {
    double n = 1.0;
    for (auto q : support_) n *= static_cast<double>(q);
    return n;
  }

  std::string canonical() const {
    if (const auto* c = std::get_if<ClausenForm>(&form_)) return "clausen:" + c->lambda.to_string();
    const auto& s = std::get<ShortForm>(form_);
    return s.A.to_string() + "," + s.B.to_string();
  }

  std::array<std::uint8_t, 32> fingerprint() const {
    const std::string text = "stlaws-curve-v1:" + canonical();
    std::array<std::uint8_t, 32> digest{};
    SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest.data());
    return digest;
  }

  ReducedCubic reduce(std::uint64_t p) const {
    return {p, rational_mod(a2_, p), rational_mod(a4_, p), rational_mod(a6_, p)};
  }

  friend bool operator==(const WeierstrassCurve& a, const WeierstrassCurve& b) {
    return a.canonical() == b.canonical();
  }

 private:
  WeierstrassCurve(Form form, Rational a2, Rational a4, Rational a6)
      : form_(std::move(form)), a2_(a2), a4_(a4), a6_(a6) {
    const Rational& b = a2_;
    const Rational& c = a4_;
    const Rational& d = a6_;
    const Rational cubic_disc = b * b * c * c - Rational(4) * c * c * c - Rational(4) * b * b * b * d -
                                Rational(27) * d * d + Rational(18) * b * c * d;
    if (cubic_disc == Rational(0)) throw ArgumentError("singular curve " + canonical());
    disc_ = Rational(16) * cubic_disc;

    std::vector<std::uint64_t> support{2};
    auto add_primes = [&](std::int64_t n) {
      const std::uint64_t mag = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
      if (mag <= 1) return;
      for (auto [q, e] : factorize(mag)) support.push_back(q);
    };
    add_primes(disc_.num());
    add_primes(disc_.den());
    for (const Rational* r : {&a2_, &a4_, &a6_}) add_primes(r->den());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    support_ = std::move(support);

    // Complete the cube: x -> x - b/3 gives x^3 + A x + B.
    const Rational A = c - b * b / Rational(3);
    const Rational B = d - b * c / Rational(3) + Rational(2) * b * b * b / Rational(27);
    const Rational four_a3 = Rational(4) * A * A * A;
    j_ = Rational(1728) * four_a3 / (four_a3 + Rational(27) * B * B);
  }

  Form form_;
  Rational a2_, a4_, a6_;
  Rational disc_;
  std::vector<std::uint64_t> support_;
  Rational j_;
};

inline WeierstrassCurve clausen_curve(const Rational& lambda) { return WeierstrassCurve::clausen(lambda); }

/// The Clausen curve whose squared trace drives the K3 surface X_lambda:
/// E^Cl at -lambda/(lambda+1).
inline WeierstrassCurve k3_clausen_curve(const Rational& lambda) {
  require_k3_parameter(lambda);
  return clausen_curve(-lambda / (lambda + Rational(1)));
}

inline Rational j_invariant(const WeierstrassCurve& curve) { return curve.j_invariant(); }

// ---------------------------------------------------------------------------
// Frobenius traces

/// Trace data at one prime. a_p and theta are meaningful only when good.
struct TraceRecord {
  std::uint64_t p = 0;
  bool good = false;
  std::int64_t a_p = 0;
  double theta = 0.0;

  /// a_p / sqrt(p) = 2 cos(theta).
  double normalized() const { return static_cast<double>(a_p) / std::sqrt(static_cast<double>(p)); }

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline TraceRecord make_good_record(std::uint64_t p, std::int64_t a_p) {
  const double x = static_cast<double>(a_p) / (2.0 * std::sqrt(static_cast<double>(p)));
  if (std::abs(x) >= 1.0) {
    throw NumericError("Hasse bound violated: a_" + std::to_string(p) + " = " + std::to_string(a_p));
  }
  return {p, true, a_p, std::acos(x)};
}

namespace detail {

/// -sum_x phi_p(x^3 + a2 x^2 + a4 x + a6), evaluating the cubic by forward
/// differences. `qr` must already be built for p.
inline std::int64_t trace_from_cubic(const ReducedCubic& f, const QrTable& qr) {
  const std::uint64_t p = f.p;
  const std::uint8_t* res = qr.raw().data();
  auto add = [p](std::uint64_t a, std::uint64_t b) {
    const std::uint64_t s = a + b;
    return s >= p ? s - p : s;
  };
  std::uint64_t value = f.a6;                         // f(0)
  std::uint64_t d1 = add(add(1 % p, f.a2), f.a4);     // f(1) - f(0)
  std::uint64_t d2 = add(6 % p, add(f.a2, f.a2));     // second difference at 0
  const std::uint64_t d3 = 6 % p;
  std::int64_t residues = 0;
  std::int64_t zeros = 0;
  for (std::uint64_t x = 0; x < p; ++x) {
    residues += res[value];
    zeros += (value == 0);
    value = add(value, d1);
    d1 = add(d1, d2);
    d2 = add(d2, d3);
  }
  // sum phi = residues - nonresidues, nonresidues = p - residues - zeros
  const std::int64_t sum = 2 * residues + zeros - static_cast<std::int64_t>(p);
  return -sum;
}

}  // namespace detail

inline TraceRecord frobenius_trace(const WeierstrassCurve& curve, std::uint64_t p) {
  if (!is_prime(p)) throw ArgumentError("frobenius_trace: " + std::to_string(p) + " is not prime");
  if (p == 2 || curve.is_bad(p)) return {p, false, 0, 0.0};
  const QrTable qr(p);
  return make_good_record(p, detail::trace_from_cubic(curve.reduce(p), qr));
}

struct TraceSweep {
  std::uint64_t X = 0;
  std::vector<TraceRecord> records;  // one per prime <= X, ascending

  std::size_t good_count() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.good; }));
  }
  friend bool operator==(const TraceSweep&, const TraceSweep&) = default;
};

inline constexpr std::uint64_t kMaxSweepBound = std::uint64_t{1} << 31;

/// Traces for the given primes (ascending), sharded over `workers` threads.
inline std::vector<TraceRecord> trace_records(const WeierstrassCurve& curve, const std::vector<std::uint64_t>& primes,
                                              unsigned workers) {
  std::vector<TraceRecord> out(primes.size());
  parallel_chunks(primes.size(), workers, 256, [&](std::size_t begin, std::size_t end) {
    QrTable qr;
    for (std::size_t i = begin; i < end; ++i) {
      const auto p = primes[i];
      if (p == 2 || curve.is_bad(p)) {
        out[i] = {p, false, 0, 0.0};
        continue;
      }
      qr.rebuild(p);
      out[i] = make_good_record(p, detail::trace_from_cubic(curve.reduce(p), qr));
    }
  });
  return out;
}

inline TraceSweep trace_sweep(const WeierstrassCurve& curve, std::uint64_t X, unsigned workers = default_workers()) {
  if (X > kMaxSweepBound) throw ArgumentError("trace_sweep: bound exceeds 2^31");
  if (X < 2) return {X, {}};
  return {X, trace_records(curve, sieve_primes(X).primes, workers)};
}

inline TraceSweep trace_sweep(const WeierstrassCurve& curve, const PrimeTable& table,
                              unsigned workers = default_workers()) {
  if (table.limit > kMaxSweepBound) throw ArgumentError("trace_sweep: bound exceeds 2^31");
  return {table.limit, trace_records(curve, table.primes, workers)};
}

/// Extends an existing sweep to a larger bound, computing only new primes.
inline TraceSweep extend_sweep(const WeierstrassCurve& curve, TraceSweep sweep, std::uint64_t X,
                               unsigned workers = default_workers()) {
  if (X <= sweep.X) return sweep;
  if (X > kMaxSweepBound) throw ArgumentError("trace_sweep: bound exceeds 2^31");
  std::vector<std::uint64_t> fresh;
  for (auto p : sieve_primes(X).primes) {
    if (p > sweep.X) fresh.push_back(p);
  }
  auto more = trace_records(curve, fresh, workers);
  sweep.records.insert(sweep.records.end(), more.begin(), more.end());
  sweep.X = X;
  return sweep;
}

/// The sub-sweep of records with p <= bound.
inline TraceSweep truncate_sweep(const TraceSweep& sweep, std::uint64_t bound) {
  TraceSweep out{std::min(bound, sweep.X), {}};
  for (const auto& r : sweep.records) {
    if (r.p > bound) break;
    out.records.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace cache: "STC1" | 32-byte fingerprint | X (u64 LE) | records
// record = p (u64 LE) | a_p (i64 LE) | good (u8)

struct TraceCache {
  std::array<std::uint8_t, 32> fingerprint{};
  TraceSweep sweep;
};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(bytes.data(), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw ArgumentError("trace cache truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline void write_trace_cache(const std::string& path, const WeierstrassCurve& curve, const TraceSweep& sweep) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot open trace cache for writing: " + path);
  out.write("STC1", 4);
  const auto fp = curve.fingerprint();
  out.write(reinterpret_cast<const char*>(fp.data()), fp.size());
  detail::put_u64(out, sweep.X);
  for (const auto& r : sweep.records) {
    detail::put_u64(out, r.p);
    detail::put_u64(out, static_cast<std::uint64_t>(r.good ? r.a_p : 0));
    out.put(static_cast<char>(r.good ? 1 : 0));
  }
  if (!out) throw NumericError("failed writing trace cache: " + path);
}

inline TraceCache read_trace_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open trace cache: " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::string_view(magic.data(), 4) != "STC1") throw ArgumentError("not a trace cache (bad magic): " + path);
  TraceCache cache;
  in.read(reinterpret_cast<char*>(cache.fingerprint.data()), cache.fingerprint.size());
  cache.sweep.X = detail::get_u64(in);
  for (;;) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    const auto p = detail::get_u64(in);
    const auto a = static_cast<std::int64_t>(detail::get_u64(in));
    const int good = in.get();
    if (good == std::char_traits<char>::eof()) throw ArgumentError("trace cache truncated");
    cache.sweep.records.push_back(good ? make_good_record(p, a) : TraceRecord{p, false, 0, 0.0});
  }
  return cache;
}

// ---------------------------------------------------------------------------
// Complex multiplication

struct CMData {
  bool has_cm = false;
  std::int64_t D_K = 0;
  std::optional<int> T;  // period of phi_p(lambda + 1); Clausen table entries only

  friend bool operator==(const CMData&, const CMData&) = default;
};

/// CM data of E^Cl_{-lambda/(lambda+1)}, keyed by the K3 parameter lambda.
inline CMData clausen_cm_data(const Rational& lambda) {
  struct Entry {
    Rational lambda;
    int T;
    std::int64_t D_K;
  };
  static const Entry table[] = {
      {Rational(8), 1, -4},      {Rational(1, 8), 8, -4},  {Rational(1), 8, -8},       {Rational(-4), 6, -3},
      {Rational(-1, 4), 12, -3}, {Rational(-64), 14, -7}, {Rational(-1, 64), 28, -7},
  };
  for (const auto& e : table) {
    if (e.lambda == lambda) return {true, e.D_K, e.T};
  }
  return {};
}

/// Heuristic CM screen: a discriminant D passes when a_p = 0 at every good
/// p <= pmax inert in Q(sqrt D). Reports CM only if exactly one D passes and
/// the overall fraction of vanishing traces lies in [0.4, 0.6].
inline CMData cm_detect(const TraceSweep& sweep, std::uint64_t pmax) {
  if (pmax < 1000) throw ArgumentError("cm_detect: pmax must be >= 1000");
  if (sweep.X < pmax) throw ArgumentError("cm_detect: sweep shorter than pmax");
  std::size_t good = 0;
  std::size_t zeros = 0;
  for (const auto& r : sweep.records) {
    if (r.p > pmax) break;
    if (!r.good) continue;
    ++good;
    zeros += (r.a_p == 0);
  }
  std::optional<std::int64_t> found;
  int passing = 0;
  for (auto D : kCmDiscriminants) {
    bool ok = true;
    std::size_t inert = 0;
    for (const auto& r : sweep.records) {
      if (r.p > pmax) break;
      if (!r.good || kronecker(D, r.p) != -1) continue;
      ++inert;
      if (r.a_p != 0) {
        ok = false;
        break;
      }
    }
    if (ok && inert > 0) {
      ++passing;
      found = D;
    }
  }
  const double fraction = good == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(good);
  if (passing == 1 && fraction >= 0.4 && fraction <= 0.6) return {true, *found, std::nullopt};
  return {};
}

inline CMData cm_detect(const WeierstrassCurve& curve, std::uint64_t pmax = 10000,
                        unsigned workers = default_workers()) {
  if (pmax < 1000) throw ArgumentError("cm_detect: pmax must be >= 1000");
  return cm_detect(trace_sweep(curve, pmax, workers), pmax);
}

}  // namespace stlaws
