#pragma once

// Limiting laws of Frobenius angles and of K3 / double-quadric traces:
// continuous densities, point masses, CDFs and interval measures.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "stlaws/arith.hpp"
#include "stlaws/quadrature.hpp"

namespace stlaws {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi].
class Interval {
 public:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw ArgumentError("interval requires lo <= hi");
  }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double length() const { return hi_ - lo_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }

  static Interval full_angle() { return {0.0, kPi}; }

 private:
  double lo_;
  double hi_;
};

inline void require_angle_interval(const Interval& I) {
  if (I.lo() < 0.0 || I.hi() > kPi) throw ArgumentError("angle interval must lie in [0, pi]");
}

enum class LawTag {
  SemicircleST,  // (2/pi) sin^2 on [0, pi]
  CMAngle,       // 1/(2 pi) on [0, pi] + 1/2 at pi/2
  Batman,        // B(t) / (4 pi) on [-3, 3]
  SqrtK3,        // (1/2pi) sqrt((3-t)/(1+t)) on [-1, 3]
  FlyingBatman,  // B_1 + 1/4 at -1 and +1
  ArcK3Plus,     // 1/(2pi sqrt(3+2t-t^2)) on [-1, 3] + 1/2 at +1
  ArcK3Minus,    // same density + 1/2 at -1
  C1,
  C2Atom,      // C_2 + 1/2 at 0
  C3Atom,      // C_3 + 3/4 at 0
  C3TwinAtom,  // 2 C_3 + 1/2 at 0
};

inline constexpr std::array<LawTag, 11> kAllLaws = {
    LawTag::SemicircleST, LawTag::CMAngle,    LawTag::Batman, LawTag::SqrtK3, LawTag::FlyingBatman, LawTag::ArcK3Plus,
    LawTag::ArcK3Minus,   LawTag::C1,         LawTag::C2Atom, LawTag::C3Atom, LawTag::C3TwinAtom};

inline std::string law_name(LawTag tag) {
  switch (tag) {
    case LawTag::SemicircleST: return "semicircle-st";
    case LawTag::CMAngle: return "cm-angle";
    case LawTag::Batman: return "batman";
    case LawTag::SqrtK3: return "sqrt-k3";
    case LawTag::FlyingBatman: return "flying-batman";
    case LawTag::ArcK3Plus: return "arc-k3-plus";
    case LawTag::ArcK3Minus: return "arc-k3-minus";
    case LawTag::C1: return "c1";
    case LawTag::C2Atom: return "c2-atom";
    case LawTag::C3Atom: return "c3-atom";
    case LawTag::C3TwinAtom: return "c3-twin-atom";
  }
  return "unknown";
}

inline LawTag parse_law(std::string_view name) {
  for (auto tag : kAllLaws) {
    if (law_name(tag) == name) return tag;
  }
  throw ArgumentError("unknown law '" + std::string(name) + "'");
}

struct Atom {
  double location;
  Rational mass;
};

struct Law {
  LawTag tag;
  Interval support;
  std::vector<Atom> atoms;
  std::vector<double> singular_points;  // density is +inf here (inside or on the support)

  std::string name() const { return law_name(tag); }
  double atom_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.mass.to_double();
    return m;
  }
};

inline Law make_law(LawTag tag) {
  const Rational quarter(1, 4), half(1, 2), three_quarters(3, 4);
  switch (tag) {
    case LawTag::SemicircleST: return {tag, {0.0, kPi}, {}, {}};
    case LawTag::CMAngle: return {tag, {0.0, kPi}, {{kPi / 2, half}}, {}};
    case LawTag::Batman: return {tag, {-3.0, 3.0}, {}, {-1.0, 1.0}};
    case LawTag::SqrtK3: return {tag, {-1.0, 3.0}, {}, {-1.0}};
    case LawTag::FlyingBatman: return {tag, {-3.0, 3.0}, {{-1.0, quarter}, {1.0, quarter}}, {-3.0, -1.0, 1.0, 3.0}};
    case LawTag::ArcK3Plus: return {tag, {-1.0, 3.0}, {{1.0, half}}, {-1.0, 3.0}};
    case LawTag::ArcK3Minus: return {tag, {-1.0, 3.0}, {{-1.0, half}}, {-1.0, 3.0}};
    case LawTag::C1: return {tag, {-4.0, 4.0}, {}, {0.0}};
    case LawTag::C2Atom: return {tag, {-4.0, 4.0}, {{0.0, half}}, {0.0}};
    case LawTag::C3Atom: return {tag, {-4.0, 4.0}, {{0.0, three_quarters}}, {0.0}};
    case LawTag::C3TwinAtom: return {tag, {-4.0, 4.0}, {{0.0, half}}, {0.0}};
  }
  throw ArgumentError("unknown law tag");
}

// ---------------------------------------------------------------------------
// Raw display functions

/// The unnormalized Batman function B on [-3, 3]; integrates to 4 pi.
inline double batman_raw(double x) {
  const double ax = std::abs(x);
  if (ax > 3.0) return 0.0;
  if (ax == 1.0) return kInf;
  // (3 + x)/sqrt(3 - 2x - x^2) = sqrt((3 + x)/(1 - x)), and symmetrically.
  if (ax < 1.0) return std::sqrt((3.0 + x) / (1.0 - x)) + std::sqrt((3.0 - x) / (1.0 + x));
  return std::sqrt((3.0 - ax) / (1.0 + ax));
}

/// 1/(4pi sqrt(3 + 2t - t^2)) summed over t and -t: the flying Batman B_1.
inline double flying_batman_raw(double x) {
  const double ax = std::abs(x);
  if (ax > 3.0) return 0.0;
  if (ax == 1.0 || ax == 3.0) return kInf;
  auto arm = [](double t) { return 1.0 / (4.0 * kPi * std::sqrt((3.0 - t) * (1.0 + t))); };
  if (ax < 1.0) return arm(x) + arm(-x);
  return arm(ax);
}

inline double sqrt_k3_density(double t) {
  if (t < -1.0 || t > 3.0) return 0.0;
  if (t == -1.0) return kInf;
  return std::sqrt((3.0 - t) / (1.0 + t)) / (2.0 * kPi);
}

inline double arc_k3_density(double t) {
  if (t < -1.0 || t > 3.0) return 0.0;
  if (t == -1.0 || t == 3.0) return kInf;
  return 1.0 / (2.0 * kPi * std::sqrt((3.0 - t) * (1.0 + t)));
}

/// Kernels C_1, C_2, C_3 of the double-quadric laws:
///   C_k(t) = c_k int_{|t|/2}^{2} (1/u) (1 - (u/2)^2)^alpha (1 - (|t|/2u)^2)^beta du
/// with (c, alpha, beta) = (2/pi^2, 1/2, 1/2), (1/(2pi^2), 1/2, -1/2),
/// (1/(8pi^2), -1/2, -1/2). The range is split at u = sqrt|t|; the lower half
/// is mapped by u -> |t|/u onto the upper one, and u = 2 sin(psi) removes the
/// square-root endpoint at u = 2. Zero for |t| >= 4, +inf at t = 0.
inline double c_kernel(int k, double t) {
  if (k < 1 || k > 3) throw ArgumentError("c_kernel: k must be 1, 2 or 3");
  const double s = std::abs(t);
  if (s >= 4.0) return 0.0;
  if (s == 0.0) return kInf;
  double scale = 0.0, alpha = 0.0, beta = 0.0;
  switch (k) {
    case 1: scale = 2.0 / (kPi * kPi), alpha = 0.5, beta = 0.5; break;
    case 2: scale = 1.0 / (2.0 * kPi * kPi), alpha = 0.5, beta = -0.5; break;
    default: scale = 1.0 / (8.0 * kPi * kPi), alpha = -0.5, beta = -0.5; break;
  }
  auto factor = [](double y, double power) {
    const double base = 1.0 - y * y;
    return power > 0 ? std::sqrt(base) : 1.0 / std::sqrt(base);
  };
  // After u = 2 sin(psi): du/u = cot(psi) dpsi and 1 - (u/2)^2 = cos^2(psi).
  auto integrand = [&](double psi) {
    const double c = std::cos(psi);
    const double sn = std::sin(psi);
    const double y = s / (4.0 * sn);  // |t| / (2u)
    const double upper = std::pow(c, 2.0 * alpha + 1.0) / sn * factor(y, beta);
    const double lower = std::pow(c, 2.0 * beta + 1.0) / sn * factor(y, alpha);
    return upper + lower;
  };
  const double psi0 = std::asin(std::sqrt(s) / 2.0);
  quad::Options opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-12;
  return scale * quad::integrate(integrand, psi0, kPi / 2, opt).value;
}

// ---------------------------------------------------------------------------
// Densities

/// Continuous part of the law's density; +inf at singular abscissae, 0 off
/// the support. Atoms are not included.
inline double density(const Law& law, double t) {
  const auto& I = law.support;
  if (t < I.lo() || t > I.hi()) return 0.0;
  if (std::find(law.singular_points.begin(), law.singular_points.end(), t) != law.singular_points.end()) return kInf;
  switch (law.tag) {
    case LawTag::SemicircleST: return 2.0 / kPi * std::sin(t) * std::sin(t);
    case LawTag::CMAngle: return 1.0 / (2.0 * kPi);
    case LawTag::Batman: return batman_raw(t) / (4.0 * kPi);
    case LawTag::SqrtK3: return sqrt_k3_density(t);
    case LawTag::FlyingBatman: return flying_batman_raw(t);
    case LawTag::ArcK3Plus:
    case LawTag::ArcK3Minus: return arc_k3_density(t);
    case LawTag::C1: return c_kernel(1, t);
    case LawTag::C2Atom: return c_kernel(2, t);
    case LawTag::C3Atom: return c_kernel(3, t);
    case LawTag::C3TwinAtom: return 2.0 * c_kernel(3, t);
  }
  return 0.0;
}

/// Integral of the continuous density over [lo, hi], split at singular
/// points with an endpoint-flattening substitution on each piece.
inline double integrate_density(const Law& law, double lo, double hi, const quad::Options& opt = {}) {
  lo = std::max(lo, law.support.lo());
  hi = std::min(hi, law.support.hi());
  if (!(lo < hi)) return 0.0;
  std::vector<double> cuts{lo};
  for (double s : law.singular_points) {
    if (s > lo && s < hi) cuts.push_back(s);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += quad::integrate_endpoint_singular([&](double t) { return density(law, t); }, cuts[i], cuts[i + 1], opt)
                 .value;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Distribution functions

namespace detail {

/// CDF of t = 1 + 2 cos(psi) with psi Haar-distributed on SO(3), i.e. of the
/// density (1/2pi) sqrt((3 - t)/(1 + t)) on [-1, 3].
inline double so3_trace_cdf(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 3.0) return 1.0;
  const double psi0 = std::acos((t - 1.0) / 2.0);
  return (kPi - psi0 + std::sin(psi0)) / kPi;
}

/// CDF of t = 1 + 2 cos(psi) with psi uniform on [0, pi]: the arcsine law with
/// density 1/(pi sqrt(3 + 2t - t^2)) on [-1, 3].
inline double arcsine_trace_cdf(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 3.0) return 1.0;
  return (kPi - std::acos((t - 1.0) / 2.0)) / kPi;
}

enum class Factor { SatoTate, UniformAngle };

/// P(2|cos theta| <= v) for one factor law.
inline double abs_trace_cdf(Factor f, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 2.0) return 1.0;
  const double phi = std::acos(v / 2.0);
  const double arc = kPi - 2.0 * phi;
  return f == Factor::SatoTate ? (arc + std::sin(2.0 * phi)) / kPi : arc / kPi;
}

/// P(|a a'| <= s) for independent a = 2cos(theta), a' = 2cos(theta'). The
/// outer variable runs over theta in [0, pi/2] (|a| = 2cos(theta)) with
/// weight (4/pi) sin^2 (Sato-Tate) or 2/pi (uniform angle).
inline double abs_product_cdf(Factor outer, Factor inner, double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 4.0) return 1.0;
  // Weight primitive W(theta) on [0, pi/2].
  auto primitive = [outer](double th) {
    return outer == Factor::SatoTate ? (2.0 / kPi) * (th - 0.5 * std::sin(2.0 * th)) : 2.0 * th / kPi;
  };
  auto weight = [outer](double th) {
    return outer == Factor::SatoTate ? (4.0 / kPi) * std::sin(th) * std::sin(th) : 2.0 / kPi;
  };
  // For theta >= theta_s we have |a| <= s/2, so the inner CDF is 1 there.
  const double theta_s = std::acos(s / 4.0);
  const double tail = primitive(kPi / 2) - primitive(theta_s);
  // theta = theta_s (1 - r^2) keeps the square-root kink at theta_s smooth.
  auto body = [&](double r) {
    const double th = theta_s * (1.0 - r * r);
    const double inner_v = s / (2.0 * std::cos(th));
    return weight(th) * abs_trace_cdf(inner, inner_v) * 2.0 * theta_s * r;
  };
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-13;
  return tail + quad::integrate(body, 0.0, 1.0, opt).value;
}

/// CDF of a symmetric continuous product law from P(|Z| <= s).
inline double symmetric_cdf(Factor outer, Factor inner, double t) {
  const double half_mass = 0.5 * abs_product_cdf(outer, inner, std::abs(t));
  return t >= 0 ? 0.5 + half_mass : 0.5 - half_mass;
}

}  // namespace detail

/// Continuous part of the CDF at t (total continuous mass = 1 - atom mass).
inline double continuous_cdf(const Law& law, double t) {
  using detail::Factor;
  switch (law.tag) {
    case LawTag::SemicircleST: {
      const double th = std::clamp(t, 0.0, kPi);
      return (th - 0.5 * std::sin(2.0 * th)) / kPi;
    }
    case LawTag::CMAngle: return std::clamp(t, 0.0, kPi) / (2.0 * kPi);
    case LawTag::SqrtK3: return detail::so3_trace_cdf(t);
    case LawTag::Batman: return 0.5 * (detail::so3_trace_cdf(t) + 1.0 - detail::so3_trace_cdf(-t));
    case LawTag::FlyingBatman:
      return 0.25 * (detail::arcsine_trace_cdf(t) + 1.0 - detail::arcsine_trace_cdf(-t));
    case LawTag::ArcK3Plus:
    case LawTag::ArcK3Minus: return 0.5 * detail::arcsine_trace_cdf(t);
    case LawTag::C1: return detail::symmetric_cdf(Factor::SatoTate, Factor::SatoTate, t);
    case LawTag::C2Atom: return 0.5 * detail::symmetric_cdf(Factor::SatoTate, Factor::UniformAngle, t);
    case LawTag::C3Atom: return 0.25 * detail::symmetric_cdf(Factor::UniformAngle, Factor::UniformAngle, t);
    case LawTag::C3TwinAtom: return 0.5 * detail::symmetric_cdf(Factor::UniformAngle, Factor::UniformAngle, t);
  }
  return 0.0;
}

/// P(X <= t), atoms included.
inline double cdf(const Law& law, double t) {
  double value = continuous_cdf(law, t);
  for (const auto& a : law.atoms) {
    if (a.location <= t) value += a.mass.to_double();
  }
  return value;
}

/// P(X < t).
inline double cdf_left(const Law& law, double t) {
  double value = continuous_cdf(law, t);
  for (const auto& a : law.atoms) {
    if (a.location < t) value += a.mass.to_double();
  }
  return value;
}

/// Law measure of the closed interval [lo, hi].
inline double measure(const Law& law, const Interval& I) { return cdf(law, I.hi()) - cdf_left(law, I.lo()); }

// ---------------------------------------------------------------------------
// Angle measures and predicted main terms

inline double mu_st(const Interval& I) {
  require_angle_interval(I);
  return (I.length() - 0.5 * (std::sin(2.0 * I.hi()) - std::sin(2.0 * I.lo()))) / kPi;
}

inline double mu_cm(const Interval& I) {
  require_angle_interval(I);
  return I.length() / (2.0 * kPi) + (I.contains(kPi / 2) ? 0.5 : 0.0);
}

enum class JointCase {
  BothNonCM,       // mu_ST x mu_ST
  CMWithNonCM,     // mu_CM(I) mu_ST(I'), first curve CM
  BothCMCoprime,   // mu_CM x mu_CM
  BothCMShared,    // (|I||I'|/pi^2 + 1_{pi/2 in I} 1_{pi/2 in I'}) / 2
};

inline double joint_main_term(JointCase c, const Interval& I, const Interval& Ip) {
  require_angle_interval(I);
  require_angle_interval(Ip);
  switch (c) {
    case JointCase::BothNonCM: return mu_st(I) * mu_st(Ip);
    case JointCase::CMWithNonCM: return mu_cm(I) * mu_st(Ip);
    case JointCase::BothCMCoprime: return mu_cm(I) * mu_cm(Ip);
    case JointCase::BothCMShared: {
      const double both = (I.contains(kPi / 2) && Ip.contains(kPi / 2)) ? 1.0 : 0.0;
      return 0.5 * (I.length() * Ip.length() / (kPi * kPi) + both);
    }
  }
  throw ArgumentError("unknown joint case");
}

/// Coefficient of pi(x) in the predicted count of primes p = a mod q with
/// theta_p in I. For CM curves with D_K | q, the residue class decides
/// whether p splits or is inert, which shifts mass to or from pi/2.
inline double ap_main_term(bool cm, const Interval& I, std::uint64_t q, std::uint64_t a, std::int64_t D_K = 0) {
  require_angle_interval(I);
  if (q == 0 || std::gcd(a, q) != 1) throw ArgumentError("ap_main_term: need gcd(a, q) = 1");
  const double phi_q = static_cast<double>(euler_phi(q));
  if (!cm) return mu_st(I) / phi_q;
  if (!is_cm_discriminant(D_K)) throw ArgumentError("ap_main_term: CM case needs a class-number-one discriminant");
  const std::uint64_t abs_d = static_cast<std::uint64_t>(-D_K);
  const bool delta = q % abs_d == 0;
  double value = mu_cm(I);
  if (delta) {
    const int chi = kronecker(D_K, a);
    value += chi * 0.5 * (I.length() / kPi - (I.contains(kPi / 2) ? 1.0 : 0.0));
  }
  return value / phi_q;
}

}  // namespace stlaws
