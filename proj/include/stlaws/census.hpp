#pragma once

// Prime censuses of Frobenius statistics against their limiting laws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stlaws/curves.hpp"
#include "stlaws/measures.hpp"
#include "stlaws/surfaces.hpp"

namespace stlaws {

inline constexpr double kAtomHitTolerance = 1e-9;
inline constexpr int kHistogramBins = 120;
inline constexpr int kUniformGridPoints = 2048;
inline constexpr std::size_t kMaxQuantilePoints = 65536;

struct LawSelection {
  Law law;
  std::string case_id;
};

/// Limiting law of the K3 traces of X_lambda.
inline LawSelection law_for_lambda(const Rational& lambda) {
  require_k3_parameter(lambda);
  const auto cm = clausen_cm_data(lambda);
  if (cm.has_cm) {
    if (lambda == Rational(8)) return {make_law(LawTag::ArcK3Minus), "k3-cm-minus"};
    if (lambda == Rational(-4) || lambda == Rational(-64)) return {make_law(LawTag::ArcK3Plus), "k3-cm-plus"};
    return {make_law(LawTag::FlyingBatman), "k3-cm-twisted"};
  }
  if (lambda_split(lambda).is_square) return {make_law(LawTag::SqrtK3), "k3-square"};
  return {make_law(LawTag::Batman), "k3-generic"};
}

// ---------------------------------------------------------------------------
// Counting

inline std::uint64_t count_theta(const TraceSweep& sweep, const Interval& I) {
  std::uint64_t n = 0;
  for (const auto& r : sweep.records) n += (r.good && I.contains(r.theta));
  return n;
}

inline std::uint64_t count_theta_ap(const TraceSweep& sweep, const Interval& I, std::uint64_t q, std::uint64_t a) {
  if (q == 0 || std::gcd(a, q) != 1) throw ArgumentError("count_theta_ap: need gcd(a, q) = 1");
  std::uint64_t n = 0;
  for (const auto& r : sweep.records) n += (r.good && r.p % q == a % q && I.contains(r.theta));
  return n;
}

/// Primes bad for either curve are excluded.
inline std::uint64_t count_joint(const TraceSweep& e, const TraceSweep& e_prime, const Interval& I,
                                 const Interval& Ip) {
  if (e.X != e_prime.X || e.records.size() != e_prime.records.size()) {
    throw ArgumentError("count_joint: sweeps have different bounds");
  }
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < e.records.size(); ++i) {
    const auto& r = e.records[i];
    const auto& s = e_prime.records[i];
    n += (r.good && s.good && I.contains(r.theta) && Ip.contains(s.theta));
  }
  return n;
}

// ---------------------------------------------------------------------------
// Discrepancy

struct Discrepancy {
  double value = 1.0;
  bool empty_sample = false;
};

/// Sup-norm distance between the empirical CDF and the law's CDF. Both
/// one-sided limits are compared at every grid point, and the grid holds the
/// atoms, a uniform grid over the support and the sample order statistics.
inline Discrepancy discrepancy(std::span<const double> samples, const Law& law) {
  if (samples.empty()) return {1.0, true};
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  std::vector<double> grid;
  for (const auto& a : law.atoms) grid.push_back(a.location);
  const auto& S = law.support;
  for (int i = 0; i < kUniformGridPoints; ++i) {
    grid.push_back(S.lo() + S.length() * i / (kUniformGridPoints - 1));
  }
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() <= kMaxQuantilePoints) {
    grid.insert(grid.end(), distinct.begin(), distinct.end());
  } else {
    for (std::size_t k = 0; k < kMaxQuantilePoints; ++k) {
      grid.push_back(distinct[k * (distinct.size() - 1) / (kMaxQuantilePoints - 1)]);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double sup = 0.0;
  for (double t : grid) {
    const double cont = continuous_cdf(law, t);
    double below = cont;
    double at_or_below = cont;
    for (const auto& a : law.atoms) {
      if (a.location < t) below += a.mass.to_double();
      if (a.location <= t) at_or_below += a.mass.to_double();
    }
    const auto le = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin()) / n;
    const auto lt = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin()) / n;
    sup = std::max({sup, std::abs(le - at_or_below), std::abs(lt - below)});
  }
  return {std::min(sup, 1.0), false};
}

/// Fraction of samples equal to `location` up to kAtomHitTolerance.
inline double exact_hit_mass(std::span<const double> samples, double location) {
  if (samples.empty()) return 0.0;
  const auto hits = std::count_if(samples.begin(), samples.end(),
                                  [&](double s) { return std::abs(s - location) < kAtomHitTolerance; });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

// ---------------------------------------------------------------------------
// Error envelopes (shapes only; every absolute constant is set to 1)

inline double error_envelope(const std::string& case_id, double x, const std::vector<double>& conductors,
                             double q = 1.0) {
  if (x < 16.0) throw ArgumentError("error_envelope: x must be >= 16");
  auto need = [&](std::size_t k) {
    if (conductors.size() != k) {
      throw ArgumentError("error_envelope: case " + case_id + " needs " + std::to_string(k) + " conductor(s)");
    }
  };
  const double L = std::log(x);
  const double LL = std::log(L);
  if (case_id == "k3-generic" || case_id == "ap-non-cm") {
    need(1);
    return std::pow(x, -1.0 / std::sqrt(q)) + std::log(conductors[0] * q * L) / std::sqrt(L);
  }
  if (case_id == "k3-square") {
    need(1);
    return std::log(conductors[0] * L) / std::sqrt(L);
  }
  if (case_id == "k3-cm-twisted" || case_id == "k3-cm-plus" || case_id == "k3-cm-minus" || case_id == "ap-cm") {
    need(1);
    return std::pow(x, -1.0 / std::sqrt(q)) +
           std::pow(L, 4.5) * std::exp(-L / (std::sqrt(L) + std::log(conductors[0] * q)));
  }
  if (case_id == "dq-both-non-cm") {
    need(2);
    return std::sqrt(std::log(conductors[0] * conductors[1] * LL)) / std::pow(LL, 0.25);
  }
  if (case_id == "dq-one-cm") {
    need(2);  // {non-CM curve, CM curve}
    const double logn = std::log(conductors[0]);
    return std::cbrt(std::pow(logn, 4) * std::log(conductors[1] * L)) / std::pow(L, 1.0 / 6.0);
  }
  if (case_id == "dq-cm-distinct-fields" || case_id == "dq-cm-same-field") {
    need(2);
    return std::exp(-L / (std::sqrt(L) + 3.0 * std::log(conductors[0] * conductors[1])));
  }
  throw ArgumentError("error_envelope: unknown case '" + case_id + "'");
}

// ---------------------------------------------------------------------------
// Reports

struct HistogramBin {
  double lo;
  double hi;
  std::uint64_t count;
};

struct ObservedAtom {
  double location;
  double expected_mass;
  std::uint64_t count;
  double empirical_mass;
};

struct ApSection {
  std::uint64_t q;
  std::uint64_t a;
  double interval_lo;
  double interval_hi;
  std::uint64_t count;
  std::uint64_t pi_x;
  double predicted_coefficient;  // of pi(x)
  double normalized_deviation;   // |count - coefficient pi(x)| / (pi(x)/phi(q))
};

struct CensusReport {
  std::string descriptor;
  std::uint64_t X = 0;
  std::uint64_t n_good = 0;
  LawTag law = LawTag::SemicircleST;
  std::string case_id;
  double discrepancy = 1.0;
  bool empty_sample = false;
  double envelope = 0.0;
  double envelope_ratio = 0.0;
  std::vector<double> conductor_surrogates;
  double q = 1.0;
  std::vector<HistogramBin> histogram;
  std::vector<ObservedAtom> atoms_observed;
  std::uint64_t anomalies = 0;  // samples outside the support, clamped into the edge bins
  std::vector<std::string> notes;
  std::optional<ApSection> ap;
  std::map<std::string, std::string> flags;

  std::uint64_t accounted() const {
    std::uint64_t total = 0;
    for (const auto& b : histogram) total += b.count;
    for (const auto& a : atoms_observed) total += a.count;
    return total;
  }
};

namespace detail {

inline void fill_distribution(CensusReport& report, std::span<const double> samples, const Law& law) {
  report.n_good = samples.size();
  report.law = law.tag;
  const auto d = discrepancy(samples, law);
  report.discrepancy = d.value;
  report.empty_sample = d.empty_sample;
  if (d.empty_sample) report.notes.push_back("empty sample: discrepancy set to 1");

  for (const auto& a : law.atoms) report.atoms_observed.push_back({a.location, a.mass.to_double(), 0, 0.0});
  const auto& S = law.support;
  const double width = S.length() / kHistogramBins;
  report.histogram.clear();
  for (int i = 0; i < kHistogramBins; ++i) {
    report.histogram.push_back({S.lo() + i * width, S.lo() + (i + 1) * width, 0});
  }
  for (double s : samples) {
    bool at_atom = false;
    for (auto& a : report.atoms_observed) {
      if (std::abs(s - a.location) < kAtomHitTolerance) {
        ++a.count;
        at_atom = true;
        break;
      }
    }
    if (at_atom) continue;
    if (s < S.lo() - kAtomHitTolerance || s > S.hi() + kAtomHitTolerance) ++report.anomalies;
    const auto bin = static_cast<int>(std::floor((s - S.lo()) / width));
    ++report.histogram[std::clamp(bin, 0, kHistogramBins - 1)].count;
  }
  for (auto& a : report.atoms_observed) {
    a.empirical_mass = samples.empty() ? 0.0 : static_cast<double>(a.count) / static_cast<double>(samples.size());
  }
  if (report.anomalies > 0) {
    report.notes.push_back(std::to_string(report.anomalies) + " sample(s) outside the law support");
  }
}

inline void fill_envelope(CensusReport& report) {
  report.envelope = error_envelope(report.case_id, static_cast<double>(std::max<std::uint64_t>(report.X, 16)),
                                   report.conductor_surrogates, report.q);
  report.envelope_ratio = report.discrepancy / report.envelope;
  report.notes.push_back("conductor surrogate: product of primes dividing the model discriminant");
}

}  // namespace detail

/// K3 census from a precomputed sweep of k3_clausen_curve(lambda).
inline CensusReport k3_census(const Rational& lambda, const TraceSweep& clausen_sweep) {
  const auto selection = law_for_lambda(lambda);
  const auto curve = k3_clausen_curve(lambda);
  CensusReport report;
  report.descriptor = "K3 X_lambda, lambda=" + lambda.to_string() + " via " + curve.canonical();
  report.X = clausen_sweep.X;
  report.case_id = selection.case_id;
  report.conductor_surrogates = {curve.conductor_surrogate()};
  report.q = static_cast<double>(lambda_split(lambda).q);
  const auto samples = k3_samples(lambda, clausen_sweep);
  detail::fill_distribution(report, samples.values, selection.law);
  if (selection.law.tag == LawTag::Batman) report.notes.push_back("density normalized by 1/(4pi)");
  if (selection.law.support.lo() > -3.0) {
    report.notes.push_back("law supported on [-1,3]; samples below -1 are counted as anomalies");
  }
  detail::fill_envelope(report);
  return report;
}

inline CensusReport k3_census(const Rational& lambda, std::uint64_t X, unsigned workers = default_workers()) {
  require_k3_parameter(lambda);
  if (X < 100) throw ArgumentError("k3_census: X must be >= 100");
  return k3_census(lambda, trace_sweep(k3_clausen_curve(lambda), X, workers));
}

inline constexpr std::uint64_t kDefaultCmPmax = 10000;

struct DqSelection {
  Law law;
  std::string case_id;
  bool swap_for_envelope = false;  // true when the first curve is the CM one
};

inline DqSelection dq_law(const CMData& e, const CMData& e_prime) {
  if (!e.has_cm && !e_prime.has_cm) return {make_law(LawTag::C1), "dq-both-non-cm"};
  if (e.has_cm != e_prime.has_cm) return {make_law(LawTag::C2Atom), "dq-one-cm", e.has_cm};
  if (e.D_K == e_prime.D_K) return {make_law(LawTag::C3TwinAtom), "dq-cm-same-field"};
  return {make_law(LawTag::C3Atom), "dq-cm-distinct-fields"};
}

inline void require_twist_inequivalent(const WeierstrassCurve& e, const WeierstrassCurve& e_prime) {
  if (e.j_invariant() == e_prime.j_invariant()) {
    throw ArgumentError("curves " + e.canonical() + " and " + e_prime.canonical() + " share j = " +
                        e.j_invariant().to_string() +
                        "; twist-equivalent pairs are rejected (the product law needs twist-inequivalent curves)");
  }
}

inline CensusReport dq_census(const WeierstrassCurve& e, const WeierstrassCurve& e_prime, const TraceSweep& sweep_e,
                              const TraceSweep& sweep_e_prime, const CMData& cm_e, const CMData& cm_e_prime) {
  require_twist_inequivalent(e, e_prime);
  const auto selection = dq_law(cm_e, cm_e_prime);
  CensusReport report;
  report.descriptor = "double quadric Z(E,E'), E=" + e.canonical() + ", E'=" + e_prime.canonical();
  report.X = sweep_e.X;
  report.case_id = selection.case_id;
  report.conductor_surrogates = {e.conductor_surrogate(), e_prime.conductor_surrogate()};
  if (selection.swap_for_envelope) std::swap(report.conductor_surrogates[0], report.conductor_surrogates[1]);
  const auto samples = double_quadric_samples(sweep_e, sweep_e_prime);
  detail::fill_distribution(report, samples.values, selection.law);
  auto cm_note = [](const char* name, const CMData& cm) {
    return std::string(name) + (cm.has_cm ? " CM with D_K=" + std::to_string(cm.D_K) : " non-CM") +
           " (heuristic screen)";
  };
  report.notes.push_back(cm_note("E", cm_e));
  report.notes.push_back(cm_note("E'", cm_e_prime));
  detail::fill_envelope(report);
  return report;
}

/// Sweeps used for CM screening: the census sweep itself when long enough.
inline CMData screen_cm(const WeierstrassCurve& curve, const TraceSweep& sweep, unsigned workers) {
  if (sweep.X >= kDefaultCmPmax) return cm_detect(sweep, kDefaultCmPmax);
  return cm_detect(curve, kDefaultCmPmax, workers);
}

inline CensusReport dq_census(const WeierstrassCurve& e, const WeierstrassCurve& e_prime, std::uint64_t X,
                              unsigned workers = default_workers()) {
  require_twist_inequivalent(e, e_prime);
  const auto primes = sieve_primes(std::max<std::uint64_t>(X, 2));
  const auto sweep_e = trace_sweep(e, primes, workers);
  const auto sweep_e_prime = trace_sweep(e_prime, primes, workers);
  return dq_census(e, e_prime, sweep_e, sweep_e_prime, screen_cm(e, sweep_e, workers),
                   screen_cm(e_prime, sweep_e_prime, workers));
}

/// Angle census restricted to p = a mod q against the predicted main term.
inline CensusReport ap_census(const WeierstrassCurve& curve, const TraceSweep& sweep, const CMData& cm,
                              std::uint64_t q, std::uint64_t a, const Interval& I) {
  require_angle_interval(I);
  if (q == 0 || std::gcd(a, q) != 1) throw ArgumentError("ap_census: need gcd(a, q) = 1");
  CensusReport report;
  report.descriptor = "angles of " + curve.canonical() + " for p = " + std::to_string(a % q) + " mod " +
                      std::to_string(q);
  report.X = sweep.X;
  report.case_id = cm.has_cm ? "ap-cm" : "ap-non-cm";
  report.conductor_surrogates = {curve.conductor_surrogate()};
  report.q = static_cast<double>(q);

  std::vector<double> angles;
  for (const auto& r : sweep.records) {
    if (r.good && r.p % q == a % q) angles.push_back(r.theta);
  }
  const auto law = make_law(cm.has_cm ? LawTag::CMAngle : LawTag::SemicircleST);
  detail::fill_distribution(report, angles, law);

  ApSection ap{};
  ap.q = q;
  ap.a = a % q;
  ap.interval_lo = I.lo();
  ap.interval_hi = I.hi();
  ap.count = count_theta_ap(sweep, I, q, a);
  ap.pi_x = sweep.records.size();
  ap.predicted_coefficient = ap_main_term(cm.has_cm, I, q, a % q, cm.D_K);
  const double pi_x = static_cast<double>(ap.pi_x);
  const double phi_q = static_cast<double>(euler_phi(q));
  ap.normalized_deviation =
      pi_x == 0 ? 0.0 : std::abs(static_cast<double>(ap.count) - ap.predicted_coefficient * pi_x) / (pi_x / phi_q);
  report.ap = ap;
  // For AP censuses the headline figure is the count error as a fraction of pi(x).
  report.discrepancy = pi_x == 0 ? 1.0 : std::abs(static_cast<double>(ap.count) / pi_x - ap.predicted_coefficient);
  if (cm.has_cm) report.notes.push_back("CM with D_K=" + std::to_string(cm.D_K) + " (heuristic screen)");
  detail::fill_envelope(report);
  return report;
}

inline CensusReport ap_census(const WeierstrassCurve& curve, std::uint64_t X, std::uint64_t q, std::uint64_t a,
                              const Interval& I, unsigned workers = default_workers()) {
  const auto sweep = trace_sweep(curve, X, workers);
  return ap_census(curve, sweep, screen_cm(curve, sweep, workers), q, a, I);
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json to_json(const CensusReport& r) {
  nlohmann::ordered_json j;
  j["descriptor"] = r.descriptor;
  j["case_id"] = r.case_id;
  j["law"] = law_name(r.law);
  j["X"] = r.X;
  j["n_good"] = r.n_good;
  j["discrepancy"] = r.discrepancy;
  j["empty_sample"] = r.empty_sample;
  j["envelope"] = r.envelope;
  j["envelope_ratio"] = r.envelope_ratio;
  j["conductor_surrogates"] = r.conductor_surrogates;
  j["q"] = r.q;
  j["anomalies"] = r.anomalies;
  auto atoms = nlohmann::ordered_json::array();
  for (const auto& a : r.atoms_observed) {
    atoms.push_back({{"location", a.location},
                     {"expected_mass", a.expected_mass},
                     {"count", a.count},
                     {"empirical_mass", a.empirical_mass}});
  }
  j["atoms_observed"] = atoms;
  auto hist = nlohmann::ordered_json::array();
  for (const auto& b : r.histogram) hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  j["histogram"] = hist;
  if (r.ap) {
    j["ap"] = {{"q", r.ap->q},
               {"a", r.ap->a},
               {"interval", {r.ap->interval_lo, r.ap->interval_hi}},
               {"count", r.ap->count},
               {"pi_x", r.ap->pi_x},
               {"predicted_coefficient", r.ap->predicted_coefficient},
               {"normalized_deviation", r.ap->normalized_deviation}};
  }
  j["notes"] = r.notes;
  j["flags"] = r.flags;
  return j;
}

/// bin_center, count, expected_density (bin-averaged continuous density).
inline std::string histogram_csv(const CensusReport& r) {
  const auto law = make_law(r.law);
  std::ostringstream out;
  out.precision(17);
  out << "bin_center,count,expected_density\n";
  for (const auto& b : r.histogram) {
    const double expected = (continuous_cdf(law, b.hi) - continuous_cdf(law, b.lo)) / (b.hi - b.lo);
    out << 0.5 * (b.lo + b.hi) << ',' << b.count << ',' << expected << '\n';
  }
  return out.str();
}

inline std::string report_stem(const CensusReport& r) { return r.case_id + "_" + std::to_string(r.X); }

/// Writes <case_id>_<X>.json and <case_id>_<X>.csv into `dir`.
inline std::vector<std::filesystem::path> write_report_files(const CensusReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto json_path = dir / (report_stem(r) + ".json");
  const auto csv_path = dir / (report_stem(r) + ".csv");
  std::ofstream(json_path) << to_json(r).dump(2) << '\n';
  std::ofstream(csv_path) << histogram_csv(r);
  return {json_path, csv_path};
}

}  // namespace stlaws
