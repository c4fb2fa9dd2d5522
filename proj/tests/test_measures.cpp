#include <gtest/gtest.h>

#include <random>

#include "stlaws/measures.hpp"

using namespace stlaws;

namespace {

/// Sato-Tate angle by inverting (th - sin(2th)/2)/pi with bisection.
double sample_st_angle(std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double lo = 0.0, hi = kPi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((mid - 0.5 * std::sin(2 * mid)) / kPi < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sample_uniform_angle(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, kPi)(rng); }

bool coin(std::mt19937_64& rng) { return std::bernoulli_distribution(0.5)(rng); }

/// Draws from the law's defining random model.
double draw(LawTag tag, std::mt19937_64& rng) {
  auto a_st = [&] { return 2 * std::cos(sample_st_angle(rng)); };
  auto a_u = [&] { return 2 * std::cos(sample_uniform_angle(rng)); };
  const double sign = coin(rng) ? 1.0 : -1.0;
  switch (tag) {
    case LawTag::Batman: { const double a = a_st(); return sign * (a * a - 1); }
    case LawTag::SqrtK3: { const double a = a_st(); return a * a - 1; }
    case LawTag::FlyingBatman: {
      if (coin(rng)) return sign;
      const double a = a_u();
      return sign * (a * a - 1);
    }
    case LawTag::ArcK3Plus: {
      if (coin(rng)) return 1.0;
      const double a = a_u();
      return a * a - 1;
    }
    case LawTag::ArcK3Minus: {
      if (coin(rng)) return -1.0;
      const double a = a_u();
      return a * a - 1;
    }
    case LawTag::C1: return a_st() * a_st();
    case LawTag::C2Atom: return coin(rng) ? 0.0 : a_st() * a_u();
    case LawTag::C3Atom: return (coin(rng) || coin(rng)) ? 0.0 : a_u() * a_u();
    case LawTag::C3TwinAtom: return coin(rng) ? 0.0 : a_u() * a_u();
    case LawTag::SemicircleST: return sample_st_angle(rng);
    case LawTag::CMAngle: return coin(rng) ? kPi / 2 : sample_uniform_angle(rng);
  }
  return 0.0;
}

}  // namespace

TEST(Laws, NamesRoundTrip) {
  for (auto tag : kAllLaws) EXPECT_EQ(parse_law(law_name(tag)), tag);
  EXPECT_THROW(parse_law("nope"), ArgumentError);
}

TEST(Laws, CdfReachesOneAndStartsAtZero) {
  for (auto tag : kAllLaws) {
    const auto law = make_law(tag);
    EXPECT_NEAR(cdf(law, law.support.hi()), 1.0, 1e-10) << law.name();
    EXPECT_NEAR(cdf_left(law, law.support.lo()), 0.0, 1e-10) << law.name();
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = law.support.lo() + law.support.length() * i / 200.0;
      const double v = cdf(law, t);
      ASSERT_GE(v, prev - 1e-12) << law.name() << " at " << t;
      prev = v;
    }
  }
}

TEST(Laws, CdfMatchesRandomModel) {
  std::mt19937_64 rng(20241016);
  constexpr int n = 100000;
  for (auto tag : kAllLaws) {
    const auto law = make_law(tag);
    std::vector<double> xs(n);
    for (auto& x : xs) x = draw(tag, rng);
    std::sort(xs.begin(), xs.end());
    for (int i = 1; i < 10; ++i) {
      const double t = law.support.lo() + law.support.length() * i / 10.0 + 0.0123;
      const double emp =
          static_cast<double>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin()) / static_cast<double>(n);
      EXPECT_NEAR(cdf(law, t), emp, 0.006) << law.name() << " at " << t;
    }
  }
}

TEST(Laws, ComponentIntegrals) {
  quad::Options opt;
  EXPECT_NEAR(quad::integrate_endpoint_singular(batman_raw, -3, -1, opt).value +
                  quad::integrate_endpoint_singular(batman_raw, -1, 1, opt).value +
                  quad::integrate_endpoint_singular(batman_raw, 1, 3, opt).value,
              4 * kPi, 1e-6);
  EXPECT_NEAR(integrate_density(make_law(LawTag::FlyingBatman), -3, 3), 0.5, 1e-8);
  EXPECT_NEAR(integrate_density(make_law(LawTag::C1), -4, 4), 1.0, 1e-8);
  EXPECT_NEAR(integrate_density(make_law(LawTag::C2Atom), -4, 4), 0.5, 1e-8);
  EXPECT_NEAR(integrate_density(make_law(LawTag::C3Atom), -4, 4), 0.25, 1e-8);
}

TEST(Laws, DensityAndCdfRoutesAgree) {
  for (auto tag : {LawTag::C1, LawTag::C2Atom, LawTag::C3Atom, LawTag::Batman, LawTag::FlyingBatman}) {
    const auto law = make_law(tag);
    for (auto [a, b] : {std::pair{-3.5, -2.0}, {-0.7, 0.4}, {0.05, 1.3}, {2.2, 3.9}}) {
      const double by_density = integrate_density(law, a, b);
      const double by_cdf = continuous_cdf(law, b) - continuous_cdf(law, a);
      EXPECT_NEAR(by_density, by_cdf, 1e-8) << law.name() << " on [" << a << ", " << b << "]";
    }
  }
}

TEST(Laws, CKernelAgainstDirectIntegral) {
  // C_1(t) = (2/pi^2) int_{t/2}^2 (1/u) sqrt(1 - u^2/4) sqrt(1 - t^2/(4u^2)) du
  for (double t : {0.3, 1.0, 2.5, 3.7}) {
    const auto direct = quad::integrate_endpoint_singular(
        [t](double u) { return std::sqrt(1 - u * u / 4) * std::sqrt(1 - t * t / (4 * u * u)) / u; }, t / 2, 2.0);
    EXPECT_NEAR(c_kernel(1, t), 2 / (kPi * kPi) * direct.value, 1e-9) << t;
    EXPECT_DOUBLE_EQ(c_kernel(1, t), c_kernel(1, -t));
  }
  EXPECT_EQ(c_kernel(2, 0.0), kInf);
  EXPECT_EQ(c_kernel(3, 4.0), 0.0);
  EXPECT_THROW(c_kernel(4, 1.0), ArgumentError);
  // Logarithmic growth at the origin.
  EXPECT_GT(c_kernel(1, 1e-8), c_kernel(1, 1e-4));
}

TEST(Laws, SpotDensities) {
  const auto batman = make_law(LawTag::Batman);
  const double x = 0.4;
  const double want = ((3 + x) / std::sqrt(3 - 2 * x - x * x) + (3 - x) / std::sqrt(3 + 2 * x - x * x)) / (4 * kPi);
  EXPECT_NEAR(density(batman, x), want, 1e-14);
  EXPECT_NEAR(density(batman, 2.0), std::sqrt(1.0 / 3.0) / (4 * kPi), 1e-14);
  EXPECT_EQ(density(batman, 1.0), kInf);
  EXPECT_EQ(density(batman, 3.5), 0.0);
  EXPECT_NEAR(density(make_law(LawTag::SqrtK3), 1.0), 1 / (2 * kPi), 1e-14);
  EXPECT_NEAR(density(make_law(LawTag::ArcK3Plus), 1.0), 1 / (4 * kPi), 1e-14);
}

TEST(Laws, MeasureIncludesAtomsOnClosedIntervals) {
  const auto law = make_law(LawTag::ArcK3Plus);
  EXPECT_NEAR(measure(law, {1.0, 1.0}), 0.5, 1e-15);
  EXPECT_NEAR(measure(law, {-1.0, 3.0}), 1.0, 1e-12);
  const auto fb = make_law(LawTag::FlyingBatman);
  EXPECT_NEAR(cdf(fb, -1.0) - cdf_left(fb, -1.0), 0.25, 1e-15);
}

TEST(AngleMeasures, SatoTateAndCM) {
  EXPECT_NEAR(mu_st(Interval::full_angle()), 1.0, 1e-15);
  EXPECT_NEAR(mu_st({0, kPi / 2}), 0.5, 1e-15);
  EXPECT_NEAR(mu_cm(Interval::full_angle()), 1.0, 1e-15);
  EXPECT_NEAR(mu_cm({0, 1}), 1 / (2 * kPi), 1e-15);
  EXPECT_THROW(mu_st({-0.1, 1}), ArgumentError);
  EXPECT_THROW(Interval(2, 1), ArgumentError);
}

TEST(MainTerms, JointCases) {
  const Interval I(0.3, 2.0), J(1.0, 1.4);
  EXPECT_NEAR(joint_main_term(JointCase::BothNonCM, I, J), mu_st(I) * mu_st(J), 1e-15);
  EXPECT_NEAR(joint_main_term(JointCase::CMWithNonCM, I, J), mu_cm(I) * mu_st(J), 1e-15);
  EXPECT_NEAR(joint_main_term(JointCase::BothCMCoprime, Interval::full_angle(), Interval::full_angle()), 1, 1e-15);
  EXPECT_NEAR(joint_main_term(JointCase::BothCMShared, Interval::full_angle(), Interval::full_angle()), 1, 1e-15);
  EXPECT_NEAR(joint_main_term(JointCase::BothCMShared, {0, 1}, {kPi / 2, kPi}), 0.5 * (kPi / 2) / (kPi * kPi),
              1e-15);
}

TEST(MainTerms, ProgressionsSumToUnrestricted) {
  const Interval I(0.2, 1.9);
  double non_cm = 0.0, cm = 0.0;
  for (std::uint64_t a : {1u, 3u, 5u, 7u}) {
    non_cm += ap_main_term(false, I, 8, a);
    cm += ap_main_term(true, I, 8, a, -8);
  }
  EXPECT_NEAR(non_cm, mu_st(I), 1e-15);
  EXPECT_NEAR(cm, mu_cm(I), 1e-15);
  // Split classes carry no mass at pi/2, inert classes carry all of it.
  EXPECT_NEAR(ap_main_term(true, {kPi / 2, kPi / 2}, 8, 1, -8), 0.0, 1e-15);
  EXPECT_NEAR(ap_main_term(true, {kPi / 2, kPi / 2}, 8, 5, -8), 0.25, 1e-15);
  // D_K does not divide q: no correction.
  EXPECT_NEAR(ap_main_term(true, I, 5, 2, -8), mu_cm(I) / 4, 1e-15);
  EXPECT_THROW(ap_main_term(false, I, 8, 4), ArgumentError);
  EXPECT_THROW(ap_main_term(true, I, 8, 1, -5), ArgumentError);
}
