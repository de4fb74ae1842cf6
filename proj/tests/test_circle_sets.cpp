#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "beurling/circle_sets.hpp"
#include "beurling/errors.hpp"

using namespace beurling;

namespace {

constexpr double pi = std::numbers::pi;

double dist_oracle(double t, const std::vector<double>& pts) {
  double best = 1e300;
  for (double p : pts) {
    double d = std::fmod(std::abs(t - p), 2 * pi);
    best = std::min(best, std::min(d, 2 * pi - d));
  }
  return best;
}

// ∫ log⁺ 1/d over [a, a+len] by tanh-sinh, split at set points and at the
// kinks where the distance crosses 1 or switches nearest point.
double log_plus_quadrature(const std::vector<double>& pts, double a, double len) {
  std::vector<double> cuts{a, a + len};
  std::vector<double> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  for (int wrap = -1; wrap <= 1; ++wrap) {
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double p = sorted[i] + 2 * pi * wrap;
      const double q = (i + 1 < sorted.size() ? sorted[i + 1] : sorted[0] + 2 * pi) + 2 * pi * wrap;
      for (double c : {p, p - 1.0, p + 1.0, 0.5 * (p + q)})
        if (c > a && c < a + len) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-15) continue;
    total += ts.integrate(
        [&](double t) {
          const double d = std::max(dist_oracle(t, pts), 1e-300);
          return d < 1.0 ? -std::log(d) : 0.0;
        },
        cuts[i], cuts[i + 1]);
  }
  return total;
}

}  // namespace

TEST(CircleSet, SortsReducesMerges) {
  const CircleSet E({2 * pi + 0.5, -0.5, 0.5 + 1e-13, 1.0});
  ASSERT_EQ(E.size(), 3u);
  EXPECT_NEAR(E.points()[0], 0.5, 1e-15);
  EXPECT_NEAR(E.points()[2], 2 * pi - 0.5, 1e-15);
  double total = 0.0;
  for (const Arc& g : E.gaps()) {
    EXPECT_GT(g.length, 0.0);
    total += g.length;
  }
  EXPECT_NEAR(total, 2 * pi, 1e-14);
}

TEST(Distance, Examples) {
  EXPECT_NEAR(distance(0.0, CircleSet({pi})), pi, 1e-15);
  EXPECT_EQ(distance(1.3, CircleSet({1.3, 2.0})), 0.0);
  EXPECT_NEAR(distance(0.1, CircleSet({0.0, pi})), 0.1, 1e-15);
  EXPECT_NEAR(distance(6.2, CircleSet({0.1})), 2 * pi - 6.1, 1e-14);
  EXPECT_THROW(distance(0.0, CircleSet()), PreconditionError);
}

TEST(GapClosedForm, MatchesQuadrature) {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double a : {1e-6, 0.01, 0.2, 0.5, 0.9, 1.0}) {
    const double q = ts.integrate([](double u) { return -std::log(u); }, 0.0, a);
    EXPECT_NEAR(log_plus_primitive(a), q, 1e-10) << a;
  }
  EXPECT_EQ(log_plus_primitive(2.5), 1.0);
}

TEST(Carleson, SinglePoint) {
  const auto v = carleson_integral(CircleSet({0.0}));
  EXPECT_NEAR(v.value, 2.0, 1e-12);
  EXPECT_NEAR(log_plus_quadrature({0.0}, 0.0, 2 * pi), 2.0, 1e-8);
}

TEST(Carleson, TwoAntipodalPoints) {
  // both half-gaps exceed 1, where log⁺ vanishes
  const double expect = 4.0;
  EXPECT_NEAR(carleson_integral(CircleSet({0.0, pi})).value, expect, 1e-12);
  EXPECT_NEAR(log_plus_quadrature({0.0, pi}, 0.0, 2 * pi), expect, 1e-8);
}

TEST(Carleson, RandomFiniteSetsAgainstQuadrature) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi);
  std::uniform_int_distribution<int> size(1, 12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pts(static_cast<std::size_t>(size(rng)));
    for (double& p : pts) p = ang(rng);
    const double v = carleson_integral(CircleSet(pts)).value;
    EXPECT_NEAR(v, log_plus_quadrature(pts, 0.0, 2 * pi), 1e-8) << trial;
  }
}

TEST(Carleson, MonotoneUnderInclusion) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pts{ang(rng)};
    double prev = carleson_integral(CircleSet(pts)).value;
    for (int k = 0; k < 8; ++k) {
      pts.push_back(ang(rng));
      const double v = carleson_integral(CircleSet(pts)).value;
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(Carleson, GeometricSequenceConvergesInDepth) {
  auto make = [](int depth) {
    std::vector<double> a{0.0};
    for (int k = 0; k <= depth; ++k) a.push_back(std::ldexp(1.0, -k) * 0.5);
    return CircleSet(a, {0});
  };
  const double v20 = carleson_integral(make(20)).value;
  const double v25 = carleson_integral(make(25)).value;
  EXPECT_NEAR(v20, v25, 1e-3);
  const auto est = carleson_integral(make(20));
  EXPECT_GT(est.tail_bound, 0.0);
  EXPECT_NEAR(est.value + est.tail_bound, carleson_integral(make(40)).value, 1e-6);
}

TEST(ArcIntegrator, MatchesQuadrature) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi), len(1e-4, 2 * pi);
  const std::vector<double> pts{0.3, 1.1, 1.15, 4.0};
  const ArcIntegrator integ{CircleSet(pts)};
  for (int i = 0; i < 40; ++i) {
    const double a = ang(rng), l = len(rng);
    EXPECT_NEAR(integ.integrate(a, l), log_plus_quadrature(pts, a, l), 1e-8) << a << " " << l;
  }
  EXPECT_NEAR(integ.integrate(0.0, 2 * pi), carleson_integral(CircleSet(pts)).value, 1e-12);
}

TEST(ATW, SinglePointFit) {
  const auto r = atw_check(CircleSet({0.0}), 12, 64);
  EXPECT_LE(r.C1, 1.1);
  EXPECT_LE(r.C2, 1.1);
  EXPECT_LE(r.max_residual, 1e-12);
  EXPECT_TRUE(r.consistent);
  // centered arc of normalized length 2^{-m}: average of ln(1/u) over a half-gap
  for (std::size_t m = 0; m < r.envelope.size(); ++m) {
    const double len = 2 * pi * std::ldexp(1.0, -static_cast<int>(m) - 1);
    const double oracle = log_plus_quadrature({0.0}, -0.5 * len, len) / len;
    EXPECT_NEAR(r.envelope[m], oracle, 1e-8);
  }
}

TEST(ATW, CantorEndpointsBounded) {
  CantorScheme s = build_carleson_perfect_subset(IntervalOracle(0.0, 1.0), 10, 1.0);
  const auto r = atw_check(s.endpoint_set(), 12, 64);
  EXPECT_TRUE(std::isfinite(r.C1));
  EXPECT_TRUE(std::isfinite(r.C2));
  EXPECT_TRUE(r.consistent);
}

TEST(ATW, SuperExponentialGapsFlagged) {
  std::vector<double> a{0.0};
  double pos = 0.0;
  for (int k = 0; k <= 12; ++k) {
    pos += std::exp(-std::ldexp(1.0, k));
    if (pos - a.back() > 1e-12) a.push_back(pos);
  }
  const auto r = atw_check(CircleSet(a, {0}), 12, 64);
  EXPECT_GE(r.fine_slope, r.coarse_slope);
  EXPECT_GE(r.max_residual, -1e-12);
  // record the verdict either way; see the envelope in the report
  RecordProperty("consistent", r.consistent ? "true" : "false");
}

TEST(GapSum, MiddleThirdsLimit) {
  const auto sums = carleson_gap_sum(GapProfile::middle_thirds(0.0, 1.0, 60));
  double oracle = 0.0;
  for (int n = 1; n <= 200; ++n) oracle += std::ldexp(1.0, n - 1) * std::pow(3.0, -n) * n * std::log(3.0);
  EXPECT_NEAR(oracle, 3 * std::log(3.0), 1e-12);
  EXPECT_NEAR(sums.back(), 3 * std::log(3.0), 1e-6);
  for (std::size_t i = 1; i < sums.size(); ++i) EXPECT_GE(sums[i], sums[i - 1]);
}

TEST(GapSum, UnitGapContributesNothing) {
  GapProfile p;
  p.levels.push_back({{1.0, 1.0}});
  EXPECT_EQ(carleson_gap_sum(p).back(), 0.0);
}

TEST(GapSum, CircleSetLongestFirst) {
  const auto sums = carleson_gap_sum(CircleSet({0.0, 0.1, 0.3}));
  ASSERT_EQ(sums.size(), 3u);
  const double g = 2 * pi - 0.3;
  EXPECT_NEAR(sums[0], g * std::log(1 / g), 1e-14);
  EXPECT_NEAR(sums[2] - sums[1], 0.1 * std::log(10.0), 1e-14);
}

namespace {

void check_scheme_independently(const CantorScheme& s) {
  const double L = s.base.length();
  ASSERT_EQ(s.removed.size() + 1, s.levels.size());
  for (std::size_t n = 0; n < s.levels.size(); ++n) {
    ASSERT_EQ(s.levels[n].size(), std::size_t{1} << n);
    for (const Interval& I : s.levels[n]) EXPECT_LE(I.length(), L * std::pow(3.0, -double(n)) * (1 + 1e-12));
    if (n == 0) continue;
    ASSERT_EQ(s.removed[n - 1].size(), std::size_t{1} << (n - 1));
    for (std::size_t k = 0; k < s.levels[n - 1].size(); ++k) {
      const Interval& P = s.levels[n - 1][k];
      const Interval& A = s.levels[n][2 * k];
      const Interval& B = s.levels[n][2 * k + 1];
      const Interval& G = s.removed[n - 1][k];
      EXPECT_EQ(A.a, P.a);
      EXPECT_EQ(B.b, P.b);
      EXPECT_EQ(A.b, G.a);
      EXPECT_EQ(B.a, G.b);
      EXPECT_LT(G.a, G.b);
    }
  }
  // partial sums of |J| ln 1/|J| against the closed series
  double acc = 0.0;
  for (std::size_t n = 1; n <= s.removed.size(); ++n) {
    for (const Interval& J : s.removed[n - 1]) acc += J.length() * std::log(1.0 / J.length());
    double series = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      series += L * ((k - 1.0) * std::log(3.0) - std::log(L)) * std::pow(2.0 / 3.0, k - 1.0);
    EXPECT_LE(acc, series + 1e-12) << "level " << n;
  }
}

}  // namespace

TEST(PerfectSubset, IntervalOracle) {
  const CantorScheme s = build_carleson_perfect_subset(IntervalOracle(0.5, 2.5), 14);
  EXPECT_LE(s.base.length(), kMaxBaseLength);
  EXPECT_TRUE(verify_scheme(s).ok());
  check_scheme_independently(s);
  EXPECT_LE(carleson_integral(s.endpoint_set()).value, scheme_carleson_bound(s.base.length()));
}

TEST(PerfectSubset, CantorOracleDepth12) {
  const CantorOracle P(0.0, 1.0);
  const CantorScheme s = build_carleson_perfect_subset(P, 12);
  EXPECT_TRUE(verify_scheme(s).ok()) << verify_scheme(s).first_failure;
  check_scheme_independently(s);
  for (const auto& lv : s.removed)
    for (const Interval& J : lv) {
      EXPECT_TRUE(P.contains(J.a));
      EXPECT_TRUE(P.contains(J.b));
      EXPECT_TRUE(P.two_sided(J.a, 1e-12));
      EXPECT_TRUE(P.two_sided(J.b, 1e-12));
    }
  EXPECT_LE(carleson_integral(s.endpoint_set()).value, scheme_carleson_bound(s.base.length()));
}

TEST(PerfectSubset, VerifierCatchesBrokenScheme) {
  CantorScheme s = build_carleson_perfect_subset(IntervalOracle(0.0, 0.3), 3);
  s.levels[2][1].b += 0.05;
  EXPECT_FALSE(verify_scheme(s).ok());
}

TEST(PerfectSubset, SparseSetFailsWithLevel) {
  // a set that is two-sided only on a tiny window
  class Narrow final : public PerfectSetOracle {
   public:
    double lower() const override { return 0.0; }
    double upper() const override { return 1e-9; }
    bool contains(double x) const override { return x >= 0 && x <= 1e-9; }
    bool two_sided(double x, double) const override { return x > 0 && x < 1e-9; }
    std::optional<double> two_sided_at_or_below(double t, double f) const override {
      const double x = std::floor(std::min(t, 1e-9 - 1e-12) * 1e12) / 1e12;
      if (x < f || x <= 0) return std::nullopt;
      return x;
    }
    std::optional<double> two_sided_at_or_above(double t, double c) const override {
      const double x = std::ceil(std::max(t, 1e-12) * 1e12) / 1e12;
      if (x > c || x >= 1e-9) return std::nullopt;
      return x;
    }
  } P;
  try {
    build_carleson_perfect_subset(P, 20);
    FAIL() << "expected failure";
  } catch (const NumericalFailure& e) {
    EXPECT_NE(std::string(e.what()).find("level"), std::string::npos);
  }
}

TEST(CantorOracle, MembershipAndSidedness) {
  const CantorOracle P(0.0, 1.0);
  EXPECT_TRUE(P.contains(0.0));
  EXPECT_TRUE(P.contains(1.0 / 3.0));
  EXPECT_TRUE(P.contains(0.25));  // 0.0202…₃
  EXPECT_FALSE(P.contains(0.5));
  EXPECT_TRUE(P.two_sided(0.25, 1e-12));
  EXPECT_FALSE(P.two_sided(0.0, 1e-12));
  const auto below = P.two_sided_at_or_below(0.5, 0.0);
  ASSERT_TRUE(below.has_value());
  EXPECT_LE(*below, 1.0 / 3.0);
  EXPECT_GT(*below, 1.0 / 3.0 - 1e-12);
  const auto above = P.two_sided_at_or_above(0.5, 1.0);
  ASSERT_TRUE(above.has_value());
  EXPECT_GE(*above, 2.0 / 3.0);
  EXPECT_LT(*above, 2.0 / 3.0 + 1e-12);
}

TEST(OneSided, Classifier) {
  std::vector<double> a{0.0};
  for (int k = 1; k <= 30; ++k) a.push_back(std::ldexp(1.0, -k));
  const auto part = classify_one_sided(CircleSet(a, {0}), 1e-6);
  // 0 has nothing on its left within the resolution
  EXPECT_NE(std::find(part.one_sided.begin(), part.one_sided.end(), 0u), part.one_sided.end());
  // isolated points 2^{-k} with k small are one-sided
  EXPECT_EQ(part.one_sided.size() + part.two_sided.size(), a.size());

  std::vector<double> grid;
  for (int k = 0; k <= 1000; ++k) grid.push_back(1.0 + k * 1e-7);
  const auto g = classify_one_sided(CircleSet(grid), 1e-6);
  EXPECT_EQ(g.two_sided.size(), grid.size() - 2);

  CantorScheme s = build_carleson_perfect_subset(IntervalOracle(0.0, 0.3), 6);
  std::vector<double> ends;
  for (const Interval& I : s.levels.back()) {
    ends.push_back(I.a);
    ends.push_back(I.b);
  }
  const auto c = classify_one_sided(CircleSet(ends), 0.3 * std::pow(3.0, -7));
  EXPECT_EQ(c.one_sided.size(), ends.size());
}

TEST(CircleSetJson, RoundTripStrict) {
  const CircleSet E({0.5, 1.0, 2.0}, {1});
  const CircleSet back = circle_set_from_json(to_json(E));
  EXPECT_EQ(back.points(), E.points());
  EXPECT_EQ(back.limit_flags(), E.limit_flags());
  EXPECT_THROW(circle_set_from_json({{"points", {0.0}}, {"other", 1}}), ConfigError);
}
