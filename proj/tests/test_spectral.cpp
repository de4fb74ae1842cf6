#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "beurling/errors.hpp"
#include "beurling/spectral.hpp"

using namespace beurling;

namespace {
constexpr double pi = std::numbers::pi;

double op_norm(const Eigen::MatrixXcd& M) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()(0);
}
}  // namespace

TEST(Herglotz, DiracCoefficients) {
  const double eps0 = 0.1;
  const auto a = herglotz_taylor(AtomicMeasure::dirac_at_one(eps0), 6);
  EXPECT_NEAR(a[0].real(), -eps0 * eps0, 1e-15);
  for (int k = 1; k <= 6; ++k) {
    EXPECT_NEAR(a[static_cast<std::size_t>(k)].real(), -2 * eps0 * eps0, 1e-15);
    EXPECT_NEAR(a[static_cast<std::size_t>(k)].imag(), 0.0, 1e-15);
  }
}

TEST(Herglotz, SymmetricAtomsGiveRealCoefficients) {
  const AtomicMeasure mu({{0.7, 0.2}, {2 * pi - 0.7, 0.2}, {pi, 0.05}});
  for (const Complex& c : herglotz_taylor(mu, 40)) EXPECT_NEAR(c.imag(), 0.0, 1e-14);
}

TEST(AtomicMeasureTest, Validation) {
  EXPECT_THROW(AtomicMeasure({{0.0, -1.0}}), PreconditionError);
  EXPECT_NEAR(AtomicMeasure::dirac_at_one(0.1).total_mass(), 2 * pi * 0.01, 1e-15);
}

TEST(Inner, TaylorMatchesClosedForm) {
  const auto mu = AtomicMeasure::dirac_at_one(0.1);
  const InnerFunction J = inner_taylor(mu, 200);
  for (Complex z : {Complex(0.5, 0), Complex(0, 0.5), Complex(-0.3, 0.6), Complex(0.0, 0.0)}) {
    const Complex closed = std::exp(-0.01 * (1.0 + z) / (1.0 - z));
    EXPECT_LT(std::abs(J.eval(z) - closed), 1e-12);
    EXPECT_LT(std::abs(inner_eval_direct(mu, z) - closed), 1e-15);
  }
}

TEST(Inner, TwoAtomRecurrenceAgainstProduct) {
  const AtomicMeasure a({{0.0, 0.2}}), b({{2.0, 0.3}}), ab({{0.0, 0.2}, {2.0, 0.3}});
  const auto ta = inner_taylor(a, 60).taylor, tb = inner_taylor(b, 60).taylor;
  const auto tab = inner_taylor(ab, 60).taylor;
  for (std::size_t n = 0; n <= 60; ++n) {
    Complex conv = 0;
    for (std::size_t k = 0; k <= n; ++k) conv += ta[k] * tb[n - k];
    EXPECT_LT(std::abs(conv - tab[n]), 1e-13);
  }
}

TEST(Inner, BoundaryModulusOneOffAtoms) {
  const AtomicMeasure mu({{0.0, 0.2}, {2.0, 0.3}});
  for (double phi : {0.5, 1.0, 3.0, 4.5}) EXPECT_NEAR(boundary_modulus(mu, phi), 1.0, 1e-8);
  EXPECT_LT(boundary_modulus(mu, 0.0), 1e-3);
}

TEST(ModelSection, Contraction) {
  for (int N : {16, 64, 128}) {
    const auto T = model_section(AtomicMeasure::dirac_at_one(0.1), N);
    EXPECT_LE(op_norm(T.entries), 1.0 + 1e-8) << N;
    EXPECT_GT(T.dim, 0);
    EXPECT_NE(T.basis_tag.find("rank="), std::string::npos);
  }
}

TEST(ModelSection, ZeroMeasureThrows) {
  EXPECT_THROW(model_section(AtomicMeasure(), 32), NumericalFailure);
}

TEST(ModelSection, RankGrowsWithN) {
  const auto mu = AtomicMeasure::dirac_at_one(0.1);
  EXPECT_LE(model_section(mu, 32).dim, model_section(mu, 128).dim);
}

TEST(PowerNormsTest, UnitaryDiagonal) {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) D(i, i) = std::polar(1.0, 0.3 * i);
  const auto p = power_norms(make_operator(D, "diag"), 20, true);
  for (const auto& [n, v] : p.norms) EXPECT_NEAR(v, 1.0, 1e-12) << n;
  EXPECT_FALSE(p.overflow);
}

TEST(PowerNormsTest, Submultiplicative) {
  const auto T = model_section(AtomicMeasure::dirac_at_one(0.1), 64);
  const auto p = power_norms(T, 40, true);
  for (int a = 1; a <= 20; ++a)
    for (int b = 1; a + b <= 40; b += 3)
      EXPECT_LE(p.norms[static_cast<std::size_t>(a + b - 1)].second,
                p.norms[static_cast<std::size_t>(a - 1)].second * p.norms[static_cast<std::size_t>(b - 1)].second *
                    (1 + 1e-8));
}

TEST(PowerNormsTest, MatchesDirectPowers) {
  const auto T = model_section(AtomicMeasure::dirac_at_one(0.1), 32);
  const Eigen::MatrixXcd inv = T.entries.fullPivLu().inverse();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(T.dim, T.dim);
  const auto p = power_norms(T, 10, true);
  for (int n = 1; n <= 10; ++n) {
    P = P * inv;
    EXPECT_NEAR(p.norms[static_cast<std::size_t>(n - 1)].second / op_norm(P), 1.0, 1e-6);
  }
}

namespace {
std::vector<std::pair<int, double>> synthetic(int n_max, auto f) {
  std::vector<std::pair<int, double>> out;
  for (int n = 1; n <= n_max; ++n) out.emplace_back(n, f(n));
  return out;
}
}  // namespace

TEST(GrowthFit, PlantedPower) {
  const auto r = growth_fit(synthetic(200, [](int n) { return std::pow(double(n), 2.0); }));
  EXPECT_EQ(r.verdict, GrowthVerdict::polynomial);
  EXPECT_NEAR(r.poly_t, 2.0, 1e-12);
  EXPECT_FALSE(r.exponential_like);
}

TEST(GrowthFit, PlantedSqrtExp) {
  const auto r = growth_fit(synthetic(200, [](int n) { return std::exp(0.4 * std::sqrt(double(n))); }));
  EXPECT_EQ(r.verdict, GrowthVerdict::subexp_sqrt);
  EXPECT_NEAR(r.sqrt_c, 0.4, 1e-12);
}

TEST(GrowthFit, ExponentialFlagged) {
  const auto r = growth_fit(synthetic(200, [](int n) { return std::exp(0.05 * n); }));
  EXPECT_TRUE(r.exponential_like);
  EXPECT_NEAR(r.exp_rate, 0.05, 1e-12);
}

TEST(GrowthFit, BoundedIsPolynomial) {
  const auto r = growth_fit(synthetic(50, [](int) { return 1.0; }));
  EXPECT_EQ(r.verdict, GrowthVerdict::polynomial);
}

TEST(GrowthFit, TooFewPoints) {
  EXPECT_THROW(growth_fit(synthetic(12, [](int n) { return double(n); })), PreconditionError);
}

TEST(ModelGrowth, StrictlyIncreasingAtN256) {
  const auto e = model_growth_experiment(AtomicMeasure::dirac_at_one(0.1), 256, 200);
  EXPECT_TRUE(e.base.strictly_increasing);
  EXPECT_TRUE(e.doubled.strictly_increasing);
  EXPECT_EQ(e.doubled.N, 512);
  EXPECT_FALSE(e.base.fit.exponential_like);
}

TEST(Quotient, SinglePointIsOne) {
  const auto q = quotient_inverse_norms(CircleSet({0.0}), 0.5, 20, 200);
  ASSERT_EQ(q.rows.size(), 20u);
  for (const auto& r : q.rows) {
    EXPECT_NEAR(r.estimate, 1.0, 1e-9);
    EXPECT_NEAR(r.lower, std::cos(pi / kPhaseCount), 1e-9);
  }
}

TEST(Quotient, AntipodalPeriodTwo) {
  const auto q = quotient_inverse_norms(CircleSet({0.0, pi}), 0.3, 12, 120);
  for (std::size_t i = 0; i + 2 < q.rows.size(); ++i)
    EXPECT_NEAR(q.rows[i].estimate, q.rows[i + 2].estimate, 1e-9);
}

TEST(Quotient, DeeperConstraintsNeverIncrease) {
  const auto q = quotient_inverse_norms(CircleSet({0.0, 1.0, 2.5}), 0.3, 15, 150);
  for (const auto& r : q.rows) {
    EXPECT_LE(r.estimate, r.estimate_half * (1 + 1e-9) + 1e-9);
    EXPECT_GE(r.estimate, 1.0 - 1e-9);
  }
}

TEST(Quotient, Preconditions) {
  EXPECT_THROW(quotient_inverse_norms(CircleSet({0.0}), 0.5, 20, 100), PreconditionError);
  EXPECT_THROW(quotient_inverse_norms(CircleSet({0.0}), 1.0, 20, 200), PreconditionError);
  EXPECT_THROW(quotient_inverse_norms(CircleSet({0.0, 1.0}, {0}), 0.5, 20, 200), PreconditionError);
  EXPECT_EQ(default_constraint_depth(40), 1000);
  EXPECT_EQ(default_constraint_depth(300), 3000);
}

TEST(Interpolation, SinglePoint) {
  for (double t : {0.5, 1.0, 2.0}) {
    const auto r = interpolation_constant(CircleSet({0.0}), 0.5, t, 200);
    EXPECT_NEAR(r.C, std::pow(2.0, -t), 1e-9) << t;
    EXPECT_TRUE(r.stable);
    EXPECT_FALSE(r.diverging);
  }
}

TEST(Interpolation, AntipodalStableAndRotationInvariant) {
  const auto a = interpolation_constant(CircleSet({0.0, pi}), 0.5, 1.0, 200);
  EXPECT_TRUE(a.stable);
  EXPECT_FALSE(a.diverging);
  const auto c = interpolation_constant(CircleSet({0.4, 0.4 + pi}), 0.5, 1.0, 200);
  const auto d = interpolation_constant(CircleSet({0.4 + pi, 0.4}), 0.5, 1.0, 200);
  EXPECT_NEAR(c.C, d.C, 1e-9);
}

TEST(DualProgram, OneAtIdentityPoint) {
  EXPECT_NEAR(dual_program_value({Complex(1, 0)}, 0.5, 3, 100), 1.0, 1e-9);
}

TEST(SpectralJson, MeasureRoundTrip) {
  const AtomicMeasure mu({{0.0, 0.2}, {2.0, 0.3}});
  const AtomicMeasure back = measure_from_json(to_json(mu));
  ASSERT_EQ(back.atoms().size(), 2u);
  EXPECT_EQ(back.atoms()[1].theta, 2.0);
  EXPECT_EQ(back.atoms()[1].mass, 0.3);
  EXPECT_NEAR(measure_from_json({{"dirac_eps0", 0.1}}).total_mass(), 2 * pi * 0.01, 1e-15);
  EXPECT_THROW(measure_from_json({{"atoms", nlohmann::json::array()}, {"x", 1}}), ConfigError);
  const auto g = to_json(growth_fit(synthetic(40, [](int n) { return double(n); })));
  EXPECT_EQ(g.at("verdict"), "polynomial");
}
