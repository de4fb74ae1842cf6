#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "beurling/circle_sets.hpp"
#include "beurling/series.hpp"

namespace beurling {

struct Atom {
  double theta = 0.0;
  double mass = 0.0;
};

/// Finite positive atomic measure on the circle.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);
  /// 2π ε₀² δ₁
  static AtomicMeasure dirac_at_one(double eps0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const;
  bool empty() const { return atoms_.empty(); }

 private:
  std::vector<Atom> atoms_;
};

/// Taylor coefficients of the exponent −(1/2π)∫(e^{it}+z)/(e^{it}−z) dμ(t):
/// a₀ = −μ(𝕋)/2π, a_k = −(1/π)∑ m_j e^{−ikθ_j}.
std::vector<Complex> herglotz_taylor(const AtomicMeasure& mu, int N);

/// Singular inner function J_μ with its Taylor coefficients up to degree N.
struct InnerFunction {
  AtomicMeasure measure;
  std::vector<Complex> taylor;
  Complex eval(Complex z) const;  // truncated Taylor sum
};

/// exp of the Herglotz series via n·c_n = ∑_{k=1}^{n} k a_k c_{n−k}, c₀ = e^{a₀}.
InnerFunction inner_taylor(const AtomicMeasure& mu, int N);

/// Closed-form J_μ(z) for |z| ≤ 1 off the atoms.
Complex inner_eval_direct(const AtomicMeasure& mu, Complex z);

/// |J_μ| along the radius toward e^{iφ} at 1 − 1e-12 (radial limit proxy).
double boundary_modulus(const AtomicMeasure& mu, double phi);

struct FiniteSectionOperator {
  int dim = 0;
  Eigen::MatrixXcd entries;
  std::string basis_tag;
  double condition_estimate = 0.0;
};

FiniteSectionOperator make_operator(Eigen::MatrixXcd entries, std::string tag);

inline constexpr double kModelRankThreshold = 1e-10;

/// Compression of the shift to the numerical range of I − M_J M_J* on
/// polynomials of degree < N (monomial inner product).
FiniteSectionOperator model_section(const AtomicMeasure& mu, int N);

struct PowerNorms {
  std::vector<std::pair<int, double>> norms;
  bool overflow = false;  // some norm exceeded 1e12
};

/// ‖T^{±n}‖₂ for n = 1..n_max. The inverse is formed explicitly and polished
/// with two refinement steps.
PowerNorms power_norms(const FiniteSectionOperator& T, int n_max, bool inverse);

enum class GrowthVerdict { polynomial, subexp_sqrt, inconclusive };
std::string to_string(GrowthVerdict v);

struct GrowthReport {
  std::vector<std::pair<int, double>> norms;
  double window = 0.5;
  std::size_t fitted_points = 0;
  double sqrt_c = 0.0, sqrt_residual = 0.0;  // ln‖T^{-n}‖ ≈ c√n
  double poly_t = 0.0, poly_residual = 0.0;  // ln‖T^{-n}‖ ≈ t ln n
  double exp_rate = 0.0, exp_residual = 0.0;  // ln‖T^{-n}‖ ≈ λ n
  GrowthVerdict verdict = GrowthVerdict::inconclusive;
  /// Exponential model fits at least twice as well as both others with λ > 0.
  bool exponential_like = false;
};

/// Least-squares (through the origin) fits on the last `window` fraction of
/// the points; verdict by the smaller residual with margin factor 2.
GrowthReport growth_fit(const std::vector<std::pair<int, double>>& norms, double window = 0.5);

/// The model-operator growth experiment at N and 2N.
struct ModelGrowthRun {
  int N = 0;
  FiniteSectionOperator op;
  PowerNorms inverse_norms;
  GrowthReport fit;
  bool strictly_increasing = false;
};
struct ModelGrowthExperiment {
  ModelGrowthRun base;
  ModelGrowthRun doubled;
  bool agree = false;  // same verdict at N and 2N
};
ModelGrowthExperiment model_growth_experiment(const AtomicMeasure& mu, int N, int n_max,
                                              double window = 0.5);

inline constexpr int kPhaseCount = 16;

struct QuotientRow {
  int n = 0;
  double estimate = 0.0;       // upper estimate at depth N_con
  double estimate_half = 0.0;  // at depth N_con/2
  double lower = 0.0;          // cos(π/16)·estimate
};
struct QuotientReport {
  int constraint_depth = 0;
  double s = 0.0;
  std::vector<QuotientRow> rows;
};

/// Upper estimates of ‖π(α^{-n})‖ in A_s^+/I_s^+(E) from the truncated dual
/// program, with phase-polygon relaxation of the modulus constraints.
QuotientReport quotient_inverse_norms(const CircleSet& E, double s, int n_max, int N_con);

/// Default constraint depth max(10·n_max, 1000).
int default_constraint_depth(int n_max);

struct InterpolationReport {
  double C = 0.0;       // at depth N_con
  double C_half = 0.0;  // at depth N_con/2
  int argmax_n = 0;
  bool stable = false;
  bool diverging = false;
};

/// Largest sup_{0<n≤N} |T̂(n)|/(1+n)^t over annihilator functionals with
/// sup_{0≤m≤N} |T̂(−m)|/(1+m)^s ≤ 1, T̂(n) = ∑ c_j z_j^{-n}.
InterpolationReport interpolation_constant(const CircleSet& E, double s, double t, int N_con);

/// Single dual program: max |∑ c_j z_j^{-n}| under the depth-N_con constraints.
double dual_program_value(const std::vector<Complex>& z, double s, int n, int N_con);

nlohmann::json to_json(const GrowthReport& r);
nlohmann::json to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const nlohmann::json& j);

}  // namespace beurling
