#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

#include "beurling/weights.hpp"

namespace beurling {

using Complex = std::complex<double>;

/// Finitely supported two-sided Fourier series ∑ f̂(n) z^n. Zero coefficients
/// are never stored.
class LaurentSeries {
 public:
  using Map = std::map<std::int64_t, Complex>;

  LaurentSeries() = default;
  explicit LaurentSeries(const Map& coeffs);

  /// c·α^n; α is the identity function z ↦ z.
  static LaurentSeries monomial(std::int64_t n, Complex c = 1.0);
  static LaurentSeries constant(Complex c) { return monomial(0, c); }

  Complex operator[](std::int64_t n) const;
  void set(std::int64_t n, Complex c);

  const Map& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }
  std::int64_t min_degree() const;
  std::int64_t max_degree() const;

  LaurentSeries& operator+=(const LaurentSeries& o);
  LaurentSeries& operator-=(const LaurentSeries& o);
  LaurentSeries& operator*=(Complex c);

  friend LaurentSeries operator+(LaurentSeries a, const LaurentSeries& b) { return a += b; }
  friend LaurentSeries operator-(LaurentSeries a, const LaurentSeries& b) { return a -= b; }
  friend LaurentSeries operator*(LaurentSeries a, Complex c) { return a *= c; }
  friend LaurentSeries operator*(Complex c, LaurentSeries a) { return a *= c; }
  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);

 private:
  Map coeffs_;
};

/// Carrier for a truncated nonnegative quantity together with a rigorous
/// bound on what the truncation discarded.
struct CertifiedValue {
  double value = 0.0;
  double tail_bound = 0.0;
  double upper() const { return value + tail_bound; }
};

using WeightFn = std::function<double(std::int64_t)>;

double weighted_norm(const LaurentSeries& f, const Weight& w);
double weighted_norm(const LaurentSeries& f, const WeightFn& w);

/// Cauchy product.
LaurentSeries multiply(const LaurentSeries& f, const LaurentSeries& g);
LaurentSeries power(const LaurentSeries& f, unsigned k);

/// k-th complex z-derivative: f̂'(n) = (n+1) f̂(n+1).
LaurentSeries derivative(const LaurentSeries& f, unsigned k = 1);

/// Point evaluation on the unit circle; |z| must be 1 within 1e-12.
Complex eval(const LaurentSeries& f, Complex z);

/// Formal evaluation at any nonzero z (no circle check); used for interior
/// consistency checks of one-sided series.
Complex eval_formal(const LaurentSeries& f, Complex z);

inline constexpr double kDefaultDivisionTol = 1e-10;

/// g with (α − z0)·g = f − f(z0). Requires |f(z0)| ≤ tol.
LaurentSeries divide_by_root(const LaurentSeries& f, Complex z0, double tol = kDefaultDivisionTol);

/// Upper bound for ∑_{k≥j} (1+k)^β x^k, valid for 0 ≤ β < 1, 0 ≤ x < 1.
double tail_bound(double beta, std::int64_t j, double x);

/// Upper bound for ∑_{k≥j} (1+k)^s x^k for any s ≥ 0: the two-term bound
/// above when s < 1, a ratio-test geometric bound otherwise.
double power_geometric_tail(double s, std::int64_t j, double x);

/// Window constants A = inf ω(n+1)/ω(n), B = sup ω(n+1)/ω(n) over [lo, hi).
struct RatioBounds {
  double inf_ratio = 0.0;
  double sup_ratio = 0.0;
};
RatioBounds ratio_bounds(const Weight& w, std::int64_t lo, std::int64_t hi);

/// Both sides of the derivative-norm comparison for f under w, with ω₁ = ω/(1+|n|)
/// and A, B estimated on the support window widened by `margin`.
struct DerivativeNormComparison {
  double lower = 0.0;   // A·‖f'‖_{ω₁}
  double middle = 0.0;  // ‖f‖_ω
  double upper = 0.0;   // |f̂(0)|ω(0) + 3B‖f'‖_{ω₁}
  RatioBounds bounds;
  bool holds() const;
};
DerivativeNormComparison compare_derivative_norms(const LaurentSeries& f, const Weight& w,
                                                  std::int64_t margin = 10);

/// [[n, re, im], ...] sorted by n.
nlohmann::json to_json(const LaurentSeries& f);
LaurentSeries series_from_json(const nlohmann::json& j);

}  // namespace beurling
