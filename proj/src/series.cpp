#include "beurling/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "beurling/errors.hpp"

namespace beurling {

LaurentSeries::LaurentSeries(const Map& coeffs) {
  for (const auto& [n, c] : coeffs) {
    if (c != Complex(0.0)) coeffs_.emplace(n, c);
  }
}

LaurentSeries LaurentSeries::monomial(std::int64_t n, Complex c) {
  LaurentSeries f;
  f.set(n, c);
  return f;
}

Complex LaurentSeries::operator[](std::int64_t n) const {
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? Complex(0.0) : it->second;
}

void LaurentSeries::set(std::int64_t n, Complex c) {
  if (c == Complex(0.0)) {
    coeffs_.erase(n);
  } else {
    coeffs_[n] = c;
  }
}

std::int64_t LaurentSeries::min_degree() const {
  return coeffs_.empty() ? 0 : coeffs_.begin()->first;
}

std::int64_t LaurentSeries::max_degree() const {
  return coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
}

LaurentSeries& LaurentSeries::operator+=(const LaurentSeries& o) {
  for (const auto& [n, c] : o.coeffs_) set(n, (*this)[n] + c);
  return *this;
}

LaurentSeries& LaurentSeries::operator-=(const LaurentSeries& o) {
  for (const auto& [n, c] : o.coeffs_) set(n, (*this)[n] - c);
  return *this;
}

LaurentSeries& LaurentSeries::operator*=(Complex c) {
  if (c == Complex(0.0)) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [n, v] : coeffs_) v *= c;
  return *this;
}

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) { return multiply(a, b); }

double weighted_norm(const LaurentSeries& f, const Weight& w) {
  double sum = 0.0;
  for (const auto& [n, c] : f.coeffs()) sum += std::abs(c) * w(n);
  return sum;
}

double weighted_norm(const LaurentSeries& f, const WeightFn& w) {
  double sum = 0.0;
  for (const auto& [n, c] : f.coeffs()) sum += std::abs(c) * w(n);
  return sum;
}

LaurentSeries multiply(const LaurentSeries& f, const LaurentSeries& g) {
  if (f.empty() || g.empty()) return {};
  const std::int64_t f0 = f.min_degree(), g0 = g.min_degree();
  const std::size_t fspan = static_cast<std::size_t>(f.max_degree() - f0 + 1);
  const std::size_t gspan = static_cast<std::size_t>(g.max_degree() - g0 + 1);
  // Dense convolution when the supports are reasonably filled, sparse otherwise.
  if (fspan * gspan <= 64 * f.size() * g.size() + 4096) {
    std::vector<Complex> a(fspan), b(gspan), out(fspan + gspan - 1);
    for (const auto& [n, c] : f.coeffs()) a[static_cast<std::size_t>(n - f0)] = c;
    for (const auto& [n, c] : g.coeffs()) b[static_cast<std::size_t>(n - g0)] = c;
    for (std::size_t i = 0; i < fspan; ++i) {
      if (a[i] == Complex(0.0)) continue;
      for (std::size_t k = 0; k < gspan; ++k) out[i + k] += a[i] * b[k];
    }
    LaurentSeries h;
    for (std::size_t i = 0; i < out.size(); ++i) {
      h.set(f0 + g0 + static_cast<std::int64_t>(i), out[i]);
    }
    return h;
  }
  LaurentSeries::Map acc;
  for (const auto& [m, a] : f.coeffs()) {
    for (const auto& [n, b] : g.coeffs()) acc[m + n] += a * b;
  }
  return LaurentSeries(acc);
}

LaurentSeries power(const LaurentSeries& f, unsigned k) {
  LaurentSeries out = LaurentSeries::constant(1.0);
  for (unsigned i = 0; i < k; ++i) out = multiply(out, f);
  return out;
}

LaurentSeries derivative(const LaurentSeries& f, unsigned k) {
  LaurentSeries cur = f;
  for (unsigned step = 0; step < k; ++step) {
    LaurentSeries next;
    for (const auto& [n, c] : cur.coeffs()) {
      next.set(n - 1, static_cast<double>(n) * c);
    }
    cur = std::move(next);
  }
  return cur;
}

Complex eval_formal(const LaurentSeries& f, Complex z) {
  // Horner on the nonnegative and negative parts separately.
  Complex pos = 0.0, neg = 0.0;
  if (f.empty()) return 0.0;
  const std::int64_t hi = f.max_degree(), lo = f.min_degree();
  if (hi >= 0) {
    for (std::int64_t n = hi; n >= 0; --n) pos = pos * z + f[n];
  }
  if (lo < 0) {
    const Complex zi = 1.0 / z;
    for (std::int64_t n = lo; n <= -1; ++n) neg = (neg + f[n]) * zi;
  }
  return pos + neg;
}

Complex eval(const LaurentSeries& f, Complex z) {
  if (std::abs(std::abs(z) - 1.0) > 1e-12) {
    throw PreconditionError("eval: point is not on the unit circle");
  }
  return eval_formal(f, z);
}

LaurentSeries divide_by_root(const LaurentSeries& f, Complex z0, double tol) {
  if (std::abs(std::abs(z0) - 1.0) > 1e-12) {
    throw PreconditionError("divide_by_root: z0 must be unimodular");
  }
  const Complex residual = eval(f, z0);
  if (std::abs(residual) > tol) {
    throw PreconditionError("divide_by_root: |f(z0)| = " + std::to_string(std::abs(residual)) +
                            " exceeds tolerance");
  }
  // f - f(z0) = ∑ f̂(n)(α^n - z0^n); each term is divided in closed form.
  // Positive side: c_p = f̂(p+1) + z0·c_{p+1}, p from max-1 down to 0.
  // Negative side: c_p = z0^{-1}(c_{p-1} - f̂(p)), p from min up to -1.
  LaurentSeries g;
  if (f.empty()) return g;
  const Complex zi = 1.0 / z0;
  Complex c = 0.0;
  for (std::int64_t p = f.max_degree() - 1; p >= 0; --p) {
    c = f[p + 1] + z0 * c;
    g.set(p, c);
  }
  c = 0.0;
  for (std::int64_t p = f.min_degree(); p <= -1; ++p) {
    c = zi * (c - f[p]);
    g.set(p, c);
  }
  return g;
}

double tail_bound(double beta, std::int64_t j, double x) {
  if (!(beta >= 0.0 && beta < 1.0)) throw PreconditionError("tail_bound: requires 0 <= beta < 1");
  if (!(x >= 0.0 && x < 1.0)) throw PreconditionError("tail_bound: requires 0 <= x < 1");
  if (j < 0) throw PreconditionError("tail_bound: requires j >= 0");
  const double jd = static_cast<double>(j);
  return std::pow(jd + 1.0, beta) * std::pow(x, jd) / (1.0 - x) +
         std::pow(x, jd + 1.0) / std::pow(1.0 - x, beta + 1.0);
}

double power_geometric_tail(double s, std::int64_t j, double x) {
  if (s < 1.0) return tail_bound(s, j, x);
  if (!(x >= 0.0 && x < 1.0)) throw PreconditionError("power_geometric_tail: requires 0 <= x < 1");
  if (x == 0.0) return j == 0 ? 1.0 : 0.0;
  // term ratio ((k+2)/(k+1))^s·x decreases in k; sum explicitly until it drops below 1
  double sum = 0.0;
  std::int64_t k = j;
  auto term = [&](std::int64_t i) {
    const double id = static_cast<double>(i);
    return std::exp(s * std::log1p(id) + id * std::log(x));
  };
  for (;; ++k) {
    const double kd = static_cast<double>(k);
    const double rho = std::pow((kd + 2.0) / (kd + 1.0), s) * x;
    if (rho < 1.0) return sum + term(k) / (1.0 - rho);
    sum += term(k);
  }
}

RatioBounds ratio_bounds(const Weight& w, std::int64_t lo, std::int64_t hi) {
  RatioBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (std::int64_t n = lo; n < hi; ++n) {
    const double r = w(n + 1) / w(n);
    b.inf_ratio = std::min(b.inf_ratio, r);
    b.sup_ratio = std::max(b.sup_ratio, r);
  }
  return b;
}

bool DerivativeNormComparison::holds() const {
  const double slack = 1e-12 * std::max(1.0, middle);
  return lower <= middle + slack && middle <= upper + slack;
}

DerivativeNormComparison compare_derivative_norms(const LaurentSeries& f, const Weight& w,
                                                  std::int64_t margin) {
  DerivativeNormComparison out;
  const std::int64_t lo = f.min_degree() - margin;
  const std::int64_t hi = f.max_degree() + margin;
  out.bounds = ratio_bounds(w, lo, hi);
  const WeightFn w1 = [&w](std::int64_t n) {
    return w(n) / (1.0 + static_cast<double>(std::llabs(n)));
  };
  const double dnorm = weighted_norm(derivative(f), w1);
  out.middle = weighted_norm(f, w);
  out.lower = out.bounds.inf_ratio * dnorm;
  out.upper = std::abs(f[0]) * w(0) + 3.0 * out.bounds.sup_ratio * dnorm;
  return out;
}

nlohmann::json to_json(const LaurentSeries& f) {
  auto j = nlohmann::json::array();
  for (const auto& [n, c] : f.coeffs()) j.push_back({n, c.real(), c.imag()});
  return j;
}

LaurentSeries series_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("series must be a list of [n, re, im] triples");
  LaurentSeries f;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3) throw ConfigError("series entry must be [n, re, im]");
    const auto n = t[0].get<std::int64_t>();
    f.set(n, f[n] + Complex(t[1].get<double>(), t[2].get<double>()));
  }
  return f;
}

}  // namespace beurling
