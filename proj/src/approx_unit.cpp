#include "beurling/approx_unit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "beurling/errors.hpp"

namespace beurling {

namespace {

double ratio_x(std::int64_t n) {
  return static_cast<double>(n) / static_cast<double>(n + 1);
}

void require_unit_index(std::int64_t n) {
  if (n < 1) throw PreconditionError("approximate unit index n must be >= 1");
}

// ∑_{k=lo}^{hi} x^k ω(k), k ≥ 0, accumulated term by term.
double weighted_geometric_sum(const Weight& w, double x, std::int64_t lo, std::int64_t hi) {
  double sum = 0.0;
  double xp = std::pow(x, static_cast<double>(lo));
  for (std::int64_t k = lo; k <= hi; ++k) {
    sum += xp * w(k);
    xp *= x;
  }
  return sum;
}

}  // namespace

std::int64_t en_degree_for(std::int64_t n, const Weight& w, double target) {
  require_unit_index(n);
  const double beta = w.positive_exponent();
  const double x = ratio_x(n);
  const double scale = 1.0 / static_cast<double>(n + 1);
  auto tail = [&](std::int64_t N) { return scale * power_geometric_tail(beta, N + 1, x); };
  if (tail(1) <= target) return 1;
  std::int64_t hi = 2;
  while (tail(hi) > target) {
    if (hi >= kMaxTruncationDegree) {
      throw NumericalFailure("truncation degree cap " + std::to_string(kMaxTruncationDegree) +
                             " reached before tail bound met tolerance");
    }
    hi = std::min(hi * 2, kMaxTruncationDegree);
  }
  std::int64_t lo = hi / 2;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (tail(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

ApproxUnitTruncation make_en(std::int64_t n, std::int64_t N, const Weight& w) {
  require_unit_index(n);
  if (N < 1) throw PreconditionError("make_en: degree must be >= 1");
  const double beta = w.positive_exponent();
  const double x = ratio_x(n);
  const double inv = 1.0 / static_cast<double>(n + 1);
  ApproxUnitTruncation out;
  out.n = n;
  out.degree = N;
  out.series.set(0, static_cast<double>(n) * inv);
  double xp = 1.0;
  for (std::int64_t k = 1; k <= N; ++k) {
    xp *= x;
    out.series.set(k, -xp * inv);
  }
  out.tail.value = weighted_norm(out.series, w);
  out.tail.tail_bound = inv * power_geometric_tail(beta, N + 1, x);
  return out;
}

CertifiedValue en_monomial_norm(std::int64_t n, std::int64_t j, const Weight& w, double tol) {
  require_unit_index(n);
  if (!(tol > 0.0)) throw PreconditionError("en_monomial_norm: tol must be positive");
  if (j == 0) return {0.0, 0.0};
  const double beta = w.positive_exponent();
  const double x = ratio_x(n);
  const double inv = 1.0 / static_cast<double>(n + 1);

  // Coefficient moduli of (e_n − 1)(α^j − 1):
  //  j > 0: m < j → x^m/(n+1);            m ≥ j → (x^{m−j} − x^m)/(n+1)
  //  j < 0: j ≤ m ≤ −1 → x^{m−j}/(n+1);   m ≥ 0 → x^m (1 − x^{|j|})/(n+1)
  // The infinite block ∑_{m>K} is bounded by factor·tail(β, K+1, x).
  double finite = 0.0;
  double factor = 0.0;
  std::int64_t start = 0;
  if (j > 0) {
    finite = inv * weighted_geometric_sum(w, x, 0, j - 1);
    factor = inv * (std::pow(x, -static_cast<double>(j)) - 1.0);
    start = j;
  } else {
    double xp = 1.0;
    for (std::int64_t m = j; m <= -1; ++m) {
      finite += xp * w(m);
      xp *= x;
    }
    finite *= inv;
    factor = inv * (1.0 - std::pow(x, static_cast<double>(-j)));
    start = 0;
  }

  auto tail_at = [&](std::int64_t K) { return factor * power_geometric_tail(beta, K + 1, x); };
  std::int64_t K = std::max<std::int64_t>(start, 1);
  while (tail_at(K) > tol) {
    if (K >= kMaxTruncationDegree) {
      throw NumericalFailure("en_monomial_norm: degree cap " +
                             std::to_string(kMaxTruncationDegree) + " reached");
    }
    K = std::min(2 * K, kMaxTruncationDegree);
  }
  // Sum the block m = start..K. For j > 0 use x^{m−j}(1 − x^j) to avoid x^{-j} overflow.
  double block = 0.0;
  if (j > 0) {
    const double c = 1.0 - std::pow(x, static_cast<double>(j));
    double xp = 1.0;  // x^{m−j}
    for (std::int64_t m = start; m <= K; ++m) {
      block += xp * c * w(m);
      xp *= x;
    }
  } else {
    block = (1.0 - std::pow(x, static_cast<double>(-j))) * weighted_geometric_sum(w, x, 0, K);
  }
  return {finite + inv * block, tail_at(K)};
}

ApproxUnitTruncation make_un(std::int64_t n, double s, std::int64_t N, const Weight& w) {
  if (!(s >= 0.0)) throw PreconditionError("make_un: s must be nonnegative");
  const unsigned p = static_cast<unsigned>(std::floor(s));
  const ApproxUnitTruncation e = make_en(n, N, w);
  ApproxUnitTruncation out;
  out.n = n;
  out.degree = N;
  out.series = power(e.series, p + 1);
  out.tail.value = weighted_norm(out.series, w);
  const double a = e.tail.value;
  const double tau = e.tail.tail_bound;
  out.tail.tail_bound = std::pow(a + tau, static_cast<double>(p + 1)) -
                        std::pow(a, static_cast<double>(p + 1));
  return out;
}

LaurentSeries shifted_monomial_power(Complex a, unsigned k) {
  LaurentSeries base;
  base.set(1, 1.0);
  base.set(0, -a);
  return power(base, k);
}

std::vector<DitkinPoint> ditkin_sequence(const LaurentSeries& f, const Weight& w, double s,
                                         const std::vector<std::int64_t>& n_list,
                                         const DitkinOptions& opts) {
  if (!(s >= 0.0)) throw PreconditionError("ditkin_sequence: s must be nonnegative");
  const unsigned p = static_cast<unsigned>(std::floor(s));
  const double beta = w.positive_exponent();
  {
    LaurentSeries d = f;
    for (unsigned k = 0; k <= p; ++k) {
      const double v = std::abs(eval(d, 1.0));
      if (v > opts.jet_tol) {
        throw PreconditionError("ditkin_sequence: jet condition fails at order " +
                                std::to_string(k) + " (|f^(k)(1)| = " + std::to_string(v) + ")");
      }
      d = derivative(d);
    }
  }

  std::vector<DitkinPoint> out;
  out.reserve(n_list.size());
  for (std::int64_t n : n_list) {
    require_unit_index(n);
    DitkinPoint pt;
    pt.n = n;
    if (f.empty()) {
      out.push_back(pt);
      continue;
    }
    const double nd = static_cast<double>(n);
    const double a = 1.0 + 1.0 / nd;
    const double x = 1.0 / a;
    // q = P/(−a)^{p+1},  h = q·(1 − xα)^{−(p+1)}
    LaurentSeries P = multiply(shifted_monomial_power(1.0, p + 1) -
                                   shifted_monomial_power(a, p + 1),
                               f);
    P *= 1.0 / std::pow(-a, static_cast<double>(p + 1));

    const std::int64_t lo = P.min_degree();
    const std::int64_t hi = P.max_degree();

    // Certified tail of ∑_{m>M} |h(m)| ω(m) via the ratio test on each
    // q_i·C(m−i+p, p)·x^{m−i}·(1+m)^β.
    auto tail_after = [&](std::int64_t M) {
      double total = 0.0;
      for (const auto& [i, q] : P.coeffs()) {
        const double d = static_cast<double>(M + 1 - i);  // m − i at m = M+1
        const double md = static_cast<double>(M + 1);
        const double rho = (d + p + 1.0) / (d + 1.0) * std::pow((md + 2.0) / (md + 1.0), beta) * x;
        if (!(rho < 1.0)) return std::numeric_limits<double>::infinity();
        const double log_term = std::lgamma(d + p + 1.0) - std::lgamma(d + 1.0) -
                                std::lgamma(p + 1.0) + d * std::log(x) + beta * std::log1p(md);
        total += std::abs(q) * std::exp(log_term) / (1.0 - rho);
      }
      return total;
    };
    std::int64_t M = std::max<std::int64_t>({hi + 1, opts.min_degree, 16});
    while (tail_after(M) > opts.tol) {
      if (M >= kMaxTruncationDegree) {
        throw NumericalFailure("ditkin_sequence: degree cap " +
                               std::to_string(kMaxTruncationDegree) + " reached at n = " +
                               std::to_string(n));
      }
      M = std::min(2 * M, kMaxTruncationDegree);
    }

    std::vector<Complex> h(static_cast<std::size_t>(M - lo + 1));
    for (const auto& [i, q] : P.coeffs()) h[static_cast<std::size_t>(i - lo)] = q;
    for (unsigned pass = 0; pass <= p; ++pass) {
      for (std::size_t k = 1; k < h.size(); ++k) h[k] += x * h[k - 1];
    }
    double value = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      value += std::abs(h[k]) * w(lo + static_cast<std::int64_t>(k));
    }
    pt.norm = {value, tail_after(M)};
    pt.degree = M;
    out.push_back(pt);
  }
  return out;
}

}  // namespace beurling
