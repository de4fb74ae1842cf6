#pragma once

#include <cstdint>
#include <vector>

#include "beurling/series.hpp"
#include "beurling/weights.hpp"

namespace beurling {

/// Truncated approximate unit: `series` holds the coefficients up to degree N,
/// `tail.value` its weighted norm, `tail.tail_bound` a rigorous bound on the
/// weighted norm of everything discarded.
struct ApproxUnitTruncation {
  std::int64_t n = 1;
  std::int64_t degree = 1;
  LaurentSeries series;
  CertifiedValue tail;
};

inline constexpr std::int64_t kMaxTruncationDegree = 1'000'000;

/// e_n = (α−1)/(α−1−1/n) truncated at degree N:
/// ê_n(0) = n/(n+1), ê_n(k) = −(n/(n+1))^k/(n+1).
ApproxUnitTruncation make_en(std::int64_t n, std::int64_t N, const Weight& w);

/// Smallest degree whose e_n tail bound under w is at most `target`.
/// Throws NumericalFailure past kMaxTruncationDegree.
std::int64_t en_degree_for(std::int64_t n, const Weight& w, double target);

/// ‖(e_n − 1)(α^j − 1)‖_ω from the exact two-block coefficient expansion,
/// the infinite block truncated with a certified tail ≤ tol.
CertifiedValue en_monomial_norm(std::int64_t n, std::int64_t j, const Weight& w,
                                double tol = 1e-10);

/// u_n = e_n^{[s]+1}: the ([s]+1)-fold product of the degree-N truncation of
/// e_n; tail from submultiplicativity, (‖E‖+τ)^{p+1} − ‖E‖^{p+1}.
ApproxUnitTruncation make_un(std::int64_t n, double s, std::int64_t N, const Weight& w);

struct DitkinPoint {
  std::int64_t n = 0;
  CertifiedValue norm;  // |‖(u_n−1)f‖_ω − value| ≤ tail_bound
  std::int64_t degree = 0;
};

struct DitkinOptions {
  std::int64_t min_degree = 0;  // explicit expansion degree floor; 0 = automatic
  double tol = 1e-10;           // target for the certified tail
  double jet_tol = 1e-10;       // |f^{(k)}(1)| tolerance for the precondition
};

/// Certified ‖(u_n − 1) f‖_ω for every n in n_list. f must vanish at 1 to
/// order [s]. The product is expanded exactly through the rational form
/// (u_n − 1) f = [(α−1)^{p+1} − (α−1−1/n)^{p+1}] f / (α−1−1/n)^{p+1}.
std::vector<DitkinPoint> ditkin_sequence(const LaurentSeries& f, const Weight& w, double s,
                                         const std::vector<std::int64_t>& n_list,
                                         const DitkinOptions& opts = {});

/// Binomial-power helper: (α − a)^k as a series.
LaurentSeries shifted_monomial_power(Complex a, unsigned k);

}  // namespace beurling
