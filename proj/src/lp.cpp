#include "beurling/lp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "beurling/errors.hpp"

namespace beurling {

InequalityLp::InequalityLp(Eigen::MatrixXd A, Eigen::VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw PreconditionError("InequalityLp: row/rhs size mismatch");
  if ((b_.array() < 0.0).any()) throw PreconditionError("InequalityLp: rhs must be nonnegative");
}

LpSolution InequalityLp::maximize(const Eigen::VectorXd& c) const {
  const Eigen::Index M = A_.rows();
  const Eigen::Index k = A_.cols();
  if (c.size() != k) throw PreconditionError("InequalityLp: objective size mismatch");

  // Dual: min bᵀy, Aᵀy = c, y ≥ 0. Rows are sign-flipped so the artificial
  // start basis is feasible.
  Eigen::VectorXd sigma(k);
  for (Eigen::Index r = 0; r < k; ++r) sigma[r] = c[r] < 0.0 ? -1.0 : 1.0;
  const Eigen::VectorXd rhs = sigma.cwiseProduct(c);
  const Eigen::Index total = M + k;  // real columns then artificials

  auto column = [&](Eigen::Index j) -> Eigen::VectorXd {
    if (j < M) return sigma.cwiseProduct(A_.row(j).transpose());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
    e[j - M] = 1.0;
    return e;
  };

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(k));
  for (Eigen::Index r = 0; r < k; ++r) basis[static_cast<std::size_t>(r)] = M + r;
  std::vector<char> in_basis(static_cast<std::size_t>(total), 0);
  for (Eigen::Index r = 0; r < k; ++r) in_basis[static_cast<std::size_t>(M + r)] = 1;

  const double bscale = std::max(1.0, b_.cwiseAbs().maxCoeff());
  const double cost_tol = 1e-11 * bscale;
  const double pivot_tol = 1e-10;
  const long max_iter = 20000 + 20 * static_cast<long>(total);

  LpSolution sol;
  Eigen::MatrixXd B(k, k);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::VectorXd xB, pi;

  auto factor = [&]() {
    for (Eigen::Index r = 0; r < k; ++r) B.col(r) = column(basis[static_cast<std::size_t>(r)]);
    lu.compute(B);
    xB = lu.solve(rhs);
  };

  for (int phase = 1; phase <= 2; ++phase) {
    auto cost = [&](Eigen::Index j) {
      if (phase == 1) return j >= M ? 1.0 : 0.0;
      return j >= M ? 0.0 : b_[j];
    };
    int degenerate_run = 0;
    for (;;) {
      if (++sol.iterations > max_iter) {
        throw NumericalFailure("InequalityLp: iteration cap reached");
      }
      factor();
      Eigen::VectorXd cB(k);
      for (Eigen::Index r = 0; r < k; ++r) cB[r] = cost(basis[static_cast<std::size_t>(r)]);
      pi = lu.transpose().solve(cB);

      // Pricing over real columns: d_j = cost_j − πᵀ(σ∘a_j)
      const Eigen::VectorXd reduced_dot = A_ * sigma.cwiseProduct(pi);
      const bool bland = degenerate_run > 50;
      Eigen::Index entering = -1;
      double best = -cost_tol;
      for (Eigen::Index j = 0; j < M; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double d = cost(j) - reduced_dot[j];
        if (d < best) {
          entering = j;
          if (bland) break;
          best = d;
        }
      }
      if (phase == 1) {
        for (Eigen::Index j = M; j < total && entering < 0; ++j) {
          if (in_basis[static_cast<std::size_t>(j)]) continue;
          if (cost(j) - pi[j - M] < -cost_tol) entering = j;
        }
      }
      if (entering < 0) break;

      const Eigen::VectorXd u = lu.solve(column(entering));
      Eigen::Index leave = -1;
      double step = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index bj = basis[static_cast<std::size_t>(r)];
        if (phase == 2 && bj >= M && std::abs(u[r]) > pivot_tol) {
          // zero-level artificial blocks any move along this direction
          leave = r;
          step = 0.0;
          break;
        }
        if (u[r] > pivot_tol) {
          const double ratio = std::max(0.0, xB[r]) / u[r];
          if (ratio < step || (ratio == step && leave >= 0 &&
                               bj < basis[static_cast<std::size_t>(leave)])) {
            step = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) {
        throw NumericalFailure(phase == 1 ? "InequalityLp: phase 1 unbounded"
                                          : "InequalityLp: primal infeasible");
      }
      degenerate_run = step <= 1e-14 ? degenerate_run + 1 : 0;
      in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
      basis[static_cast<std::size_t>(leave)] = entering;
      in_basis[static_cast<std::size_t>(entering)] = 1;
    }
    if (phase == 1) {
      double infeas = 0.0;
      for (Eigen::Index r = 0; r < k; ++r) {
        if (basis[static_cast<std::size_t>(r)] >= M) infeas += std::max(0.0, xB[r]);
      }
      if (infeas > 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
        throw NumericalFailure("InequalityLp: objective unbounded over the constraints");
      }
    }
  }

  sol.x = sigma.cwiseProduct(pi);
  sol.value = 0.0;
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index bj = basis[static_cast<std::size_t>(r)];
    if (bj < M) sol.value += b_[bj] * std::max(0.0, xB[r]);
  }
  return sol;
}

}  // namespace beurling
