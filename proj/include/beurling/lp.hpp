#pragma once

#include <vector>

#include <Eigen/Dense>

namespace beurling {

/// Solution of  max cᵀx  s.t.  a_iᵀx ≤ b_i  (x free, b ≥ 0).
struct LpSolution {
  double value = 0.0;
  Eigen::VectorXd x;
  int iterations = 0;
};

/// Dense LP with few variables and many inequality rows, solved through its
/// dual  min bᵀy  s.t.  Aᵀy = c, y ≥ 0  by a two-phase revised simplex
/// (basis size = number of variables). Dantzig pricing, Bland's rule after
/// repeated degenerate steps. Throws NumericalFailure when the primal is
/// unbounded or the iteration cap is hit.
class InequalityLp {
 public:
  /// Rows of `A` are the constraint normals a_i.
  InequalityLp(Eigen::MatrixXd A, Eigen::VectorXd b);

  LpSolution maximize(const Eigen::VectorXd& c) const;

  Eigen::Index rows() const { return A_.rows(); }
  Eigen::Index cols() const { return A_.cols(); }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
};

}  // namespace beurling
