#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "beurling/circle_sets.hpp"
#include "beurling/series.hpp"

namespace beurling {

/// Jet levels E₀ ⊇ E₁ ⊇ … ⊇ E_[s] describing the ideal of functions with
/// f^{(j)} = 0 on E_j. No inner-factor slot.
class JetSpec {
 public:
  JetSpec(std::vector<CircleSet> levels, double s);
  const std::vector<CircleSet>& levels() const { return levels_; }
  double s() const { return s_; }

 private:
  std::vector<CircleSet> levels_;
  double s_;
};

inline constexpr double kDefaultMembershipTol = 1e-8;
inline constexpr int kDefaultHullGrid = 4096;

struct MembershipReport {
  struct Level {
    int j = 0;
    double max_abs = 0.0;
    bool pass = true;
  };
  std::vector<Level> levels;
  bool pass = true;
};

MembershipReport jet_membership(const LaurentSeries& f, const JetSpec& jets,
                                double tol = kDefaultMembershipTol);

/// Common zeros of order k (f = f' = … = f^{(k)} = 0) of the generators:
/// grid scan of ∑∑|g^{(j)}|², golden-section refinement of each local
/// minimum, accepted where the refined objective is below tol².
/// Zeros closer than 2π/grid_size may merge.
CircleSet hull(const std::vector<LaurentSeries>& generators, int k,
               int grid_size = kDefaultHullGrid, double tol = 1e-8);

/// Hulls of orders 0..k as exactly nested levels: a lower-order point within
/// 10·tol of a higher-order one is replaced by it.
std::vector<CircleSet> nested_hulls(const std::vector<LaurentSeries>& generators, int k,
                                    int grid_size = kDefaultHullGrid, double tol = 1e-8);

nlohmann::json to_json(const MembershipReport& r);

}  // namespace beurling
