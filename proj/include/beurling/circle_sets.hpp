#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "beurling/series.hpp"

namespace beurling {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPointResolution = 1e-12;

/// Open arc {start + u : 0 < u < length} of the circle, angles in radians.
struct Arc {
  double start = 0.0;
  double length = 0.0;
};

/// Closed subset of the circle given by finitely many angles. Countable sets
/// are represented by a truncation plus the points declared to be
/// accumulation points of the full set.
class CircleSet {
 public:
  CircleSet() = default;
  /// Angles are reduced mod 2π and sorted; points closer than 1e-12 merge.
  /// `limit_indices` index into `angles` as given.
  explicit CircleSet(std::vector<double> angles, const std::vector<std::size_t>& limit_indices = {});

  static CircleSet from_points(const std::vector<Complex>& zs);

  const std::vector<double>& points() const { return points_; }
  const std::vector<bool>& limit_flags() const { return is_limit_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Complementary arcs, one per point: from points[i] to its successor.
  std::vector<Arc> gaps() const;

  std::vector<Complex> unimodular() const;

 private:
  std::vector<double> points_;
  std::vector<bool> is_limit_;
};

/// Arc-length distance from e^{it} to E.
double distance(double t, const CircleSet& E);

/// ∫_0^a log⁺(1/u) du = a(1 − ln a) for a ≤ 1, and 1 beyond.
double log_plus_primitive(double a);

/// Contribution 2·G(ℓ/2) of one complementary arc of length ℓ to the
/// Carleson integral.
double gap_contribution(double length);

/// ∫_0^{2π} log⁺ 1/d(e^{it},E) dt by gap decomposition. The tail estimates
/// the gaps hidden below each declared accumulation point by continuing the
/// observed gap ratio geometrically; it is an estimate, labelled as such.
CertifiedValue carleson_integral(const CircleSet& E, double tol = 1e-12);

/// ∫ over the arc [a, a+ℓ] of log⁺ 1/d(e^{it},E) dt, ℓ ≤ 2π, closed form.
/// Precomputes gap prefix sums; reuse for many arcs.
class ArcIntegrator {
 public:
  explicit ArcIntegrator(const CircleSet& E);
  double integrate(double start, double length) const;

 private:
  // position within the gap starting at points[i]; u in [0, gap_i]
  double partial(std::size_t gap, double u) const;
  std::vector<double> starts_;   // gap starts (= points)
  std::vector<double> lengths_;  // gap lengths
  std::vector<double> prefix_;   // prefix sums of full-gap integrals, doubled for wrap
  std::vector<double> cumlen_;   // prefix sums of gap lengths, same indexing
};

struct ATWReport {
  std::string arc_family;
  double C1 = 0.0;
  double C2 = 0.0;
  double max_residual = 0.0;
  // envelope per scale m: |L| = 2^{-m} (normalized arc measure), averaged integral
  std::vector<double> log_inv_length;
  std::vector<double> envelope;
  double coarse_slope = 0.0;
  double fine_slope = 0.0;
  bool consistent = true;
  std::string note;
};

/// Fits C₁ log(1/|L|) + C₂ to the upper envelope of arc averages over a
/// dyadic family (lengths 2π·2^{-m}) plus arcs centered at each point.
/// |L| is the normalized arc measure (|𝕋| = 1).
ATWReport atw_check(const CircleSet& E, int scales, int arcs_per_scale);

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
};

/// Nested interval scheme: levels[0] = {[a₀, b₀]}, levels[n] holds 2^n
/// intervals, removed[n-1] the 2^{n-1} open gaps taken out at step n.
struct CantorScheme {
  Interval base;
  std::vector<std::vector<Interval>> levels;
  std::vector<std::vector<Interval>> removed;
  int depth() const { return static_cast<int>(levels.size()) - 1; }
  /// Endpoints of the deepest level as a circle set (angles).
  CircleSet endpoint_set() const;
};

struct SchemeCheck {
  bool counts_ok = true;
  bool lengths_ok = true;
  bool nesting_ok = true;
  std::string first_failure;
  bool ok() const { return counts_ok && lengths_ok && nesting_ok; }
};
SchemeCheck verify_scheme(const CantorScheme& scheme);

/// Per-level gap lengths with multiplicities; lets self-similar sets be
/// summed to depths that cannot be enumerated.
struct GapProfile {
  std::vector<std::vector<std::pair<double, double>>> levels;  // (length, multiplicity)
  static GapProfile middle_thirds(double a, double b, int depth);
};

/// Partial sums of |J| ln(1/|J|): per level for schemes and profiles, per gap
/// (longest first) for circle sets.
std::vector<double> carleson_gap_sum(const GapProfile& profile);
std::vector<double> carleson_gap_sum(const CantorScheme& scheme);
std::vector<double> carleson_gap_sum(const CircleSet& E);

/// Partial sums of ∑_{k≤n} L((k−1) ln 3 − ln L)(2/3)^{k−1}, L = b₀ − a₀.
std::vector<double> scheme_gap_series(double base_length, int depth);
/// Closed-form bound on the Carleson integral of any scheme on a base of
/// length L ≤ 1/e: 2 + L(1 + ln 2) + L(6 ln 3 − 3 ln L).
double scheme_carleson_bound(double base_length);

/// Interval-supported perfect set P accessed through queries.
class PerfectSetOracle {
 public:
  virtual ~PerfectSetOracle() = default;
  virtual double lower() const = 0;
  virtual double upper() const = 0;
  virtual bool contains(double x) const = 0;
  /// x is a limit of P from both sides at the given resolution.
  virtual bool two_sided(double x, double resolution) const = 0;
  /// Largest two-sided point of P in [floor, target].
  virtual std::optional<double> two_sided_at_or_below(double target, double floor) const = 0;
  /// Smallest two-sided point of P in [target, ceil].
  virtual std::optional<double> two_sided_at_or_above(double target, double ceil) const = 0;
};

class IntervalOracle final : public PerfectSetOracle {
 public:
  IntervalOracle(double a, double b);
  double lower() const override { return a_; }
  double upper() const override { return b_; }
  bool contains(double x) const override;
  bool two_sided(double x, double resolution) const override;
  std::optional<double> two_sided_at_or_below(double target, double floor) const override;
  std::optional<double> two_sided_at_or_above(double target, double ceil) const override;

 private:
  double a_, b_;
};

/// Middle-thirds Cantor set on [a, b], resolved to depth ~ 3^{-27}.
class CantorOracle final : public PerfectSetOracle {
 public:
  CantorOracle(double a, double b, int resolution_depth = 27);
  double lower() const override { return a_; }
  double upper() const override { return b_; }
  bool contains(double x) const override;
  bool two_sided(double x, double resolution) const override;
  std::optional<double> two_sided_at_or_below(double target, double floor) const override;
  std::optional<double> two_sided_at_or_above(double target, double ceil) const override;

 private:
  double to_unit(double x) const { return (x - a_) / (b_ - a_); }
  double from_unit(double u) const { return a_ + u * (b_ - a_); }
  std::int64_t cell_of(double u) const;  // depth-D cell index of u ∈ [0, 1]
  double a_, b_;
  int depth_;
};

inline constexpr double kMaxBaseLength = 0.36787944117144233;  // 1/e

/// Nested Cantor-type scheme inside P with gaps whose endpoints are two-sided
/// points of P and level-n intervals of length ≤ 3^{-n}(b₀ − a₀). Each step
/// removes the middle third of the parent, snapped outward to P∖P₀.
CantorScheme build_carleson_perfect_subset(const PerfectSetOracle& P, int depth,
                                           double max_base_length = kMaxBaseLength);

struct OneSidedPartition {
  std::vector<std::size_t> one_sided;  // P₀ candidates (indices into points())
  std::vector<std::size_t> two_sided;
  double resolution = 0.0;
};

/// Resolution-relative split: a point whose left or right neighbour is
/// farther than `resolution` is a P₀ candidate.
OneSidedPartition classify_one_sided(const CircleSet& P, double resolution);

nlohmann::json to_json(const CircleSet& E);
CircleSet circle_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CantorScheme& s);
nlohmann::json to_json(const ATWReport& r);

}  // namespace beurling
