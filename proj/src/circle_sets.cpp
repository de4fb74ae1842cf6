#include "beurling/circle_sets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "beurling/errors.hpp"

namespace beurling {

namespace {

double reduce_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double xlog_inv(double x) { return x > 0.0 ? x * std::log(1.0 / x) : 0.0; }

// Least-squares slope of y on x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y,
                        std::size_t lo, std::size_t hi) {
  const double n = static_cast<double>(hi - lo);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

CircleSet::CircleSet(std::vector<double> angles, const std::vector<std::size_t>& limit_indices) {
  std::vector<std::pair<double, bool>> tagged(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!std::isfinite(angles[i])) throw PreconditionError("circle set: non-finite angle");
    tagged[i] = {reduce_angle(angles[i]), false};
  }
  for (std::size_t idx : limit_indices) {
    if (idx >= angles.size()) throw PreconditionError("circle set: limit index out of range");
    tagged[idx].second = true;
  }
  std::sort(tagged.begin(), tagged.end());
  for (const auto& [theta, lim] : tagged) {
    if (!points_.empty() && theta - points_.back() <= kPointResolution) {
      is_limit_.back() = is_limit_.back() || lim;
      continue;
    }
    points_.push_back(theta);
    is_limit_.push_back(lim);
  }
  // wrap-around merge (a point just below 2π and one at 0)
  if (points_.size() > 1 && points_.front() + kTwoPi - points_.back() <= kPointResolution) {
    is_limit_.front() = is_limit_.front() || is_limit_.back();
    points_.pop_back();
    is_limit_.pop_back();
  }
}

CircleSet CircleSet::from_points(const std::vector<Complex>& zs) {
  std::vector<double> angles;
  angles.reserve(zs.size());
  for (const Complex& z : zs) angles.push_back(std::arg(z));
  return CircleSet(std::move(angles));
}

std::vector<Arc> CircleSet::gaps() const {
  std::vector<Arc> out;
  const std::size_t n = points_.size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? points_[i + 1] : points_[0] + kTwoPi;
    out.push_back({points_[i], next - points_[i]});
  }
  return out;
}

std::vector<Complex> CircleSet::unimodular() const {
  std::vector<Complex> out;
  out.reserve(points_.size());
  for (double t : points_) out.push_back(std::polar(1.0, t));
  return out;
}

double distance(double t, const CircleSet& E) {
  if (E.empty()) throw PreconditionError("distance: empty set");
  const double r = reduce_angle(t);
  const auto& p = E.points();
  auto it = std::lower_bound(p.begin(), p.end(), r);
  auto arc = [r](double theta) {
    const double d = std::abs(r - theta);
    return std::min(d, kTwoPi - d);
  };
  double best = arc(it == p.end() ? p.front() : *it);
  best = std::min(best, arc(it == p.begin() ? p.back() : *std::prev(it)));
  return best;
}

double log_plus_primitive(double a) {
  if (a <= 0.0) return 0.0;
  if (a >= 1.0) return 1.0;
  return a * (1.0 - std::log(a));
}

double gap_contribution(double length) { return 2.0 * log_plus_primitive(0.5 * length); }

CertifiedValue carleson_integral(const CircleSet& E, double tol) {
  if (E.empty()) throw PreconditionError("carleson_integral: empty set");
  const auto gaps = E.gaps();
  CertifiedValue out;
  for (const Arc& g : gaps) out.value += gap_contribution(g.length);

  // Hidden gaps next to each declared limit: the two gaps further out on that
  // side give a ratio r; the gap adjacent to the limit is modelled as
  // subdivided geometrically, ℓ₀(1−r)r^k.
  const std::size_t n = gaps.size();
  if (n < 3) return out;
  auto gap_len = [&](std::ptrdiff_t i) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return gaps[static_cast<std::size_t>(((i % m) + m) % m)].length;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!E.limit_flags()[i]) continue;
    const auto ii = static_cast<std::ptrdiff_t>(i);
    // right side: gaps i, i+1, i+2; left side: gaps i-1, i-2, i-3
    const std::array<std::array<double, 3>, 2> sides{
        {{gap_len(ii), gap_len(ii + 1), gap_len(ii + 2)},
         {gap_len(ii - 1), gap_len(ii - 2), gap_len(ii - 3)}}};
    for (const auto& s : sides) {
      const double l0 = s[0];
      const double r = s[1] / s[2];
      if (!(r < 1.0) || !(l0 <= s[1] * (1.0 + 1e-9))) continue;
      double refined = 0.0;
      double piece = l0 * (1.0 - r);
      while (piece > 0.0) {
        const double c = gap_contribution(piece);
        refined += c;
        if (c < tol * 1e-6) break;
        piece *= r;
      }
      out.tail_bound += std::max(0.0, refined - gap_contribution(l0));
    }
  }
  return out;
}

ArcIntegrator::ArcIntegrator(const CircleSet& E) {
  if (E.empty()) throw PreconditionError("ArcIntegrator: empty set");
  for (const Arc& g : E.gaps()) {
    starts_.push_back(g.start);
    lengths_.push_back(g.length);
  }
  const std::size_t n = lengths_.size();
  prefix_.assign(2 * n + 2, 0.0);
  cumlen_.assign(2 * n + 2, 0.0);
  for (std::size_t m = 0; m < 2 * n + 1; ++m) {
    prefix_[m + 1] = prefix_[m] + gap_contribution(lengths_[m % n]);
    cumlen_[m + 1] = cumlen_[m] + lengths_[m % n];
  }
}

double ArcIntegrator::partial(std::size_t gap, double u) const {
  const double l = lengths_[gap];
  u = std::clamp(u, 0.0, l);
  const double half = 0.5 * l;
  if (u <= half) return log_plus_primitive(u);
  return 2.0 * log_plus_primitive(half) - log_plus_primitive(l - u);
}

double ArcIntegrator::integrate(double start, double length) const {
  if (!(length >= 0.0) || length > kTwoPi + 1e-12) {
    throw PreconditionError("ArcIntegrator: arc length must lie in [0, 2π]");
  }
  const std::size_t n = lengths_.size();
  const double s = reduce_angle(start);
  // gap containing s
  std::size_t i;
  double u0;
  auto it = std::upper_bound(starts_.begin(), starts_.end(), s);
  if (it == starts_.begin()) {
    i = n - 1;
    u0 = s + kTwoPi - starts_[n - 1];
  } else {
    i = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
    u0 = s - starts_[i];
  }
  const double end = cumlen_[i] + u0 + length;
  auto jt = std::upper_bound(cumlen_.begin(), cumlen_.end(), end);
  std::size_t m = static_cast<std::size_t>(std::distance(cumlen_.begin(), jt)) - 1;
  m = std::clamp(m, i, 2 * n);
  double acc = prefix_[m] - prefix_[i] - partial(i, u0);
  acc += partial(m % n, end - cumlen_[m]);
  return acc;
}

ATWReport atw_check(const CircleSet& E, int scales, int arcs_per_scale) {
  if (scales < 3) throw PreconditionError("atw_check: scales must be >= 3");
  if (arcs_per_scale < 1) throw PreconditionError("atw_check: arcs_per_scale must be >= 1");
  if (E.empty()) throw PreconditionError("atw_check: empty set");
  const ArcIntegrator integ(E);
  ATWReport r;
  r.arc_family = "dyadic lengths 2π·2^{-m}, m = 1.." + std::to_string(scales) + ", " +
                 std::to_string(arcs_per_scale) + " rotations per scale, plus arcs centered at " +
                 std::to_string(E.size()) + " set points";
  for (int m = 1; m <= scales; ++m) {
    const double len = kTwoPi * std::ldexp(1.0, -m);
    double best = 0.0;
    for (int k = 0; k < arcs_per_scale; ++k) {
      const double a = kTwoPi * k / arcs_per_scale;
      best = std::max(best, integ.integrate(a, len) / len);
    }
    for (double theta : E.points()) {
      best = std::max(best, integ.integrate(theta - 0.5 * len, len) / len);
    }
    r.log_inv_length.push_back(m * std::log(2.0));
    r.envelope.push_back(best);
  }
  const auto& x = r.log_inv_length;
  const auto& y = r.envelope;
  const std::size_t S = x.size();
  r.C1 = std::max(0.0, regression_slope(x, y, 0, S));
  double c2 = 0.0;
  for (std::size_t i = 0; i < S; ++i) c2 = std::max(c2, y[i] - r.C1 * x[i]);
  r.C2 = c2;
  r.max_residual = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < S; ++i) {
    r.max_residual = std::max(r.max_residual, y[i] - (r.C1 * x[i] + r.C2));
  }
  const std::size_t half = S / 2;
  r.coarse_slope = regression_slope(x, y, 0, half);
  r.fine_slope = regression_slope(x, y, half, S);
  r.consistent = r.fine_slope <= 1.5 * std::max(r.coarse_slope, 1.0);
  r.note = "finite-depth evidence; verdict compares envelope slopes on fine vs coarse scales";
  return r;
}

CircleSet CantorScheme::endpoint_set() const {
  std::vector<double> angles;
  if (levels.empty()) return {};
  for (const Interval& I : levels.back()) {
    angles.push_back(I.a);
    angles.push_back(I.b);
  }
  return CircleSet(std::move(angles));
}

SchemeCheck verify_scheme(const CantorScheme& scheme) {
  SchemeCheck c;
  const double L = scheme.base.length();
  for (std::size_t n = 0; n < scheme.levels.size(); ++n) {
    const auto& lv = scheme.levels[n];
    if (lv.size() != (std::size_t{1} << n)) {
      c.counts_ok = false;
      if (c.first_failure.empty()) c.first_failure = "interval count at level " + std::to_string(n);
    }
    if (n > 0 && scheme.removed.size() >= n &&
        scheme.removed[n - 1].size() != (std::size_t{1} << (n - 1))) {
      c.counts_ok = false;
      if (c.first_failure.empty()) c.first_failure = "gap count at level " + std::to_string(n);
    }
    const double cap = L * std::pow(3.0, -static_cast<double>(n)) * (1.0 + 1e-12);
    for (const Interval& I : lv) {
      if (!(I.length() > 0.0) || I.length() > cap) {
        c.lengths_ok = false;
        if (c.first_failure.empty()) c.first_failure = "interval length at level " + std::to_string(n);
      }
    }
    if (n > 0) {
      // each child inside its parent, children in order
      const auto& parents = scheme.levels[n - 1];
      for (std::size_t k = 0; k < lv.size(); ++k) {
        const Interval& P = parents[std::min(k / 2, parents.size() - 1)];
        if (lv[k].a < P.a || lv[k].b > P.b) {
          c.nesting_ok = false;
          if (c.first_failure.empty()) c.first_failure = "nesting at level " + std::to_string(n);
        }
      }
    }
  }
  if (scheme.removed.size() + 1 != scheme.levels.size()) {
    c.counts_ok = false;
    if (c.first_failure.empty()) c.first_failure = "levels/removed size mismatch";
  }
  return c;
}

GapProfile GapProfile::middle_thirds(double a, double b, int depth) {
  GapProfile p;
  const double L = b - a;
  for (int n = 1; n <= depth; ++n) {
    p.levels.push_back({{L * std::pow(3.0, -n), std::ldexp(1.0, n - 1)}});
  }
  return p;
}

std::vector<double> carleson_gap_sum(const GapProfile& profile) {
  std::vector<double> out;
  double acc = 0.0;
  for (const auto& lv : profile.levels) {
    for (const auto& [len, mult] : lv) acc += mult * xlog_inv(len);
    out.push_back(acc);
  }
  return out;
}

std::vector<double> carleson_gap_sum(const CantorScheme& scheme) {
  GapProfile p;
  for (const auto& lv : scheme.removed) {
    std::vector<std::pair<double, double>> row;
    row.reserve(lv.size());
    for (const Interval& J : lv) row.emplace_back(J.length(), 1.0);
    p.levels.push_back(std::move(row));
  }
  return carleson_gap_sum(p);
}

std::vector<double> carleson_gap_sum(const CircleSet& E) {
  std::vector<double> lens;
  for (const Arc& g : E.gaps()) lens.push_back(g.length);
  std::sort(lens.begin(), lens.end(), std::greater<>());
  std::vector<double> out;
  double acc = 0.0;
  for (double l : lens) {
    acc += xlog_inv(l);
    out.push_back(acc);
  }
  return out;
}

std::vector<double> scheme_gap_series(double base_length, int depth) {
  std::vector<double> out;
  double acc = 0.0;
  const double L = base_length;
  for (int k = 1; k <= depth; ++k) {
    acc += L * ((k - 1) * std::log(3.0) - std::log(L)) * std::pow(2.0 / 3.0, k - 1);
    out.push_back(acc);
  }
  return out;
}

double scheme_carleson_bound(double base_length) {
  const double L = base_length;
  return 2.0 + L * (1.0 + std::log(2.0)) + L * (6.0 * std::log(3.0) - 3.0 * std::log(L));
}

// ---------------------------------------------------------------- oracles

IntervalOracle::IntervalOracle(double a, double b) : a_(a), b_(b) {
  if (!(b > a)) throw PreconditionError("IntervalOracle: requires a < b");
}

bool IntervalOracle::contains(double x) const { return x >= a_ && x <= b_; }

bool IntervalOracle::two_sided(double x, double) const { return x > a_ && x < b_; }

std::optional<double> IntervalOracle::two_sided_at_or_below(double target, double floor) const {
  const double x = std::min(target, b_ - 2.0 * kPointResolution);
  if (x < floor || x <= a_) return std::nullopt;
  return x;
}

std::optional<double> IntervalOracle::two_sided_at_or_above(double target, double ceil) const {
  const double x = std::max(target, a_ + 2.0 * kPointResolution);
  if (x > ceil || x >= b_) return std::nullopt;
  return x;
}

namespace {

// Depth-D cells [k, k+1)·3^{-D} of the unit interval; a Cantor cell has only
// ternary digits 0 and 2 in k.
std::int64_t pow3(int d) {
  std::int64_t r = 1;
  for (int i = 0; i < d; ++i) r *= 3;
  return r;
}

bool is_cantor_cell(std::int64_t k) {
  for (; k > 0; k /= 3)
    if (k % 3 == 1) return false;
  return true;
}

// Largest Cantor cell index <= k (k >= 0).
std::int64_t cantor_cell_at_or_below(std::int64_t k, int depth) {
  std::int64_t out = 0;
  for (std::int64_t p = pow3(depth - 1); p > 0; p /= 3) {
    const std::int64_t digit = (k / p) % 3;
    if (digit == 1) return out + (p - 1);  // digit 0, lower digits all 2
    out += digit * p;
  }
  return out;
}

// Smallest Cantor cell index >= k, or -1 past the end.
std::int64_t cantor_cell_at_or_above(std::int64_t k, int depth) {
  if (k >= pow3(depth)) return -1;
  std::int64_t out = 0;
  for (std::int64_t p = pow3(depth - 1); p > 0; p /= 3) {
    const std::int64_t digit = (k / p) % 3;
    if (digit == 1) return out + 2 * p;  // lower digits all 0
    out += digit * p;
  }
  return out;
}

}  // namespace

CantorOracle::CantorOracle(double a, double b, int resolution_depth)
    : a_(a), b_(b), depth_(resolution_depth) {
  if (!(b > a)) throw PreconditionError("CantorOracle: requires a < b");
  if (depth_ < 1 || depth_ > 38) throw PreconditionError("CantorOracle: resolution depth in [1, 38]");
}

std::int64_t CantorOracle::cell_of(double u) const {
  const std::int64_t n = pow3(depth_);
  const double k = std::floor(u * static_cast<double>(n));
  if (k < 0.0) return -1;
  if (k >= static_cast<double>(n)) return u <= 1.0 ? n - 1 : n;
  return static_cast<std::int64_t>(k);
}

bool CantorOracle::contains(double x) const {
  const double u = to_unit(x);
  if (u < 0.0 || u > 1.0) return false;
  // points within rounding of a Cantor cell edge belong to the set
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(u, 1.0 / static_cast<double>(pow3(depth_)));
  return is_cantor_cell(cell_of(u)) || is_cantor_cell(cell_of(std::max(0.0, u - slack))) ||
         is_cantor_cell(cell_of(std::min(1.0, u + slack)));
}

bool CantorOracle::two_sided(double x, double resolution) const {
  if (!contains(x)) return false;
  const double u = to_unit(x);
  const double r = resolution / (b_ - a_);
  const double cell = 1.0 / static_cast<double>(pow3(depth_));
  const std::int64_t k = cell_of(u);
  const double offset = u - static_cast<double>(k) * cell;
  bool left = offset > 0.0;
  if (!left && k > 0) {
    const std::int64_t p = cantor_cell_at_or_below(k - 1, depth_);
    left = u - static_cast<double>(p + 1) * cell < r;
  }
  bool right = offset < cell;
  if (!right) {
    const std::int64_t q = cantor_cell_at_or_above(k + 1, depth_);
    right = q >= 0 && static_cast<double>(q) * cell - u < r;
  }
  return left && right && u > 0.0 && u < 1.0;
}

std::optional<double> CantorOracle::two_sided_at_or_below(double target, double floor) const {
  const double cell = 1.0 / static_cast<double>(pow3(depth_));
  const double t = std::min(to_unit(target), 1.0);
  if (t < 0.0) return std::nullopt;
  std::int64_t k = cantor_cell_at_or_below(cell_of(t), depth_);
  if ((static_cast<double>(k) + 0.75) * cell > t) {
    if (k == 0) return std::nullopt;
    k = cantor_cell_at_or_below(k - 1, depth_);
  }
  const double x = from_unit((static_cast<double>(k) + 0.75) * cell);  // 0.2020…₃ inside the cell
  if (x < floor || x > target) return std::nullopt;
  return x;
}

std::optional<double> CantorOracle::two_sided_at_or_above(double target, double ceil) const {
  const double cell = 1.0 / static_cast<double>(pow3(depth_));
  const double t = std::max(to_unit(target), 0.0);
  if (t > 1.0) return std::nullopt;
  std::int64_t k = cantor_cell_at_or_above(cell_of(t), depth_);
  if (k >= 0 && (static_cast<double>(k) + 0.25) * cell < t) k = cantor_cell_at_or_above(k + 1, depth_);
  if (k < 0) return std::nullopt;
  const double x = from_unit((static_cast<double>(k) + 0.25) * cell);  // 0.0202…₃ inside the cell
  if (x > ceil || x < target) return std::nullopt;
  return x;
}

CantorScheme build_carleson_perfect_subset(const PerfectSetOracle& P, int depth,
                                           double max_base_length) {
  if (depth < 0 || depth > 40) throw PreconditionError("build_carleson_perfect_subset: depth in [0, 40]");
  if (!(max_base_length > 0.0)) throw PreconditionError("build_carleson_perfect_subset: bad base cap");
  const auto a0 = P.two_sided_at_or_above(P.lower(), P.upper());
  if (!a0) throw NumericalFailure("perfect set too sparse: no two-sided base point (level 0)");
  const double cap = std::min({P.upper(), *a0 + max_base_length, *a0 + 1.0});
  const auto b0 = P.two_sided_at_or_below(cap, *a0);
  if (!b0 || !(*b0 > *a0)) throw NumericalFailure("perfect set too sparse: no base interval (level 0)");

  CantorScheme s;
  s.base = {*a0, *b0};
  s.levels.push_back({s.base});
  for (int n = 1; n <= depth; ++n) {
    std::vector<Interval> next;
    std::vector<Interval> gaps;
    next.reserve(s.levels.back().size() * 2);
    for (const Interval& I : s.levels.back()) {
      const double third = I.length() / 3.0;
      double lo_t = I.a + third, hi_t = I.b - third;
      while (lo_t - I.a > third) lo_t = std::nextafter(lo_t, I.a);
      while (I.b - hi_t > third) hi_t = std::nextafter(hi_t, I.b);
      const auto c = P.two_sided_at_or_below(lo_t, I.a);
      const auto d = P.two_sided_at_or_above(hi_t, I.b);
      if (!c || !d || !(*c > I.a) || !(*d < I.b) || !(*c < *d)) {
        throw NumericalFailure("perfect set too sparse to continue: reached level " +
                               std::to_string(n - 1));
      }
      next.push_back({I.a, *c});
      next.push_back({*d, I.b});
      gaps.push_back({*c, *d});
    }
    s.levels.push_back(std::move(next));
    s.removed.push_back(std::move(gaps));
  }
  return s;
}

OneSidedPartition classify_one_sided(const CircleSet& P, double resolution) {
  if (!(resolution > 0.0)) throw PreconditionError("classify_one_sided: resolution must be positive");
  OneSidedPartition out;
  out.resolution = resolution;
  const auto gaps = P.gaps();
  const std::size_t n = gaps.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double right = gaps[i].length;
    const double left = gaps[(i + n - 1) % n].length;
    if (n < 2 || left > resolution || right > resolution) {
      out.one_sided.push_back(i);
    } else {
      out.two_sided.push_back(i);
    }
  }
  return out;
}

nlohmann::json to_json(const CircleSet& E) {
  nlohmann::json limits = nlohmann::json::array();
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (E.limit_flags()[i]) limits.push_back(i);
  }
  return {{"points", E.points()}, {"limits", limits}};
}

CircleSet circle_set_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("circle set must be an object {points, limits}");
  for (const auto& [key, _] : j.items()) {
    if (key != "points" && key != "limits") throw ConfigError("unknown key in circle set: " + key);
  }
  try {
    auto pts = j.at("points").get<std::vector<double>>();
    std::vector<std::size_t> lim;
    if (j.contains("limits")) lim = j["limits"].get<std::vector<std::size_t>>();
    return CircleSet(std::move(pts), lim);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("circle set: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("circle set: ") + e.what());
  }
}

nlohmann::json to_json(const CantorScheme& s) {
  auto pairs = [](const std::vector<Interval>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const Interval& I : v) a.push_back({I.a, I.b});
    return a;
  };
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : s.levels) levels.push_back(pairs(lv));
  nlohmann::json removed = nlohmann::json::array();
  for (const auto& lv : s.removed) removed.push_back(pairs(lv));
  return {{"base", {s.base.a, s.base.b}}, {"levels", levels}, {"removed", removed}};
}

nlohmann::json to_json(const ATWReport& r) {
  return {{"arc_family", r.arc_family},       {"C1", r.C1},
          {"C2", r.C2},                       {"max_residual", r.max_residual},
          {"log_inv_length", r.log_inv_length}, {"envelope", r.envelope},
          {"coarse_slope", r.coarse_slope},   {"fine_slope", r.fine_slope},
          {"consistent", r.consistent},       {"note", r.note}};
}

}  // namespace beurling
