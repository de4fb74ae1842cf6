#include "beurling/ideals.hpp"

#include <algorithm>
#include <cmath>

#include "beurling/errors.hpp"

namespace beurling {

JetSpec::JetSpec(std::vector<CircleSet> levels, double s) : levels_(std::move(levels)), s_(s) {
  if (!(s >= 0.0)) throw PreconditionError("JetSpec: s must be nonnegative");
  const auto expected = static_cast<std::size_t>(std::floor(s)) + 1;
  if (levels_.size() != expected) {
    throw PreconditionError("JetSpec: expected [s]+1 = " + std::to_string(expected) + " levels");
  }
  for (std::size_t j = 1; j < levels_.size(); ++j) {
    for (double t : levels_[j].points()) {
      if (levels_[j - 1].empty() || distance(t, levels_[j - 1]) > 1e-9) {
        throw PreconditionError("JetSpec: level " + std::to_string(j) + " is not nested in level " +
                                std::to_string(j - 1));
      }
    }
  }
}

MembershipReport jet_membership(const LaurentSeries& f, const JetSpec& jets, double tol) {
  MembershipReport r;
  LaurentSeries d = f;
  for (std::size_t j = 0; j < jets.levels().size(); ++j) {
    MembershipReport::Level lv;
    lv.j = static_cast<int>(j);
    for (const Complex& z : jets.levels()[j].unimodular()) {
      lv.max_abs = std::max(lv.max_abs, std::abs(eval(d, z)));
    }
    lv.pass = lv.max_abs <= tol;
    r.pass = r.pass && lv.pass;
    r.levels.push_back(lv);
    d = derivative(d);
  }
  return r;
}

namespace {

struct JetObjective {
  std::vector<LaurentSeries> derivs;  // every generator, orders 0..k
  double operator()(double theta) const {
    const Complex z = std::polar(1.0, theta);
    double sum = 0.0;
    for (const auto& d : derivs) sum += std::norm(eval_formal(d, z));
    return sum;
  }
};

}  // namespace

CircleSet hull(const std::vector<LaurentSeries>& generators, int k, int grid_size, double tol) {
  if (generators.empty()) throw PreconditionError("hull: empty generator list");
  if (grid_size < 16) throw PreconditionError("hull: grid_size must be >= 16");
  if (k < 0) throw PreconditionError("hull: jet order must be >= 0");
  if (!(tol > 0.0)) throw PreconditionError("hull: tol must be positive");

  JetObjective obj;
  for (const auto& g : generators) {
    LaurentSeries d = g;
    for (int j = 0; j <= k; ++j) {
      obj.derivs.push_back(d);
      d = derivative(d);
    }
  }

  const double h = kTwoPi / grid_size;
  std::vector<double> values(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) values[static_cast<std::size_t>(i)] = obj(i * h);

  std::vector<double> found;
  const auto G = static_cast<std::size_t>(grid_size);
  for (std::size_t i = 0; i < G; ++i) {
    const double v = values[i];
    const double prev = values[(i + G - 1) % G];
    const double next = values[(i + 1) % G];
    if (!(v <= prev && v <= next)) continue;
    // golden-section search on [θ_{i-1}, θ_{i+1}]
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = (static_cast<double>(i) - 1.0) * h;
    double b = (static_cast<double>(i) + 1.0) * h;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = obj(c), fd = obj(d);
    while (b - a > 1e-2 * tol) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = obj(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = obj(d);
      }
    }
    const double theta = 0.5 * (a + b);
    if (obj(theta) < tol * tol) found.push_back(theta);
  }
  // refinements of neighbouring grid minima can land on the same zero
  CircleSet raw(found);
  std::vector<double> merged;
  for (double t : raw.points()) {
    if (merged.empty() || t - merged.back() > 10.0 * tol) merged.push_back(t);
  }
  if (merged.size() > 1 && merged.front() + kTwoPi - merged.back() <= 10.0 * tol) merged.pop_back();
  return CircleSet(merged);
}

std::vector<CircleSet> nested_hulls(const std::vector<LaurentSeries>& generators, int k, int grid_size,
                                    double tol) {
  std::vector<std::vector<double>> pts;
  for (int j = 0; j <= k; ++j) pts.push_back(hull(generators, j, grid_size, tol).points());
  for (int j = k; j >= 1; --j) {
    auto& lower = pts[static_cast<std::size_t>(j - 1)];
    for (double t : pts[static_cast<std::size_t>(j)]) {
      for (double& u : lower) {
        double d = std::fmod(std::abs(u - t), kTwoPi);
        if (std::min(d, kTwoPi - d) <= 10.0 * tol) u = t;
      }
    }
  }
  std::vector<CircleSet> out;
  for (auto& p : pts) out.emplace_back(std::move(p));
  return out;
}

nlohmann::json to_json(const MembershipReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : r.levels) {
    levels.push_back({{"j", lv.j}, {"max_abs", lv.max_abs}, {"pass", lv.pass}});
  }
  return {{"levels", levels}, {"pass", r.pass}};
}

}  // namespace beurling
