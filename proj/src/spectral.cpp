#include "beurling/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "beurling/errors.hpp"
#include "beurling/lp.hpp"

namespace beurling {

namespace {

constexpr double kPi = std::numbers::pi;

double reduce_angle(double t) {
  double r = std::fmod(t, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r;
}

double spectral_norm(const Eigen::MatrixXcd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()[0];
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (Atom& a : atoms_) {
    if (!std::isfinite(a.theta) || !std::isfinite(a.mass)) {
      throw PreconditionError("AtomicMeasure: non-finite atom");
    }
    if (!(a.mass > 0.0)) throw PreconditionError("AtomicMeasure: masses must be positive");
    a.theta = reduce_angle(a.theta);
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.theta < y.theta; });
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& nxt = atoms_[(i + 1) % atoms_.size()];
    if (atoms_.size() > 1) {
      double d = std::abs(nxt.theta - atoms_[i].theta);
      d = std::min(d, 2.0 * kPi - d);
      if (d < 1e-12) throw PreconditionError("AtomicMeasure: angles must be distinct");
    }
  }
}

AtomicMeasure AtomicMeasure::dirac_at_one(double eps0) {
  if (!(eps0 > 0.0)) throw PreconditionError("dirac_at_one: eps0 must be positive");
  return AtomicMeasure({{0.0, 2.0 * kPi * eps0 * eps0}});
}

double AtomicMeasure::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.mass;
  return m;
}

std::vector<Complex> herglotz_taylor(const AtomicMeasure& mu, int N) {
  if (N < 0) throw PreconditionError("herglotz_taylor: N must be nonnegative");
  std::vector<Complex> a(static_cast<std::size_t>(N) + 1, Complex(0.0));
  a[0] = -mu.total_mass() / (2.0 * kPi);
  for (int k = 1; k <= N; ++k) {
    Complex s = 0.0;
    for (const Atom& at : mu.atoms()) s += at.mass * std::polar(1.0, -static_cast<double>(k) * at.theta);
    a[static_cast<std::size_t>(k)] = -s / kPi;
  }
  return a;
}

Complex InnerFunction::eval(Complex z) const {
  Complex acc = 0.0;
  for (auto it = taylor.rbegin(); it != taylor.rend(); ++it) acc = acc * z + *it;
  return acc;
}

InnerFunction inner_taylor(const AtomicMeasure& mu, int N) {
  const std::vector<Complex> a = herglotz_taylor(mu, N);
  std::vector<Complex> c(a.size(), Complex(0.0));
  c[0] = std::exp(a[0]);
  for (int n = 1; n <= N; ++n) {
    Complex s = 0.0;
    for (int k = 1; k <= n; ++k) {
      s += static_cast<double>(k) * a[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(n - k)];
    }
    c[static_cast<std::size_t>(n)] = s / static_cast<double>(n);
  }
  InnerFunction J{mu, std::move(c)};

  if (std::abs(std::abs(J.taylor[0]) - std::exp(-mu.total_mass() / (2.0 * kPi))) > 1e-10) {
    throw NumericalFailure("inner_taylor: constant term check failed");
  }
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> rad(0.0, 0.999), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 64; ++i) {
    const Complex z = std::polar(rad(rng), ang(rng));
    if (std::abs(inner_eval_direct(mu, z)) > 1.0 + 1e-9) {
      throw NumericalFailure("inner_taylor: modulus exceeds 1 at a sampled point");
    }
  }
  return J;
}

Complex inner_eval_direct(const AtomicMeasure& mu, Complex z) {
  if (std::abs(z) > 1.0 + 1e-12) throw PreconditionError("inner_eval_direct: |z| > 1");
  Complex e = 0.0;
  for (const Atom& a : mu.atoms()) {
    const Complex w = std::polar(1.0, a.theta);
    if (std::abs(w - z) < 1e-14) throw PreconditionError("inner_eval_direct: z is an atom");
    e += a.mass * (w + z) / (w - z);
  }
  return std::exp(-e / (2.0 * kPi));
}

double boundary_modulus(const AtomicMeasure& mu, double phi) {
  return std::abs(inner_eval_direct(mu, std::polar(1.0 - 1e-12, phi)));
}

FiniteSectionOperator make_operator(Eigen::MatrixXcd entries, std::string tag) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw PreconditionError("make_operator: need a nonempty square matrix");
  }
  if (!entries.allFinite()) throw PreconditionError("make_operator: non-finite entries");
  FiniteSectionOperator T;
  T.dim = static_cast<int>(entries.rows());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(entries);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  T.condition_estimate = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  T.entries = std::move(entries);
  T.basis_tag = std::move(tag);
  return T;
}

FiniteSectionOperator model_section(const AtomicMeasure& mu, int N) {
  if (N < 2) throw PreconditionError("model_section: N must be at least 2");
  const InnerFunction J = inner_taylor(mu, N - 1);
  Eigen::MatrixXcd MJ = Eigen::MatrixXcd::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j) MJ(i, j) = J.taylor[static_cast<std::size_t>(i - j)];
  const Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(N, N) - MJ * MJ.adjoint();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Q);
  std::vector<int> keep;
  for (int i = 0; i < N; ++i)
    if (eig.eigenvalues()[i] > kModelRankThreshold) keep.push_back(i);
  if (keep.empty()) throw NumericalFailure("model_section: numerical rank 0");
  Eigen::MatrixXcd B(N, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]);

  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
  for (int i = 1; i < N; ++i) S(i, i - 1) = 1.0;

  std::ostringstream tag;
  tag.precision(17);
  tag << "model_section N=" << N << " rank=" << keep.size() << " atoms=[";
  for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
    tag << (i ? ";" : "") << "(" << mu.atoms()[i].theta << "," << mu.atoms()[i].mass << ")";
  }
  tag << "]";
  return make_operator(B.adjoint() * S * B, tag.str());
}

PowerNorms power_norms(const FiniteSectionOperator& T, int n_max, bool inverse) {
  if (n_max < 1) throw PreconditionError("power_norms: n_max must be at least 1");
  const Eigen::Index d = T.entries.rows();
  Eigen::MatrixXcd M = T.entries;
  if (inverse) {
    if (!std::isfinite(T.condition_estimate) || T.condition_estimate > 1e14) {
      throw PreconditionError("power_norms: operator is numerically singular");
    }
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd X = T.entries.partialPivLu().inverse();
    for (int step = 0; step < 2; ++step) X += X * (I - T.entries * X);
    M = X;
  }
  PowerNorms out;
  out.norms.reserve(static_cast<std::size_t>(n_max));
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(d, d);
  double log_scale = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    P = P * M;
    const double nrm = spectral_norm(P);
    if (!std::isfinite(nrm)) throw NumericalFailure("power_norms: non-finite norm");
    const double value = std::exp(log_scale) * nrm;
    if (value > 1e12) out.overflow = true;
    out.norms.emplace_back(n, value);
    if (nrm > 1e8 || (nrm > 0.0 && nrm < 1e-8)) {
      P /= nrm;
      log_scale += std::log(nrm);
    }
  }
  return out;
}

std::string to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::polynomial: return "polynomial";
    case GrowthVerdict::subexp_sqrt: return "subexp_sqrt";
    case GrowthVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

GrowthReport growth_fit(const std::vector<std::pair<int, double>>& norms, double window) {
  if (!(window > 0.0 && window <= 1.0)) throw PreconditionError("growth_fit: window must lie in (0, 1]");
  const std::size_t count = static_cast<std::size_t>(std::ceil(window * static_cast<double>(norms.size())));
  if (count < 10) throw PreconditionError("growth_fit: fewer than 10 points in the window");
  GrowthReport r;
  r.norms = norms;
  r.window = window;
  r.fitted_points = count;

  std::vector<double> xs_sqrt, xs_log, xs_lin, ys;
  for (std::size_t i = norms.size() - count; i < norms.size(); ++i) {
    const auto [n, v] = norms[i];
    if (n < 1) throw PreconditionError("growth_fit: indices must be positive");
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("growth_fit: norms must be positive and finite");
    const double dn = static_cast<double>(n);
    xs_sqrt.push_back(std::sqrt(dn));
    xs_log.push_back(std::log(dn));
    xs_lin.push_back(dn);
    ys.push_back(std::log(v));
  }
  auto fit = [&](const std::vector<double>& xs, double& coef, double& rms) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += xs[i] * ys[i];
      sxx += xs[i] * xs[i];
    }
    coef = sxx > 0.0 ? sxy / sxx : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) ss += std::pow(ys[i] - coef * xs[i], 2);
    rms = std::sqrt(ss / static_cast<double>(xs.size()));
  };
  fit(xs_sqrt, r.sqrt_c, r.sqrt_residual);
  fit(xs_log, r.poly_t, r.poly_residual);
  fit(xs_lin, r.exp_rate, r.exp_residual);

  double ymax = 0.0;
  for (double y : ys) ymax = std::max(ymax, std::abs(y));
  if (ymax < 1e-9) {
    r.verdict = GrowthVerdict::polynomial;  // bounded: t = 0
  } else if (2.0 * r.sqrt_residual < r.poly_residual) {
    r.verdict = GrowthVerdict::subexp_sqrt;
  } else if (2.0 * r.poly_residual < r.sqrt_residual) {
    r.verdict = GrowthVerdict::polynomial;
  } else {
    r.verdict = GrowthVerdict::inconclusive;
  }
  r.exponential_like = ymax >= 1e-9 && r.exp_rate > 0.0 && 2.0 * r.exp_residual < r.sqrt_residual &&
                       2.0 * r.exp_residual < r.poly_residual;
  return r;
}

namespace {

ModelGrowthRun model_growth_run(const AtomicMeasure& mu, int N, int n_max, double window) {
  ModelGrowthRun run;
  run.N = N;
  run.op = model_section(mu, N);
  run.inverse_norms = power_norms(run.op, n_max, true);
  run.fit = growth_fit(run.inverse_norms.norms, window);
  run.strictly_increasing = true;
  const auto& v = run.inverse_norms.norms;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i].second > v[i - 1].second)) run.strictly_increasing = false;
  return run;
}

}  // namespace

ModelGrowthExperiment model_growth_experiment(const AtomicMeasure& mu, int N, int n_max, double window) {
  ModelGrowthExperiment e;
  e.base = model_growth_run(mu, N, n_max, window);
  e.doubled = model_growth_run(mu, 2 * N, n_max, window);
  e.agree = e.base.fit.verdict == e.doubled.fit.verdict;
  return e;
}

namespace {

void check_finite_set(const CircleSet& E, double s) {
  if (E.empty()) throw PreconditionError("dual program: E must be nonempty");
  for (bool lim : E.limit_flags())
    if (lim) throw PreconditionError("dual program: E must be finite (no accumulation points)");
  if (!(s >= 0.0 && s < 1.0)) throw PreconditionError("dual program: s must lie in [0, 1)");
}

/// Constraint rows for |∑ c_j z_j^m| ≤ (1+m)^s, m = 0..N_con, under the
/// 16-phase outer polygon. Variables: (Re c, Im c).
InequalityLp build_program(const std::vector<double>& theta, double s, int N_con) {
  const Eigen::Index J = static_cast<Eigen::Index>(theta.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(N_con + 1) * kPhaseCount;
  Eigen::MatrixXd A(rows, 2 * J);
  Eigen::VectorXd b(rows);
  Eigen::Index r = 0;
  for (int m = 0; m <= N_con; ++m) {
    const double rhs = std::pow(1.0 + m, s);
    for (int k = 0; k < kPhaseCount; ++k) {
      const double phi = 2.0 * kPi * k / kPhaseCount;
      for (Eigen::Index j = 0; j < J; ++j) {
        const Complex w = std::polar(1.0, static_cast<double>(m) * theta[static_cast<std::size_t>(j)] - phi);
        A(r, j) = w.real();
        A(r, J + j) = -w.imag();
      }
      b[r] = rhs;
      ++r;
    }
  }
  return InequalityLp(std::move(A), std::move(b));
}

Eigen::VectorXd objective(const std::vector<double>& theta, int n) {
  const Eigen::Index J = static_cast<Eigen::Index>(theta.size());
  Eigen::VectorXd c(2 * J);
  for (Eigen::Index j = 0; j < J; ++j) {
    const Complex w = std::polar(1.0, -static_cast<double>(n) * theta[static_cast<std::size_t>(j)]);
    c[j] = w.real();
    c[J + j] = -w.imag();
  }
  return c;
}

/// Memoizes LP values by rounded objective; periodic point sets repeat them.
class ProgramCache {
 public:
  ProgramCache(const std::vector<double>& theta, double s, int N_con)
      : theta_(theta), lp_(build_program(theta, s, N_con)) {}

  double value(int n) {
    const Eigen::VectorXd c = objective(theta_, n);
    std::vector<long long> key(static_cast<std::size_t>(c.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) key[static_cast<std::size_t>(i)] = std::llround(c[i] * 1e12);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const double v = lp_.maximize(c).value;
    memo_.emplace(std::move(key), v);
    return v;
  }

 private:
  std::vector<double> theta_;
  InequalityLp lp_;
  std::map<std::vector<long long>, double> memo_;
};

}  // namespace

int default_constraint_depth(int n_max) { return std::max(10 * n_max, 1000); }

double dual_program_value(const std::vector<Complex>& z, double s, int n, int N_con) {
  std::vector<double> theta;
  for (const Complex& w : z) {
    if (std::abs(std::abs(w) - 1.0) > 1e-12) throw PreconditionError("dual program: points must be unimodular");
    theta.push_back(std::arg(w));
  }
  if (N_con < 0) throw PreconditionError("dual program: N_con must be nonnegative");
  return build_program(theta, s, N_con).maximize(objective(theta, n)).value;
}

QuotientReport quotient_inverse_norms(const CircleSet& E, double s, int n_max, int N_con) {
  check_finite_set(E, s);
  if (n_max < 1) throw PreconditionError("quotient_inverse_norms: n_max must be at least 1");
  if (N_con < 10 * n_max) throw PreconditionError("quotient_inverse_norms: N_con must be at least 10*n_max");
  const double relax = std::cos(kPi / kPhaseCount);
  ProgramCache full(E.points(), s, N_con);
  ProgramCache half(E.points(), s, N_con / 2);
  QuotientReport rep;
  rep.constraint_depth = N_con;
  rep.s = s;
  for (int n = 1; n <= n_max; ++n) {
    QuotientRow row;
    row.n = n;
    row.estimate = full.value(n);
    row.estimate_half = half.value(n);
    row.lower = relax * row.estimate;
    rep.rows.push_back(row);
  }
  return rep;
}

InterpolationReport interpolation_constant(const CircleSet& E, double s, double t, int N_con) {
  check_finite_set(E, s);
  if (t < s) throw PreconditionError("interpolation_constant: t must be at least s");
  if (N_con < 2) throw PreconditionError("interpolation_constant: N_con must be at least 2");
  auto run = [&](int depth, int& argmax) {
    ProgramCache prog(E.points(), s, depth);
    double best = 0.0;
    for (int n = 1; n <= depth; ++n) {
      const double v = prog.value(n) / std::pow(1.0 + n, t);
      if (v > best) {
        best = v;
        argmax = n;
      }
    }
    return best;
  };
  InterpolationReport rep;
  int arg_half = 0;
  rep.C = run(N_con, rep.argmax_n);
  rep.C_half = run(N_con / 2, arg_half);
  rep.stable = std::abs(rep.C - rep.C_half) <= 1e-6 * std::max(1.0, rep.C);
  rep.diverging = !rep.stable && rep.C > rep.C_half * (1.0 + 1e-3);
  return rep;
}

nlohmann::json to_json(const GrowthReport& r) {
  nlohmann::json norms = nlohmann::json::array();
  for (const auto& [n, v] : r.norms) norms.push_back({n, v});
  return {{"norms", norms},
          {"window", r.window},
          {"fitted_points", r.fitted_points},
          {"sqrt_fit", {{"c", r.sqrt_c}, {"residual", r.sqrt_residual}}},
          {"poly_fit", {{"t", r.poly_t}, {"residual", r.poly_residual}}},
          {"exp_fit", {{"rate", r.exp_rate}, {"residual", r.exp_residual}}},
          {"verdict", to_string(r.verdict)},
          {"exponential_like", r.exponential_like}};
}

nlohmann::json to_json(const AtomicMeasure& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom& a : mu.atoms()) atoms.push_back({a.theta, a.mass});
  return {{"atoms", atoms}};
}

AtomicMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("measure must be an object {atoms} or {dirac_eps0}");
  for (const auto& [key, _] : j.items()) {
    if (key != "atoms" && key != "dirac_eps0") throw ConfigError("unknown key in measure: " + key);
  }
  try {
    if (j.contains("dirac_eps0")) {
      if (j.contains("atoms")) throw ConfigError("measure: give either atoms or dirac_eps0");
      return AtomicMeasure::dirac_at_one(j["dirac_eps0"].get<double>());
    }
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      const auto pair = a.get<std::vector<double>>();
      if (pair.size() != 2) throw ConfigError("measure: each atom is [theta, mass]");
      atoms.push_back({pair[0], pair[1]});
    }
    return AtomicMeasure(std::move(atoms));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  }
}

}  // namespace beurling
