#include "beurling/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "beurling/approx_unit.hpp"
#include "beurling/circle_sets.hpp"
#include "beurling/errors.hpp"
#include "beurling/ideals.hpp"
#include "beurling/series.hpp"
#include "beurling/spectral.hpp"
#include "beurling/weights.hpp"

namespace beurling {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ------------------------------------------------------------ parameters

/// Strict view of a config object: every read records the resolved value,
/// finish() rejects keys nobody asked for.
class Params {
 public:
  Params(json cfg, std::string where) : cfg_(std::move(cfg)), where_(std::move(where)) {
    if (cfg_.is_null()) cfg_ = json::object();
    if (!cfg_.is_object()) throw ConfigError(where_ + ": config must be a JSON object");
  }

  bool has(const std::string& key) const { return cfg_.contains(key); }

  json raw(const std::string& key, const json& def) {
    used_.insert(key);
    json v = cfg_.contains(key) ? cfg_.at(key) : def;
    resolved_[key] = v;
    return v;
  }

  template <class T>
  T get(const std::string& key, const T& def) {
    const json v = raw(key, json(def));
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + ": bad value for key '" + key + "'");
    }
  }

  double real(const std::string& key, double def) {
    json v = raw(key, def);
    if (v.is_string()) {
      try {
        return std::stod(v.get<std::string>());
      } catch (const std::exception&) {
        throw ConfigError(where_ + ": key '" + key + "' is not a number");
      }
    }
    if (!v.is_number()) throw ConfigError(where_ + ": key '" + key + "' is not a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t def) {
    const double d = real(key, static_cast<double>(def));
    if (d != std::floor(d)) throw ConfigError(where_ + ": key '" + key + "' must be an integer");
    return static_cast<std::int64_t>(d);
  }

  std::optional<double> optional_real(const std::string& key) {
    if (!cfg_.contains(key)) return std::nullopt;
    return real(key, 0.0);
  }

  /// Arrays, single numbers, "a..b" ranges and "a,b,c" lists.
  std::vector<double> reals(const std::string& key, const json& def) {
    return parse_list(key, raw(key, def));
  }

  std::vector<std::int64_t> integers(const std::string& key, const json& def) {
    std::vector<std::int64_t> out;
    for (double d : reals(key, def)) {
      if (d != std::floor(d)) throw ConfigError(where_ + ": key '" + key + "' must hold integers");
      out.push_back(static_cast<std::int64_t>(d));
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, _] : cfg_.items()) {
      if (!used_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }
  }

  const json& resolved() const { return resolved_; }

 private:
  std::vector<double> parse_list(const std::string& key, const json& v) const {
    std::vector<double> out;
    auto bad = [&]() { return ConfigError(where_ + ": cannot parse list for key '" + key + "'"); };
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_number()) throw bad();
        out.push_back(e.get<double>());
      }
      return out;
    }
    if (!v.is_string()) throw bad();
    const std::string s = v.get<std::string>();
    try {
      if (auto pos = s.find(".."); pos != std::string::npos) {
        const long long a = std::stoll(s.substr(0, pos));
        const long long b = std::stoll(s.substr(pos + 2));
        if (b < a) throw bad();
        for (long long i = a; i <= b; ++i) out.push_back(static_cast<double>(i));
        return out;
      }
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw bad();
    }
    if (out.empty()) throw bad();
    return out;
  }

  json cfg_;
  std::string where_;
  std::set<std::string> used_;
  json resolved_ = json::object();
};

CircleSet set_from_config(const json& j) {
  if (j.is_object() && j.contains("roots_of_unity")) {
    if (j.size() != 1) throw ConfigError("set: roots_of_unity takes no other keys");
    const int q = j["roots_of_unity"].get<int>();
    if (q < 1) throw ConfigError("set: roots_of_unity must be positive");
    std::vector<double> a;
    for (int k = 0; k < q; ++k) a.push_back(2.0 * kPi * k / q);
    return CircleSet(a);
  }
  if (j.is_object() && j.contains("points") && j["points"].is_array()) {
    std::vector<double> pts = j["points"].get<std::vector<double>>();
    std::vector<double> reduced;
    for (double t : pts) {
      double r = std::fmod(t, 2.0 * kPi);
      if (r < 0.0) r += 2.0 * kPi;
      for (double u : reduced) {
        double d = std::abs(u - r);
        d = std::min(d, 2.0 * kPi - d);
        if (d < kPointResolution) throw ConfigError("set: repeated point " + num(t));
      }
      reduced.push_back(r);
    }
  }
  return circle_set_from_json(j);
}

// ------------------------------------------------------------ outputs

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

std::string timestamp_line() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf;
}

class Report {
 public:
  Report(std::string sub, const RunContext& ctx) : sub_(std::move(sub)), ctx_(ctx) {}

  void set_output(const std::string& explicit_path, const std::string& ext) {
    const fs::path given = explicit_path.empty() ? fs::path(sub_ + ext) : fs::path(explicit_path);
    path_ = given.is_absolute() ? given : ctx_.out_dir / given;
  }

  fs::path write_csv(const Csv& csv, const json& config) const {
    ensure_parent();
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path_.string());
    out << (ctx_.timestamp ? timestamp_line() : std::string("# generated -")) << "\n";
    out << "# version=" << kVersion << " subcommand=" << sub_ << " config=" << config.dump() << "\n";
    for (std::size_t i = 0; i < csv.columns.size(); ++i) out << (i ? "," : "") << csv.columns[i];
    out << "\n";
    for (const auto& r : csv.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "\n";
    }
    return path_;
  }

  fs::path write_json(json body, const json& config) const {
    ensure_parent();
    body["version"] = kVersion;
    body["subcommand"] = sub_;
    body["config"] = config;
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path_.string());
    out << body.dump(2) << "\n";
    return path_;
  }

 private:
  void ensure_parent() const {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  }
  std::string sub_;
  const RunContext& ctx_;
  fs::path path_;
};

RunResult finish_run(bool pass, const std::string& sub, const std::string& detail, const fs::path& file) {
  RunResult r;
  r.exit_code = pass ? 0 : 1;
  r.summary = sub + ": " + (pass ? "PASS" : "FAIL") + " " + detail + " -> " + file.string();
  r.files.push_back(file);
  return r;
}

const char* tf(bool b) { return b ? "true" : "false"; }

// ------------------------------------------------------------ subcommands

/// ∑_{k≥j} (1+k)^β x^k, stopped once the terms decrease and the next one is
/// below 1e-16 of the running sum.
double tail_sum_oracle(double beta, std::int64_t j, double x) {
  if (x == 0.0) return j == 0 ? 1.0 : 0.0;
  long double acc = 0.0L;
  long double term = std::pow(1.0L + j, static_cast<long double>(beta)) * std::pow(static_cast<long double>(x), j);
  for (std::int64_t k = j;; ++k) {
    acc += term;
    const long double next = term * std::pow((2.0L + k) / (1.0L + k), static_cast<long double>(beta)) * x;
    if (next < term && next < 1e-16L * acc) break;
    term = next;
  }
  return static_cast<double>(acc);
}

RunResult run_lemma_tail(Params& p, Report& rep) {
  const std::string grid = p.get<std::string>("grid", "default");
  if (grid != "default") throw ConfigError("lemma-tail: grid must be 'default' or replaced by betas/js/xs");
  const auto betas = p.reals("betas", json::array({0.0, 0.25, 0.5, 0.75, 0.99}));
  const auto js = p.integers("js", "0..50");
  std::vector<double> default_x;
  for (int i = 1; i <= 99; ++i) default_x.push_back(i / 100.0);
  const auto xs = p.reals("xs", default_x);
  const double margin_tol = p.real("margin_tol", 1e-12);
  rep.set_output(p.get<std::string>("output", ""), ".csv");
  p.finish();

  Csv csv{{"beta", "j", "x", "bound", "oracle", "margin", "pass"}, {}};
  std::size_t fails = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (double b : betas)
    for (auto j : js)
      for (double x : xs) {
        const double bound = tail_bound(b, j, x);
        const double oracle = tail_sum_oracle(b, j, x);
        const double margin = bound - oracle;
        const bool ok = margin >= -margin_tol;
        fails += !ok;
        worst = std::min(worst, margin);
        csv.add({num(b), std::to_string(j), num(x), num(bound), num(oracle), num(margin), tf(ok)});
      }
  const auto file = rep.write_csv(csv, p.resolved());
  return finish_run(fails == 0, "lemma-tail",
                    std::to_string(csv.rows.size()) + " cells, " + std::to_string(fails) +
                        " violations, min margin " + short_num(worst),
                    file);
}

LaurentSeries random_series(std::mt19937_64& rng, int lo_min, int hi_max, double density) {
  std::uniform_int_distribution<int> lo_d(lo_min, 0), hi_d(0, hi_max);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution keep(density);
  const int lo = lo_d(rng), hi = hi_d(rng);
  LaurentSeries f;
  for (int k = lo; k <= hi; ++k) {
    const Complex c(nd(rng), nd(rng));
    if (keep(rng)) f.set(k, c);
  }
  if (f.empty()) f.set(lo, Complex(1.0, 0.0));
  return f;
}

RunResult run_norm_compare(Params& p, Report& rep) {
  const Weight w = weight_from_json(p.raw("weight", {{"kind", "asymmetric_power"}, {"s", 0.5}, {"t", 2.0}}));
  const auto count = p.integer("count", 200);
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", 20240601));
  const int max_degree = static_cast<int>(p.integer("max_degree", 20));
  const auto margin = p.integer("margin", 10);
  rep.set_output(p.get<std::string>("output", ""), ".csv");
  p.finish();

  std::mt19937_64 rng(seed);
  Csv csv{{"index", "support_lo", "support_hi", "lower", "middle", "upper", "A", "B", "pass"}, {}};
  std::size_t fails = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    const LaurentSeries f = random_series(rng, -max_degree, max_degree, 0.7);
    const auto cmp = compare_derivative_norms(f, w, margin);
    const bool ok = cmp.holds();
    fails += !ok;
    csv.add({std::to_string(i), std::to_string(f.min_degree()), std::to_string(f.max_degree()), num(cmp.lower),
             num(cmp.middle), num(cmp.upper), num(cmp.bounds.inf_ratio), num(cmp.bounds.sup_ratio), tf(ok)});
  }
  const auto file = rep.write_csv(csv, p.resolved());
  return finish_run(fails == 0, "norm-compare",
                    std::to_string(count) + " series, " + std::to_string(fails) + " violations", file);
}

RunResult run_approx_unit(Params& p, Report& rep) {
  const auto ns = p.integers("n", "1..100");
  const auto js = p.integers("j", "-50..50");
  const auto betas = p.reals("beta", json::array({0.0, 0.3, 0.7}));
  const double tol = p.real("tol", 1e-10);
  const double slack = p.real("slack", 1e-9);
  const auto limit_n = p.integer("limit_n", 0);
  const double limit_factor = p.real("limit_factor", 1e-2);
  rep.set_output(p.get<std::string>("output", ""), ".csv");
  p.finish();

  Csv csv{{"check", "n", "j", "beta", "value", "tail", "bound", "pass"}, {}};
  std::size_t fails = 0, limit_fails = 0, limit_cells = 0;
  for (double b : betas) {
    const Weight w = Weight::power(b);
    for (auto n : ns)
      for (auto j : js) {
        const CertifiedValue v = en_monomial_norm(n, j, w, tol);
        const double bound = 3.0 * w(j);
        const bool ok = v.upper() <= bound + slack;
        fails += !ok;
        csv.add({"bound_3omega", std::to_string(n), std::to_string(j), num(b), num(v.value), num(v.tail_bound),
                 num(bound), tf(ok)});
      }
    if (limit_n > 0) {
      for (auto j : js) {
        if (j == 0) continue;
        const CertifiedValue v = en_monomial_norm(limit_n, j, w, tol);
        const double bound = limit_factor * w(j);
        const bool ok = v.upper() < bound;
        limit_fails += !ok;
        ++limit_cells;
        csv.add({"limit", std::to_string(limit_n), std::to_string(j), num(b), num(v.value), num(v.tail_bound),
                 num(bound), tf(ok)});
      }
    }
  }
  const auto file = rep.write_csv(csv, p.resolved());
  std::string detail = std::to_string(fails) + " bound violations";
  if (limit_n > 0) {
    detail += ", limit at n=" + std::to_string(limit_n) + ": " + std::to_string(limit_cells - limit_fails) + "/" +
              std::to_string(limit_cells) + " cells below " + short_num(limit_factor) + "*omega(j)";
  }
  return finish_run(fails == 0 && limit_fails == 0, "approx-unit", detail, file);
}

RunResult run_ditkin(Params& p, Report& rep) {
  const auto ss = p.reals("s", json::array({0.5, 1.5}));
  const auto count = p.integer("count", 20);
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", 20240602));
  const auto g_degree = p.integer("g_degree", 4);
  const auto n_list = p.integers("n_list", json::array({1, 2, 4, 8, 16, 32, 64, 128, 256}));
  const double factor = p.real("factor", 100.0);
  rep.set_output(p.get<std::string>("output", ""), ".csv");
  p.finish();
  if (n_list.size() < 2) throw ConfigError("ditkin: n_list needs at least two entries");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Csv csv{{"s", "trial", "n", "value", "tail", "ratio_to_first", "trial_pass"}, {}};
  std::size_t fails = 0, trials = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (double s : ss) {
    const Weight w = Weight::power(s);
    const auto p1 = static_cast<unsigned>(std::floor(s)) + 1;
    for (std::int64_t t = 0; t < count; ++t) {
      LaurentSeries g;
      for (std::int64_t k = 0; k <= g_degree; ++k) g.set(k, Complex(nd(rng), nd(rng)));
      const LaurentSeries f = multiply(shifted_monomial_power(1.0, p1), g);
      const auto seq = ditkin_sequence(f, w, s, n_list);
      const double first = seq.front().norm.value;
      const double last = seq.back().norm.upper();
      const bool ok = last < first / factor;
      fails += !ok;
      ++trials;
      worst_ratio = std::min(worst_ratio, first / last);
      for (const auto& pt : seq) {
        csv.add({num(s), std::to_string(t), std::to_string(pt.n), num(pt.norm.value), num(pt.norm.tail_bound),
                 num(first > 0.0 ? pt.norm.value / first : 0.0), tf(ok)});
      }
    }
  }
  const auto file = rep.write_csv(csv, p.resolved());
  return finish_run(fails == 0, "ditkin",
                    std::to_string(trials - fails) + "/" + std::to_string(trials) + " trials drop by factor " +
                        short_num(factor) + " (smallest drop " + short_num(worst_ratio) + ")",
                    file);
}

RunResult run_divide_roundtrip(Params& p, Report& rep) {
  const auto count = p.integer("count", 100);
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", 20240603));
  const double tol = p.real("tol", 1e-12);
  rep.set_output(p.get<std::string>("output", ""), ".csv");
  p.finish();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  Csv csv{{"index", "z0_angle", "support_lo", "support_hi", "max_error", "pass"}, {}};
  std::size_t fails = 0;
  double worst = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    LaurentSeries f = random_series(rng, -15, 15, 0.8);
    const double a = ang(rng);
    const Complex z0 = std::polar(1.0, a);
    f -= LaurentSeries::constant(eval(f, z0));
    const LaurentSeries g = divide_by_root(f, z0);
    const LaurentSeries back = multiply(g, LaurentSeries::monomial(1) - LaurentSeries::constant(z0));
    double err = 0.0;
    for (auto k = std::min(f.min_degree(), back.min_degree()); k <= std::max(f.max_degree(), back.max_degree()); ++k)
      err = std::max(err, std::abs(back[k] - f[k]));
    const bool ok = err <= tol;
    fails += !ok;
    worst = std::max(worst, err);
    csv.add({std::to_string(i), num(a), std::to_string(f.min_degree()), std::to_string(f.max_degree()), num(err),
             tf(ok)});
  }
  const auto file = rep.write_csv(csv, p.resolved());
  return finish_run(fails == 0, "divide-roundtrip",
                    std::to_string(count) + " series, max error " + short_num(worst), file);
}

RunResult run_ideal_hull(Params& p, Report& rep) {
  const json def_gens = json::array({to_json(multiply(LaurentSeries::monomial(1) - LaurentSeries::constant(1.0),
                                                      LaurentSeries::monomial(1) + LaurentSeries::constant(1.0))),
                                     to_json(multiply(LaurentSeries::monomial(1) - LaurentSeries::constant(1.0),
                                                      LaurentSeries::monomial(1) -
                                                          LaurentSeries::constant(Complex(0.0, 1.0))))});
  const json gens_json = p.raw("generators", def_gens);
  const int k = static_cast<int>(p.integer("k", 0));
  const int grid = static_cast<int>(p.integer("grid", kDefaultHullGrid));
  const double tol = p.real("tol", 1e-8);
  const double membership_tol = p.real("membership_tol", kDefaultMembershipTol);
  rep.set_output(p.get<std::string>("output", ""), ".json");
  p.finish();

  std::vector<LaurentSeries> gens;
  if (!gens_json.is_array() || gens_json.empty()) throw ConfigError("ideal-hull: generators must be a nonempty array");
  try {
    for (const auto& g : gens_json) gens.push_back(series_from_json(g));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ideal-hull: generators: ") + e.what());
  }

  const std::vector<CircleSet> raw_levels = [&] {
    std::vector<CircleSet> r;
    for (int j = 0; j <= k; ++j) r.push_back(hull(gens, j, grid, tol));
    return r;
  }();
  json hulls = json::array();
  bool monotone = true;
  for (std::size_t j = 0; j < raw_levels.size(); ++j) {
    if (j > 0)
      for (double t : raw_levels[j].points())
        if (distance(t, raw_levels[j - 1]) > 10.0 * tol) monotone = false;
    hulls.push_back({{"order", j}, {"set", to_json(raw_levels[j])}});
  }
  const std::vector<CircleSet> levels = nested_hulls(gens, k, grid, tol);
  bool consistent = true;
  json membership = json::array();
  bool nested = true;
  for (std::size_t j = 1; j < levels.size(); ++j)
    for (double t : levels[j].points())
      if (distance(t, levels[j - 1]) > 10.0 * tol) nested = false;
  if (nested && !levels.front().empty()) {
    // Jet levels E_j = hull of order j, with [s] = k.
    std::vector<CircleSet> jet_levels;
    for (const auto& L : levels) jet_levels.push_back(L.empty() ? CircleSet() : L);
    try {
      const JetSpec spec(jet_levels, static_cast<double>(k));
      for (const auto& g : gens) {
        const auto m = jet_membership(g, spec, membership_tol);
        consistent = consistent && m.pass;
        membership.push_back(to_json(m));
      }
    } catch (const PreconditionError& e) {
      consistent = false;
      membership.push_back({{"error", e.what()}});
    }
  }
  const bool pass = monotone && consistent;
  json body{{"hulls", hulls}, {"membership", membership}, {"monotone", monotone}, {"consistent", consistent},
            {"pass", pass}};
  const auto file = rep.write_json(body, p.resolved());
  return finish_run(pass, "ideal-hull",
                    "order " + std::to_string(k) + " hull has " + std::to_string(levels.back().size()) + " points",
                    file);
}

RunResult run_carleson(Params& p, Report& rep) {
  const CircleSet E = set_from_config(p.raw("set", {{"points", json::array({0.0})}}));
  const double tol = p.real("tol", 1e-12);
  const auto expect = p.optional_real("expect");
  const double expect_tol = p.real("expect_tol", 1e-8);
  rep.set_output(p.get<std::string>("output", ""), ".json");
  p.finish();

  const CertifiedValue v = carleson_integral(E, tol);
  bool pass = std::isfinite(v.value);
  json body{{"value", v.value}, {"tail_estimate", v.tail_bound}, {"points", E.size()}};
  if (expect) {
    const double err = std::abs(v.value - *expect);
    body["expect"] = *expect;
    body["error"] = err;
    pass = pass && err <= expect_tol;
  }
  body["pass"] = pass;
  const auto file = rep.write_json(body, p.resolved());
  return finish_run(pass, "carleson", "value " + num(v.value), file);
}

RunResult run_atw(Params& p, Report& rep) {
  const CircleSet E = set_from_config(p.raw("set", {{"points", json::array({0.0})}}));
  const int scales = static_cast<int>(p.integer("scales", 12));
  const int arcs = static_cast<int>(p.integer("arcs_per_scale", 64));
  const auto max_c1 = p.optional_real("max_c1");
  const auto max_c2 = p.optional_real("max_c2");
  rep.set_output(p.get<std::string>("output", ""), ".json");
  p.finish();

  const ATWReport r = atw_check(E, scales, arcs);
  bool pass = r.consistent;
  if (max_c1) pass = pass && r.C1 <= *max_c1;
  if (max_c2) pass = pass && r.C2 <= *max_c2;
  json body = to_json(r);
  body["pass"] = pass;
  const auto file = rep.write_json(body, p.resolved());
  return finish_run(pass, "atw", "C1 " + short_num(r.C1) + ", C2 " + short_num(r.C2), file);
}

RunResult run_build_carleson_set(Params& p, Report& rep) {
  const std::string kind = p.get<std::string>("oracle", "cantor");
  const double a = p.real("a", 0.0);
  const double b = p.real("b", 1.0);
  const int depth = static_cast<int>(p.integer("depth", 12));
  const double max_base = p.real("max_base_length", kMaxBaseLength);
  rep.set_output(p.get<std::string>("output", ""), ".json");
  p.finish();

  std::unique_ptr<PerfectSetOracle> oracle;
  try {
    if (kind == "cantor") {
      oracle = std::make_unique<CantorOracle>(a, b);
    } else if (kind == "interval") {
      oracle = std::make_unique<IntervalOracle>(a, b);
    } else {
      throw ConfigError("build-carleson-set: oracle must be 'cantor' or 'interval'");
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("build-carleson-set: ") + e.what());
  }
  const CantorScheme scheme = build_carleson_perfect_subset(*oracle, depth, max_base);
  const SchemeCheck check = verify_scheme(scheme);
  const double L = scheme.base.length();
  const auto sums = carleson_gap_sum(scheme);
  const auto series = scheme_gap_series(L, depth);
  bool bounded = true;
  json rows = json::array();
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const bool ok = sums[i] <= series[i] + 1e-12;
    bounded = bounded && ok;
    rows.push_back({{"level", i + 1}, {"partial_sum", sums[i]}, {"series_bound", series[i]}, {"pass", ok}});
  }
  bool endpoints_two_sided = true;
  for (const auto& lv : scheme.removed)
    for (const Interval& J : lv)
      if (!oracle->two_sided(J.a, 1e-12) || !oracle->two_sided(J.b, 1e-12)) endpoints_two_sided = false;
  const CertifiedValue integral = carleson_integral(scheme.endpoint_set());
  const double closed_bound = scheme_carleson_bound(L);
  const bool integral_ok = integral.value <= closed_bound;
  const bool pass = check.ok() && bounded && endpoints_two_sided && integral_ok;
  json body{{"scheme", to_json(scheme)},
            {"invariants",
             {{"counts", check.counts_ok}, {"lengths", check.lengths_ok}, {"nesting", check.nesting_ok},
              {"first_failure", check.first_failure}}},
            {"endpoints_two_sided", endpoints_two_sided},
            {"gap_sums", rows},
            {"endpoint_set_carleson", integral.value},
            {"closed_form_bound", closed_bound},
            {"pass", pass}};
  const auto file = rep.write_json(body, p.resolved());
  return finish_run(pass, "build-carleson-set",
                    "depth " + std::to_string(scheme.depth()) + ", base length " + short_num(L) +
                        ", final gap sum " + short_num(sums.empty() ? 0.0 : sums.back()),
                    file);
}

RunResult run_gap_sum(Params& p, Report& rep) {
  const bool from_set = p.has("set");
  std::vector<double> sums;
  std::vector<double> smallest;  // smallest gap seen up to each entry
  const auto expect = p.optional_real("expect");
  const double expect_tol = p.real("expect_tol", 1e-6);
  if (from_set) {
    const CircleSet E = set_from_config(p.raw("set", json::object()));
    rep.set_output(p.get<std::string>("output", ""), ".csv");
    p.finish();
    sums = carleson_gap_sum(E);
    std::vector<double> lens;
    for (const Arc& g : E.gaps()) lens.push_back(g.length);
    std::sort(lens.begin(), lens.end(), std::greater<>());
    smallest = lens;
  } else {
    const std::string profile = p.get<std::string>("profile", "middle_thirds");
    if (profile != "middle_thirds") throw ConfigError("gap-sum: profile must be 'middle_thirds'");
    const double a = p.real("a", 0.0);
    const double b = p.real("b", 1.0);
    const int depth = static_cast<int>(p.integer("depth", 60));
    rep.set_output(p.get<std::string>("output", ""), ".csv");
    p.finish();
    if (!(b > a) || depth < 1) throw ConfigError("gap-sum: need a < b and depth >= 1");
    const GapProfile prof = GapProfile::middle_thirds(a, b, depth);
    sums = carleson_gap_sum(prof);
    for (const auto& lv : prof.levels) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& [len, _] : lv) m = std::min(m, len);
      smallest.push_back(m);
    }
  }
  Csv csv{{"index", "smallest_gap", "partial_sum"}, {}};
  bool monotone = true;
  const double inv_e = std::exp(-1.0);
  for (std::size_t i = 0; i < sums.size(); ++i) {
    csv.add({std::to_string(i + 1), num(smallest[i]), num(sums[i])});
    if (i > 0 && smallest[i] < inv_e && smallest[i - 1] < inv_e && sums[i] < sums[i - 1]) monotone = false;
  }
  bool pass = monotone && !sums.empty();
  std::string detail = "final partial sum " + num(sums.empty() ? 0.0 : sums.back());
  if (expect && !sums.empty()) {
    const double err = std::abs(sums.back() - *expect);
    pass = pass && err <= expect_tol;
    detail += ", error " + short_num(err);
  }
  const auto file = rep.write_csv(csv, p.resolved());
  return finish_run(pass, "gap-sum", detail, file);
}

RunResult run_inner_eval(Params& p, Report& rep) {
  const AtomicMeasure mu =
      measure_from_json(p.raw("measure", {{"atoms", json::array({json::array({0.0, 0.2}), json::array({2.0, 0.3})})}}));
  const int N = static_cast<int>(p.integer("N", 200));
  const auto points = p.integer("points", 100);
  const double max_radius = p.real("max_radius", 0.8);
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", 20240604));
  const auto boundary_points = p.integer("boundary_points", 64);
  const double min_atom_distance = p.real("min_atom_distance", 0.1);
  const double tol = p.real("tol", 1e-10);
  const double boundary_tol = p.real("boundary_tol", 1e-8);
  rep.set_output(p.get<std::string>("output", ""), ".csv");
  p.finish();
  if (!(max_radius > 0.0 && max_radius < 1.0)) throw ConfigError("inner-eval: max_radius must lie in (0, 1)");

  const InnerFunction J = inner_taylor(mu, N);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rad(0.0, max_radius), ang(0.0, 2.0 * kPi);
  Csv csv{{"kind", "index", "z_re", "z_im", "value_re", "value_im", "reference_re", "reference_im", "error",
           "pass"},
          {}};
  std::size_t fails = 0;
  double worst_interior = 0.0, worst_boundary = 0.0;
  for (std::int64_t i = 0; i < points; ++i) {
    const Complex z = std::polar(rad(rng), ang(rng));
    const Complex a = J.eval(z), b = inner_eval_direct(mu, z);
    const double err = std::abs(a - b);
    const bool ok = err <= tol;
    fails += !ok;
    worst_interior = std::max(worst_interior, err);
    csv.add({"interior", std::to_string(i), num(z.real()), num(z.imag()), num(a.real()), num(a.imag()), num(b.real()),
             num(b.imag()), num(err), tf(ok)});
  }
  std::int64_t taken = 0;
  for (std::int64_t i = 0; i < 4 * boundary_points && taken < boundary_points; ++i) {
    const double phi = 2.0 * kPi * (static_cast<double>(i) + 0.5) / (4.0 * static_cast<double>(boundary_points));
    bool far = true;
    for (const Atom& at : mu.atoms()) {
      double d = std::abs(phi - at.theta);
      d = std::min(d, 2.0 * kPi - d);
      if (d < min_atom_distance) far = false;
    }
    if (!far || (i % 4) != 0) continue;
    const double m = boundary_modulus(mu, phi);
    const double err = std::abs(m - 1.0);
    const bool ok = err <= boundary_tol;
    fails += !ok;
    worst_boundary = std::max(worst_boundary, err);
    csv.add({"boundary", std::to_string(taken), num(std::cos(phi)), num(std::sin(phi)), num(m), "0", "1", "0",
             num(err), tf(ok)});
    ++taken;
  }
  const auto file = rep.write_csv(csv, p.resolved());
  return finish_run(fails == 0, "inner-eval",
                    "max interior error " + short_num(worst_interior) + ", max boundary deviation " +
                        short_num(worst_boundary),
                    file);
}

json growth_run_json(const ModelGrowthRun& r) {
  return {{"N", r.N},
          {"dim", r.op.dim},
          {"basis_tag", r.op.basis_tag},
          {"condition_estimate", r.op.condition_estimate},
          {"overflow", r.inverse_norms.overflow},
          {"strictly_increasing", r.strictly_increasing},
          {"growth", to_json(r.fit)}};
}

RunResult run_model_op(Params& p, Report& rep) {
  const AtomicMeasure mu = measure_from_json(p.raw("measure", {{"dirac_eps0", 0.1}}));
  const int N = static_cast<int>(p.integer("N", 128));
  const int n_max = static_cast<int>(p.integer("n_max", 200));
  const double window = p.real("window", 0.5);
  const auto max_c = p.optional_real("max_c");
  const std::string expect = p.get<std::string>("expect_verdict", "");
  rep.set_output(p.get<std::string>("output", ""), ".json");
  p.finish();

  const ModelGrowthExperiment e = model_growth_experiment(mu, N, n_max, window);
  bool pass = e.agree && e.base.strictly_increasing && e.doubled.strictly_increasing;
  for (const ModelGrowthRun* r : {&e.base, &e.doubled}) {
    if (!expect.empty()) pass = pass && to_string(r->fit.verdict) == expect;
    if (max_c) pass = pass && r->fit.sqrt_c > 0.0 && r->fit.sqrt_c <= *max_c;
  }
  json body{{"measure", to_json(mu)},
            {"runs", json::array({growth_run_json(e.base), growth_run_json(e.doubled)})},
            {"agree", e.agree},
            {"pass", pass}};
  const auto file = rep.write_json(body, p.resolved());
  return finish_run(pass, "model-op",
                    "N=" + std::to_string(N) + ": " + to_string(e.base.fit.verdict) + " c=" +
                        short_num(e.base.fit.sqrt_c) + "; N=" + std::to_string(2 * N) + ": " +
                        to_string(e.doubled.fit.verdict) + " c=" + short_num(e.doubled.fit.sqrt_c),
                    file);
}

RunResult run_growth(Params& p, Report& rep) {
  std::vector<std::pair<int, double>> norms;
  std::string label;
  if (p.has("norms")) {
    const json v = p.raw("norms", json::array());
    try {
      for (const auto& e : v) norms.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    } catch (const json::exception&) {
      throw ConfigError("growth: norms must be [[n, value], ...]");
    }
    label = "supplied";
  } else {
    const std::string model = p.get<std::string>("model", "power");
    const double param = p.real("param", 2.0);
    const int n_max = static_cast<int>(p.integer("n_max", 200));
    if (n_max < 1) throw ConfigError("growth: n_max must be positive");
    for (int n = 1; n <= n_max; ++n) {
      double v;
      if (model == "power") {
        v = std::pow(static_cast<double>(n), param);
      } else if (model == "sqrt_exp") {
        v = std::exp(param * std::sqrt(static_cast<double>(n)));
      } else {
        throw ConfigError("growth: model must be 'power' or 'sqrt_exp'");
      }
      norms.emplace_back(n, v);
    }
    label = model + "(" + short_num(param) + ")";
  }
  const double window = p.real("window", 0.5);
  const std::string expect = p.get<std::string>("expect_verdict", "");
  const auto expect_coef = p.optional_real("expect_coef");
  const double coef_tol = p.real("coef_rel_tol", 0.05);
  rep.set_output(p.get<std::string>("output", ""), ".json");
  p.finish();

  const GrowthReport r = growth_fit(norms, window);
  bool pass = true;
  if (!expect.empty()) pass = pass && to_string(r.verdict) == expect;
  if (expect_coef) {
    const double got = r.verdict == GrowthVerdict::subexp_sqrt ? r.sqrt_c : r.poly_t;
    pass = pass && std::abs(got - *expect_coef) <= coef_tol * std::abs(*expect_coef);
  }
  json body = to_json(r);
  body["pass"] = pass;
  const auto file = rep.write_json(body, p.resolved());
  return finish_run(pass, "growth",
                    label + ": " + to_string(r.verdict) + " t=" + short_num(r.poly_t) + " c=" + short_num(r.sqrt_c),
                    file);
}

RunResult run_quotient(Params& p, Report& rep) {
  const CircleSet E = set_from_config(p.raw("set", {{"points", json::array({0.0})}}));
  const double s = p.real("s", 0.0);
  const int n_max = static_cast<int>(p.integer("n_max", 100));
  const int N_con = static_cast<int>(p.integer("N_con", default_constraint_depth(n_max)));
  const auto expect = p.optional_real("expect");
  const double expect_tol = p.real("expect_tol", 1e-9);
  const double solver_tol = p.real("solver_tol", 1e-9);
  const double window = p.real("window", 0.5);
  rep.set_output(p.get<std::string>("output", ""), ".csv");
  p.finish();

  const QuotientReport q = quotient_inverse_norms(E, s, n_max, N_con);
  Csv csv{{"n", "estimate", "estimate_half", "gap", "lower"}, {}};
  bool monotone = true, matches = true;
  std::vector<std::pair<int, double>> norms;
  for (const auto& r : q.rows) {
    csv.add({std::to_string(r.n), num(r.estimate), num(r.estimate_half), num(r.estimate_half - r.estimate),
             num(r.lower)});
    if (r.estimate > r.estimate_half + solver_tol) monotone = false;
    if (expect && std::abs(r.estimate - *expect) > expect_tol) matches = false;
    norms.emplace_back(r.n, r.estimate);
  }
  bool exp_like = false;
  std::string verdict = "n/a";
  if (std::ceil(window * static_cast<double>(norms.size())) >= 10) {
    const GrowthReport g = growth_fit(norms, window);
    exp_like = g.exponential_like;
    verdict = to_string(g.verdict);
  }
  const bool pass = monotone && matches && !exp_like;
  const auto file = rep.write_csv(csv, p.resolved());
  return finish_run(pass, "quotient",
                    std::to_string(E.size()) + " points, depth " + std::to_string(N_con) + ", monotone " +
                        tf(monotone) + ", verdict " + verdict + ", exponential " + tf(exp_like),
                    file);
}

RunResult run_interp_const(Params& p, Report& rep) {
  const CircleSet E = set_from_config(p.raw("set", {{"points", json::array({0.0, kPi})}}));
  const double s = p.real("s", 0.0);
  const double t = p.real("t", 0.0);
  const int N_con = static_cast<int>(p.integer("N_con", 1000));
  rep.set_output(p.get<std::string>("output", ""), ".json");
  p.finish();

  const InterpolationReport r = interpolation_constant(E, s, t, N_con);
  const double relax = std::cos(kPi / kPhaseCount);
  json body{{"C", r.C},         {"C_lower", relax * r.C}, {"C_half", r.C_half}, {"argmax_n", r.argmax_n},
            {"stable", r.stable}, {"diverging", r.diverging}, {"pass", !r.diverging}};
  const auto file = rep.write_json(body, p.resolved());
  return finish_run(!r.diverging, "interp-const",
                    "C " + short_num(r.C) + " (half depth " + short_num(r.C_half) + ")" +
                        (r.diverging ? ", diverging" : ""),
                    file);
}

using Handler = std::function<RunResult(Params&, Report&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"lemma-tail", run_lemma_tail},     {"norm-compare", run_norm_compare},
      {"approx-unit", run_approx_unit},   {"ditkin", run_ditkin},
      {"divide-roundtrip", run_divide_roundtrip},
      {"ideal-hull", run_ideal_hull},     {"carleson", run_carleson},
      {"atw", run_atw},                   {"build-carleson-set", run_build_carleson_set},
      {"gap-sum", run_gap_sum},           {"inner-eval", run_inner_eval},
      {"model-op", run_model_op},         {"growth", run_growth},
      {"quotient", run_quotient},         {"interp-const", run_interp_const},
  };
  return h;
}

struct SuiteStep {
  int criterion;
  std::string name;
  std::string sub;
  std::string file;
  json config;
};

std::vector<SuiteStep> suite_steps() {
  const double ln3 = std::log(3.0);
  return {
      {1, "tail inequality grid", "lemma-tail", "c01-lemma-tail.csv", json::object()},
      {2, "e_n monomial bound and limit", "approx-unit", "c02-approx-unit.csv", {{"limit_n", 1024}}},
      {3, "derivative norm comparison", "norm-compare", "c03-norm-compare.csv", json::object()},
      {4, "Ditkin convergence", "ditkin", "c04-ditkin.csv", json::object()},
      {5, "division round trip", "divide-roundtrip", "c05-divide-roundtrip.csv", json::object()},
      {6, "Carleson integral of {1}", "carleson", "c06-carleson.json", {{"expect", 2.0}}},
      {6, "middle-thirds gap sum", "gap-sum", "c06-gap-sum.csv", {{"depth", 60}, {"expect", 3.0 * ln3}}},
      {7, "ATW fit for {1}", "atw", "c07-atw.json", {{"scales", 12}, {"max_c1", 1.1}, {"max_c2", 1.1}}},
      {8, "perfect subset scheme", "build-carleson-set", "c08-build-carleson-set.json", {{"depth", 12}}},
      {9, "inner function consistency", "inner-eval", "c09-inner-eval.csv", json::object()},
      {10, "model operator growth", "model-op", "c10-model-op.json",
       {{"N", 128}, {"n_max", 200}, {"max_c", 0.6}, {"expect_verdict", "subexp_sqrt"}}},
      {11, "quotient norms for {1}", "quotient", "c11-quotient-one.csv", {{"n_max", 100}, {"expect", 1.0}}},
      {11, "quotient norms for 8 roots", "quotient", "c11-quotient-eight.csv",
       {{"set", {{"roots_of_unity", 8}}}, {"n_max", 100}}},
      {11, "quotient norms for 3 generic points", "quotient", "c11-quotient-generic.csv",
       {{"set", {{"points", json::array({0.0, 1.0, 2.5})}}}, {"s", 0.3}, {"n_max", 40}}},
      {12, "planted power law", "growth", "c12-growth-power.json",
       {{"model", "power"}, {"param", 2.0}, {"expect_verdict", "polynomial"}, {"expect_coef", 2.0}}},
      {12, "planted sqrt exponential", "growth", "c12-growth-sqrt.json",
       {{"model", "sqrt_exp"}, {"param", 0.4}, {"expect_verdict", "subexp_sqrt"}, {"expect_coef", 0.4}}},
  };
}

RunResult run_all(const json& config, const RunContext& ctx) {
  Params p(config, "all");
  const std::string output = p.get<std::string>("output", "");
  p.finish();
  Csv csv{{"criterion", "name", "subcommand", "pass", "detail"}, {}};
  bool all_pass = true;
  RunResult result;
  for (const SuiteStep& step : suite_steps()) {
    json cfg = step.config;
    cfg["output"] = step.file;
    bool pass = false;
    std::string detail;
    try {
      Params sp(cfg, step.sub);
      Report rep(step.sub, ctx);
      RunResult r = handlers().at(step.sub)(sp, rep);
      pass = r.exit_code == 0;
      detail = r.summary.substr(0, r.summary.rfind(" -> "));
      result.files.insert(result.files.end(), r.files.begin(), r.files.end());
    } catch (const std::exception& e) {
      detail = step.sub + ": error: " + e.what();
    }
    all_pass = all_pass && pass;
    std::string quoted = "\"";
    for (char c : detail) quoted += (c == '"' ? std::string("\"\"") : std::string(1, c));
    quoted += "\"";
    csv.add({std::to_string(step.criterion), step.name, step.sub, tf(pass), quoted});
  }
  Report rep("all", ctx);
  rep.set_output(output, ".csv");
  const auto file = rep.write_csv(csv, p.resolved());
  result.files.push_back(file);
  std::size_t passed = 0;
  for (const auto& r : csv.rows) passed += r[3] == "true";
  result.exit_code = all_pass ? 0 : 1;
  result.summary = std::string("all: ") + (all_pass ? "PASS" : "FAIL") + " " + std::to_string(passed) + "/" +
                   std::to_string(csv.rows.size()) + " steps pass -> " + file.string();
  return result;
}

}  // namespace

std::vector<std::string> subcommand_names() {
  std::vector<std::string> out;
  for (const auto& [k, _] : handlers()) out.push_back(k);
  out.push_back("all");
  return out;
}

RunResult run(const std::string& subcommand, const json& config, const RunContext& ctx) {
  if (subcommand == "all") return run_all(config, ctx);
  auto it = handlers().find(subcommand);
  if (it == handlers().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  Params p(config, subcommand);
  Report rep(subcommand, ctx);
  try {
    return it->second(p, rep);
  } catch (const PreconditionError& e) {
    throw ConfigError(subcommand + ": " + e.what());
  }
}

json parse_flag_overrides(const std::vector<std::string>& args) {
  json out = json::object();
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw ConfigError("unexpected argument '" + a + "'");
    std::string key = a.substr(2);
    std::string value;
    if (auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size()) throw ConfigError("flag --" + key + " needs a value");
      value = args[++i];
    }
    for (char& c : key)
      if (c == '-') c = '_';
    json parsed = json::parse(value, nullptr, false);
    out[key] = parsed.is_discarded() ? json(value) : parsed;
  }
  return out;
}

json merge_config(json base, const json& overrides) {
  if (base.is_null()) base = json::object();
  if (!base.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [k, v] : overrides.items()) base[k] = v;
  return base;
}

std::string csv_body(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::string first;
  std::getline(in, first);
  std::ostringstream rest;
  rest << in.rdbuf();
  return rest.str();
}

}  // namespace beurling
