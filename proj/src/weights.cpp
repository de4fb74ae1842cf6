#include "beurling/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "beurling/errors.hpp"

namespace beurling {

namespace {

double apply_tail(const TailRule& rule, std::int64_t n) {
  const double a = static_cast<double>(std::llabs(n));
  switch (rule.kind) {
    case TailRule::Kind::power:
      return rule.coefficient * std::pow(1.0 + a, rule.exponent);
    case TailRule::Kind::exponential:
      return rule.coefficient * std::exp(rule.exponent * a);
    case TailRule::Kind::none:
      break;
  }
  throw PreconditionError("tabulated weight queried at n = " + std::to_string(n) +
                          " outside its table and without a tail rule");
}

const char* kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::symmetric_power: return "symmetric_power";
    case WeightKind::asymmetric_power: return "asymmetric_power";
    case WeightKind::tabulated: return "tabulated";
  }
  return "?";
}

nlohmann::json tail_to_json(const TailRule& r) {
  const char* k = r.kind == TailRule::Kind::power         ? "power"
                  : r.kind == TailRule::Kind::exponential ? "exponential"
                                                          : "none";
  return {{"kind", k}, {"coefficient", r.coefficient}, {"exponent", r.exponent}};
}

TailRule tail_from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items()) {
    if (key != "kind" && key != "coefficient" && key != "exponent") {
      throw ConfigError("unknown key in weight tail rule: " + key);
    }
  }
  TailRule r;
  const std::string k = j.value("kind", "none");
  if (k == "power") {
    r.kind = TailRule::Kind::power;
  } else if (k == "exponential") {
    r.kind = TailRule::Kind::exponential;
  } else if (k != "none") {
    throw ConfigError("unknown tail rule kind: " + k);
  }
  r.coefficient = j.value("coefficient", 1.0);
  r.exponent = j.value("exponent", 0.0);
  return r;
}

}  // namespace

Weight Weight::power(double s) {
  if (!(s >= 0.0)) throw PreconditionError("power_weight: s must be nonnegative");
  Weight w;
  w.kind_ = WeightKind::symmetric_power;
  w.s_ = s;
  w.t_ = s;
  return w;
}

Weight Weight::asymmetric(double s, double t) {
  if (!(s >= 0.0)) throw PreconditionError("asym_weight: s must be nonnegative");
  if (!(t >= s)) throw PreconditionError("asym_weight: requires t >= s");
  Weight w;
  w.kind_ = WeightKind::asymmetric_power;
  w.s_ = s;
  w.t_ = t;
  return w;
}

Weight Weight::tabulated(std::map<std::int64_t, double> table, TailRule positive_tail,
                         TailRule negative_tail) {
  for (const auto& [n, v] : table) {
    if (!(v >= 1.0) || !std::isfinite(v)) {
      throw PreconditionError("tabulated weight: value at n = " + std::to_string(n) +
                              " must be finite and >= 1");
    }
  }
  for (const TailRule* r : {&positive_tail, &negative_tail}) {
    if (r->kind != TailRule::Kind::none && (r->coefficient < 1.0 || r->exponent < 0.0)) {
      throw PreconditionError("tabulated weight: tail rule must keep values >= 1");
    }
  }
  Weight w;
  w.kind_ = WeightKind::tabulated;
  w.table_ = std::move(table);
  w.positive_tail_ = positive_tail;
  w.negative_tail_ = negative_tail;
  return w;
}

double Weight::operator()(std::int64_t n) const {
  const double a = static_cast<double>(std::llabs(n));
  switch (kind_) {
    case WeightKind::symmetric_power:
      return s_ == 0.0 ? 1.0 : std::pow(1.0 + a, s_);
    case WeightKind::asymmetric_power: {
      const double e = n >= 0 ? s_ : t_;
      return e == 0.0 ? 1.0 : std::pow(1.0 + a, e);
    }
    case WeightKind::tabulated: {
      if (auto it = table_.find(n); it != table_.end()) return it->second;
      if (!table_.empty() && n > table_.begin()->first && n < table_.rbegin()->first) {
        throw PreconditionError("tabulated weight has a hole at n = " + std::to_string(n));
      }
      // Above the table (or n >= 0 with an empty table) the positive rule applies.
      const bool above = table_.empty() ? n >= 0 : n > table_.rbegin()->first;
      return apply_tail(above ? positive_tail_ : negative_tail_, n);
    }
  }
  return 1.0;
}

double Weight::positive_exponent() const {
  if (kind_ == WeightKind::tabulated) {
    throw PreconditionError("tabulated weight carries no (W_s) exponent");
  }
  return s_;
}

ConditionReport check_condition_Ws(const Weight& w, double s, std::int64_t window) {
  if (window < 2) throw PreconditionError("check_condition_Ws: window must be >= 2");
  ConditionReport r;
  r.condition = "W_s";
  double prev_ratio = 0.0;
  for (std::int64_t n = 0; n <= window; ++n) {
    const double target = std::pow(1.0 + static_cast<double>(n), s);
    const double dev = std::abs(w(n) - target) / target;
    if (dev > r.max_deviation) r.max_deviation = dev;
    if (dev > 1e-12 && !r.first_violation) r.first_violation = n;

    const double ratio = w(-n) / target;
    if (n > 0 && ratio < prev_ratio * (1.0 - 1e-14)) {
      if (r.monotone && !r.first_violation) r.first_violation = n;
      r.monotone = false;
    }
    prev_ratio = ratio;
  }
  r.pass = r.monotone && r.max_deviation <= 1e-12;
  r.note = "finite window 0..N";
  return r;
}

ConditionReport check_condition_A(const Weight& w, const std::vector<double>& eps_list,
                                  std::int64_t window) {
  if (window < 2) throw PreconditionError("check_condition_A: window must be >= 2");
  if (eps_list.empty()) throw PreconditionError("check_condition_A: empty epsilon list");
  ConditionReport r;
  r.condition = "A";
  r.note =
      "finite-window verdict: consistent iff the sup is attained before the last decade "
      "of the window and the sequence decreases strictly across that decade";
  const std::int64_t decade_start = std::max<std::int64_t>(1, window - window / 10);
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw PreconditionError("check_condition_A: epsilon must be positive");
    ConditionReport::EpsilonRow row;
    row.epsilon = eps;
    row.tail_decreasing = true;
    double prev = 0.0;
    for (std::int64_t n = 1; n <= window; ++n) {
      // log-domain to survive fast-growing tabulated weights
      const double v = std::exp(std::log(w(-n)) - eps * std::sqrt(static_cast<double>(n)));
      if (v > row.sup) {
        row.sup = v;
        row.argmax = n;
      }
      if (n > decade_start && !(v < prev)) row.tail_decreasing = false;
      prev = v;
    }
    row.consistent = row.argmax < decade_start && row.tail_decreasing;
    if (!row.consistent) {
      r.pass = false;
      if (!r.first_violation) r.first_violation = row.argmax;
    }
    r.epsilon_rows.push_back(row);
  }
  return r;
}

double regularity_partial_sum(const Weight& w, std::int64_t window) {
  if (window < 1) throw PreconditionError("regularity_partial_sum: window must be >= 1");
  double sum = 0.0;
  for (std::int64_t n = -window; n <= window; ++n) {
    const double nd = static_cast<double>(n);
    sum += std::log(w(n)) / (1.0 + nd * nd);
  }
  return sum;
}

ConditionReport check_submultiplicative(const Weight& w, std::int64_t window) {
  if (window < 1) throw PreconditionError("check_submultiplicative: window must be >= 1");
  ConditionReport r;
  r.condition = "submultiplicative";
  std::vector<double> cache(static_cast<std::size_t>(4 * window + 1));
  for (std::int64_t k = -2 * window; k <= 2 * window; ++k) {
    cache[static_cast<std::size_t>(k + 2 * window)] = w(k);
  }
  auto at = [&](std::int64_t k) { return cache[static_cast<std::size_t>(k + 2 * window)]; };
  r.worst_ratio = -1.0;
  for (std::int64_t m = -window; m <= window; ++m) {
    for (std::int64_t n = -window; n <= window; ++n) {
      const double ratio = at(m + n) / (at(m) * at(n));
      if (ratio > r.worst_ratio) {
        r.worst_ratio = ratio;
        r.worst_m = m;
        r.worst_n = n;
      }
    }
  }
  r.pass = r.worst_ratio <= 1.0 + 1e-12;
  if (!r.pass) r.first_violation = r.worst_m;
  r.note = "exhaustive over |m|,|n| <= N";
  return r;
}

nlohmann::json to_json(const Weight& w) {
  nlohmann::json j{{"kind", kind_name(w.kind())}, {"s", w.s()}, {"t", w.t()}};
  if (w.kind() == WeightKind::tabulated) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& [n, v] : w.table()) table.push_back({n, v});
    j["table"] = table;
    j["tail_positive"] = tail_to_json(w.positive_tail());
    j["tail_negative"] = tail_to_json(w.negative_tail());
  }
  return j;
}

Weight weight_from_json(const nlohmann::json& j) {
  static const std::set<std::string> allowed{"kind",          "s", "t", "table",
                                             "tail_positive", "tail_negative"};
  if (!j.is_object()) throw ConfigError("weight must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key in weight: " + key);
  }
  const std::string kind = j.value("kind", "symmetric_power");
  try {
    if (kind == "symmetric_power") return Weight::power(j.value("s", 0.0));
    if (kind == "asymmetric_power") return Weight::asymmetric(j.value("s", 0.0), j.value("t", 0.0));
    if (kind == "tabulated") {
      std::map<std::int64_t, double> table;
      for (const auto& entry : j.at("table")) {
        table[entry.at(0).get<std::int64_t>()] = entry.at(1).get<double>();
      }
      TailRule pos, neg;
      if (j.contains("tail_positive")) pos = tail_from_json(j["tail_positive"]);
      if (j.contains("tail_negative")) neg = tail_from_json(j["tail_negative"]);
      return Weight::tabulated(std::move(table), pos, neg);
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("weight: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("weight: ") + e.what());
  }
  throw ConfigError("unknown weight kind: " + kind);
}

nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json j{{"condition", r.condition}, {"pass", r.pass}, {"note", r.note}};
  if (r.condition == "W_s") {
    j["max_deviation"] = r.max_deviation;
    j["monotone"] = r.monotone;
  }
  if (r.first_violation) j["first_violation"] = *r.first_violation;
  if (!r.epsilon_rows.empty()) {
    auto rows = nlohmann::json::array();
    for (const auto& e : r.epsilon_rows) {
      rows.push_back({{"epsilon", e.epsilon},
                      {"sup", e.sup},
                      {"argmax", e.argmax},
                      {"tail_decreasing", e.tail_decreasing},
                      {"consistent", e.consistent}});
    }
    j["epsilon"] = rows;
  }
  if (r.condition == "submultiplicative") {
    j["worst_ratio"] = r.worst_ratio;
    j["worst_pair"] = {r.worst_m, r.worst_n};
  }
  return j;
}

}  // namespace beurling
