#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace beurling {

enum class WeightKind { symmetric_power, asymmetric_power, tabulated };

/// Extrapolation rule for a tabulated weight beyond the last tabulated index
/// on one side. `power`: c·(1+|n|)^p. `exponential`: c·e^{p|n|}.
struct TailRule {
  enum class Kind { none, power, exponential };
  Kind kind = Kind::none;
  double coefficient = 1.0;
  double exponent = 0.0;
};

/// Two-sided weight sequence ω on ℤ. Immutable; evaluation is a pure function
/// of the construction parameters.
class Weight {
 public:
  static Weight power(double s);
  static Weight asymmetric(double s, double t);
  /// Tabulated values with declared tail rules for n above / below the table.
  static Weight tabulated(std::map<std::int64_t, double> table, TailRule positive_tail,
                          TailRule negative_tail);

  /// ω(n). Throws PreconditionError for a tabulated weight queried outside
  /// table and tail rule.
  double operator()(std::int64_t n) const;

  WeightKind kind() const { return kind_; }
  double s() const { return s_; }
  double t() const { return t_; }
  const std::map<std::int64_t, double>& table() const { return table_; }
  const TailRule& positive_tail() const { return positive_tail_; }
  const TailRule& negative_tail() const { return negative_tail_; }

  /// Exponent β with ω(n) = (1+n)^β for n ≥ 0. Only power kinds carry one.
  double positive_exponent() const;

 private:
  Weight() = default;

  WeightKind kind_ = WeightKind::symmetric_power;
  double s_ = 0.0;
  double t_ = 0.0;
  std::map<std::int64_t, double> table_;
  TailRule positive_tail_;
  TailRule negative_tail_;
};

/// Finite-window diagnostic. `pass` is the verdict, `first_violation` the
/// earliest index (or pair) that broke the condition.
struct ConditionReport {
  bool pass = true;
  std::string condition;
  std::string note;
  double max_deviation = 0.0;
  bool monotone = true;
  std::optional<std::int64_t> first_violation;
  // check_condition_A: one row per ε.
  struct EpsilonRow {
    double epsilon = 0.0;
    double sup = 0.0;
    std::int64_t argmax = 0;
    bool tail_decreasing = false;
    bool consistent = false;
  };
  std::vector<EpsilonRow> epsilon_rows;
  // check_submultiplicative
  double worst_ratio = 0.0;
  std::int64_t worst_m = 0;
  std::int64_t worst_n = 0;
};

ConditionReport check_condition_Ws(const Weight& w, double s, std::int64_t window);
ConditionReport check_condition_A(const Weight& w, const std::vector<double>& eps_list,
                                  std::int64_t window);
double regularity_partial_sum(const Weight& w, std::int64_t window);
ConditionReport check_submultiplicative(const Weight& w, std::int64_t window);

nlohmann::json to_json(const Weight& w);
Weight weight_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConditionReport& r);

}  // namespace beurling
