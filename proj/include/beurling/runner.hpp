#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace beurling {

inline constexpr const char* kVersion = "beurling 0.1.0";

struct RunContext {
  std::filesystem::path out_dir = ".";
  bool timestamp = true;  // first CSV line carries the generation time
};

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 assertion failure
  std::string summary;
  std::vector<std::filesystem::path> files;
};

std::vector<std::string> subcommand_names();

/// Runs one subcommand. Unknown keys throw ConfigError; numerical caps throw
/// NumericalFailure. Output files land in ctx.out_dir unless `output` is set.
RunResult run(const std::string& subcommand, const nlohmann::json& config, const RunContext& ctx);

/// "--key value" pairs to a config object. Values are parsed as JSON when
/// possible and kept as strings otherwise; dashes in keys become underscores.
nlohmann::json parse_flag_overrides(const std::vector<std::string>& args);

/// Shallow merge: keys of `overrides` replace those of `base`.
nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overrides);

/// Lines of a CSV file without the leading timestamp comment.
std::string csv_body(const std::filesystem::path& file);

}  // namespace beurling
