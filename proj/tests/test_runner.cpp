#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "beurling/errors.hpp"
#include "beurling/runner.hpp"

using namespace beurling;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& tag) {
  std::random_device rd;
  const fs::path d = fs::temp_directory_path() / ("beurling-" + tag + "-" + std::to_string(rd()));
  fs::create_directories(d);
  return d;
}

std::vector<std::string> lines_of(const fs::path& f) {
  std::ifstream in(f);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Runner, SubcommandList) {
  const auto names = subcommand_names();
  for (const char* s : {"lemma-tail", "norm-compare", "approx-unit", "ditkin", "divide-roundtrip", "ideal-hull",
                        "carleson", "atw", "build-carleson-set", "gap-sum", "inner-eval", "model-op", "growth",
                        "quotient", "interp-const", "all"})
    EXPECT_NE(std::find(names.begin(), names.end(), s), names.end()) << s;
}

TEST(Runner, UnknownKeyAndSubcommand) {
  const RunContext ctx{fresh_dir("unknown"), false};
  EXPECT_THROW(run("carleson", {{"bogus", 1}}, ctx), ConfigError);
  EXPECT_THROW(run("no-such-thing", json::object(), ctx), ConfigError);
}

TEST(Runner, FlagParsing) {
  const json j = parse_flag_overrides({"--n", "1..8", "--beta", "0,0.3", "--max-c", "0.6", "--set={\"points\":[0]}",
                                       "--name", "abc"});
  EXPECT_EQ(j.at("n"), "1..8");
  EXPECT_EQ(j.at("beta"), "0,0.3");
  EXPECT_EQ(j.at("max_c"), 0.6);
  EXPECT_EQ(j.at("set").at("points")[0], 0);
  EXPECT_EQ(j.at("name"), "abc");
  EXPECT_THROW(parse_flag_overrides({"--n"}), ConfigError);
  EXPECT_THROW(parse_flag_overrides({"stray"}), ConfigError);
  const json m = merge_config({{"a", 1}, {"b", 2}}, {{"b", 3}});
  EXPECT_EQ(m, json({{"a", 1}, {"b", 3}}));
}

TEST(Runner, RangesExpandToRows) {
  const RunContext ctx{fresh_dir("ranges"), false};
  const auto r = run("approx-unit", {{"n", "1..3"}, {"j", "-2..2"}, {"beta", "0,0.5"}}, ctx);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_EQ(r.files.size(), 1u);
  const auto lines = lines_of(r.files[0]);
  ASSERT_EQ(lines.size(), 3u + 3 * 5 * 2);
  EXPECT_EQ(lines[0], "# generated -");
  EXPECT_EQ(lines[2], "check,n,j,beta,value,tail,bound,pass");
  EXPECT_NE(lines[1].find("\"n\":\"1..3\""), std::string::npos);
  EXPECT_NE(lines[1].find("\"slack\""), std::string::npos);  // resolved defaults are embedded
}

TEST(Runner, CarlesonExpectation) {
  const RunContext ctx{fresh_dir("carleson"), true};
  EXPECT_EQ(run("carleson", {{"set", {{"points", {0.0}}}}, {"expect", 2.0}}, ctx).exit_code, 0);
  EXPECT_EQ(run("carleson", {{"set", {{"points", {0.0}}}}, {"expect", 2.5}}, ctx).exit_code, 1);
  EXPECT_THROW(run("carleson", {{"set", {{"points", {0.0, 0.0}}}}}, ctx), ConfigError);
}

TEST(Runner, RankZeroIsNumericalFailure) {
  const RunContext ctx{fresh_dir("rank"), false};
  EXPECT_THROW(run("model-op", {{"measure", {{"atoms", json::array()}}}}, ctx), NumericalFailure);
}

TEST(Runner, DeterministicBody) {
  const RunContext a{fresh_dir("det-a"), true}, b{fresh_dir("det-b"), true};
  const json cfg = {{"count", 20}};
  const auto ra = run("norm-compare", cfg, a);
  const auto rb = run("norm-compare", cfg, b);
  ASSERT_EQ(ra.files.size(), 1u);
  EXPECT_EQ(csv_body(ra.files[0]), csv_body(rb.files[0]));
  EXPECT_EQ(lines_of(ra.files[0])[0].rfind("# generated 20", 0), 0u);
}
