#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "beurling/errors.hpp"
#include "beurling/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted Fourier algebra and operator-growth experiments"};
  app.allow_extras();
  app.prefix_command();

  std::string config_file;
  std::string out_dir;
  bool no_timestamp = false;
  app.add_option("-c,--config", config_file, "JSON config file");
  app.add_option("-o,--out-dir", out_dir, "output directory (default: $BEURLING_OUT_DIR or .)");
  app.add_flag("--no-timestamp", no_timestamp, "write a fixed first CSV line");
  app.set_version_flag("--version", beurling::kVersion);
  app.footer("Subcommands: lemma-tail norm-compare approx-unit ditkin divide-roundtrip ideal-hull carleson atw\n"
             "  build-carleson-set gap-sum inner-eval model-op growth quotient interp-const all\n"
             "Parameters: --key value (JSON or a..b / a,b,c lists); flags override the config file.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::vector<std::string> rest = app.remaining();
  if (!rest.empty() && rest.front() == "verify") rest.erase(rest.begin());
  if (rest.empty()) {
    std::cerr << "missing subcommand\n" << app.help();
    return 2;
  }
  const std::string sub = rest.front();
  rest.erase(rest.begin());

  try {
    nlohmann::json cfg = nlohmann::json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw beurling::ConfigError("cannot read config file " + config_file);
      cfg = nlohmann::json::parse(in, nullptr, false);
      if (cfg.is_discarded()) throw beurling::ConfigError("config file is not valid JSON");
    }
    cfg = beurling::merge_config(cfg, beurling::parse_flag_overrides(rest));

    beurling::RunContext ctx;
    if (!out_dir.empty()) {
      ctx.out_dir = out_dir;
    } else if (const char* env = std::getenv("BEURLING_OUT_DIR")) {
      ctx.out_dir = env;
    }
    ctx.timestamp = !no_timestamp;
    const beurling::RunResult r = beurling::run(sub, cfg, ctx);
    std::cout << r.summary << "\n";
    return r.exit_code;
  } catch (const beurling::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const beurling::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
