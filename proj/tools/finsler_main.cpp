// Command-line driver: runs configured analyses on a Finsler structure and
// writes a JSON report. See README.md for the config format.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsler/errors.hpp"
#include "finsler/registry.hpp"
#include "finsler/report.hpp"
#include "finsler/run.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string assert_verdict;
  uint64_t seed = 0;
  bool has_seed = false;
  bool timings = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "path to the run config file")
      ->required();
  cmd->add_option("--out", args.out_path,
                  "report path (overrides [output] report; default stdout)");
  cmd->add_option("--seed", args.seed, "seed override for all sampling")
      ->each([&args](const std::string&) { args.has_seed = true; });
  cmd->add_option("--assert", args.assert_verdict,
                  "exit 2 unless this verdict is yes")
      ->check(CLI::IsMember({"berwald", "landsberg", "rigidity"}));
  cmd->add_flag("--timings", args.timings,
                "record wall-clock timings in the report");
}

int run_command(const CommonArgs& args,
                const std::vector<std::string>& force_run) {
  finsler::RunOptions opt;
  opt.has_seed = args.has_seed;
  opt.seed = args.seed;
  opt.out_path = args.out_path;
  opt.assert_verdict = args.assert_verdict;
  opt.timings = args.timings;
  opt.force_run = force_run;
  finsler::RunResult result = finsler::run_analysis_file(args.config_path, opt);
  // Reports go to stdout when no file path was resolved.
  bool wrote_file = !args.out_path.empty();
  if (!wrote_file) {
    const finsler::JsonValue* echo = result.report.find("config");
    wrote_file = echo && echo->find("output.report");
  }
  if (!wrote_file) std::cout << result.report_text;
  return result.exit_code;
}

int list_metrics(bool as_json) {
  auto families = finsler::MetricRegistry::instance().families();
  if (as_json) {
    finsler::JsonValue arr = finsler::JsonValue::array();
    for (const auto& f : families) {
      finsler::JsonValue e = finsler::JsonValue::object();
      e.set("name", finsler::JsonValue::string(f.name));
      e.set("summary", finsler::JsonValue::string(f.summary));
      finsler::JsonValue keys = finsler::JsonValue::array();
      for (const auto& k : f.keys) keys.push(finsler::JsonValue::string(k));
      e.set("keys", std::move(keys));
      arr.push(std::move(e));
    }
    std::cout << arr.dump();
  } else {
    for (const auto& f : families) {
      std::printf("%-12s %s\n", f.name.c_str(), f.summary.c_str());
      std::printf("%-12s keys:", "");
      for (const auto& k : f.keys) std::printf(" %s", k.c_str());
      std::printf("\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finsler: numerical analysis of Finsler structures"};
  app.require_subcommand(1);

  CommonArgs analyze_args, classify_args, holonomy_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "run the analyses listed in the config");
  add_common(analyze, analyze_args);

  CLI::App* classify = app.add_subcommand(
      "classify", "berwald / landsberg / rigidity verdicts (and holonomy in 2D)");
  add_common(classify, classify_args);

  CLI::App* holonomy = app.add_subcommand(
      "holonomy", "loop transports of the averaged connection, classified");
  add_common(holonomy, holonomy_args);

  bool json_list = false;
  CLI::App* list = app.add_subcommand("list-metrics",
                                      "show the registered metric families");
  list->add_flag("--json", json_list, "machine-readable listing");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) return list_metrics(json_list);
    if (analyze->parsed()) return run_command(analyze_args, {});
    if (classify->parsed()) return run_command(classify_args, {"classify"});
    return run_command(holonomy_args, {"holonomy"});
  } catch (const finsler::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const finsler::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
