#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "finsler/config.hpp"
#include "finsler/errors.hpp"
#include "finsler/registry.hpp"
#include "finsler/run.hpp"

using namespace finsler;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& text) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

const char* kDriftConfig = R"(# position-dependent drift on a square chart
[metric]
family = randers
dimension = 2
alpha_1_1 = 1
alpha_1_2 = 0
alpha_2_2 = 1
beta_1 = 0.3*x2
beta_2 = 0

[chart]
x1_min = -2
x1_max = 2
x2_min = -2
x2_max = 2

[analysis]
run = tensors, connections, classify

[numeric]
seed = 7
quadrature_nodes = 16
sample_points = 3
sample_dirs = 8
curve_count = 1
loop_count = 6
loop_sizes = 0.1
t_grid = 0, 1
)";

const char* kFlatConfig = R"(
[metric]
family = custom
dimension = 2
expression = sqrt(y1^2 + y2^2) + 0.5*y1

[chart]
x1_min = -2
x1_max = 2
x2_min = -2
x2_max = 2

[analysis]
run = tensors, classify

[geodesic]
x = 0, 0
y = 1, 0
length = 1

[numeric]
quadrature_nodes = 16
sample_points = 3
sample_dirs = 8
curve_count = 2
loop_count = 6
loop_sizes = 0.1, 0.2
t_grid = 0, 1
)";

}  // namespace

TEST_CASE("config parsing: values, defaults, echoes") {
  Config cfg = parse_config(kDriftConfig);
  CHECK(cfg.metric.family == "randers");
  CHECK(cfg.metric.dimension == 2);
  CHECK(cfg.metric.alpha.size() == 4);
  CHECK(cfg.metric.alpha[1] == "0");   // mirrored from alpha_1_2
  CHECK(cfg.metric.alpha[2] == "0");   // symmetric fill
  CHECK(cfg.metric.beta[0] == "0.3*x2");
  CHECK(cfg.chart.lo[0] == -2.0);
  CHECK(cfg.numeric.seed == 7);
  CHECK(cfg.numeric.t_grid == std::vector<double>{0.0, 1.0});
  CHECK(cfg.analysis.wants("classify"));
  CHECK_FALSE(cfg.analysis.wants("holonomy"));
  CHECK(cfg.raw.at("metric.beta_1") == "0.3*x2");
  CHECK(cfg.raw.at("chart.x2_max") == "2");
}

TEST_CASE("config parsing: strictness") {
  CHECK_THROWS_AS(parse_config("[metric]\nfamily = euclidean\n"), ConfigError);

  try {
    parse_config("[metric]\nfamily = euclidean\ndimension = 2\ntypo = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("typo") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config("[metrics]\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_config("[metric]\nfamily = euclidean\ndimension = 9\n"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config("[metric]\nfamily = euclidean\ndimension = 2\n"
                   "[analysis]\nrun = tensors, sorcery\n"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config("[metric]\nfamily = euclidean\ndimension = 2\n"
                   "dimension = 3\n"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config("[metric]\nfamily = euclidean\ndimension = 2\n"
                   "[chart]\nx1_min = 2\nx1_max = -2\n"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config("[metric]\nfamily = euclidean\ndimension = 2\n"
                   "[analysis]\nrun = geodesic\n"),
      ConfigError);  // geodesic analysis without [geodesic]
}

TEST_CASE("analysis run produces a versioned report with verdicts") {
  Config cfg = parse_config(kDriftConfig);
  RunResult r = run_analysis(cfg);
  CHECK(r.exit_code == 0);
  json rep = json::parse(r.report_text);
  CHECK(rep["schema_version"] == "1");
  CHECK(rep["config"]["metric.family"] == "randers");
  CHECK(rep["verdicts"]["is_berwald"]["verdict"] == "no");
  CHECK(rep["verdicts"]["is_landsberg"]["verdict"] == "no");
  CHECK(rep["verdicts"]["rigidity_holds"]["verdict"] == "no");
  CHECK(rep["verdicts"]["is_berwald"]["residual"].get<double>() > 1e-3);
  CHECK(rep["timings"].is_object());
  CHECK(rep["timings"].empty());  // deterministic by default
  CHECK(rep["samples"]["connections"]["nonlinear_variant_gap"].get<double>() <
        1e-7);
  bool found_homogeneity = false;
  for (const auto& e : rep["residuals"])
    if (e["name"] == "homogeneity") {
      found_homogeneity = true;
      CHECK(e["value"].get<double>() < 1e-9);
    }
  CHECK(found_homogeneity);
}

TEST_CASE("reports are byte-identical across runs, timings only on request") {
  Config cfg = parse_config(kFlatConfig);
  RunResult a = run_analysis(cfg);
  RunResult b = run_analysis(cfg);
  CHECK(a.report_text == b.report_text);
  CHECK(a.exit_code == 0);
  json rep = json::parse(a.report_text);
  CHECK(rep["verdicts"]["is_berwald"]["verdict"] == "yes");
  CHECK(rep["verdicts"]["holonomy_class"]["verdict"] == "trivial");

  RunOptions with_timings;
  with_timings.timings = true;
  RunResult t = run_analysis(cfg, with_timings);
  json trep = json::parse(t.report_text);
  CHECK_FALSE(trep["timings"].empty());
  CHECK(trep["timings"].contains("classify"));
}

TEST_CASE("seed override changes sampling but stays deterministic") {
  Config cfg = parse_config(kFlatConfig);
  RunOptions opt;
  opt.has_seed = true;
  opt.seed = 1234;
  RunResult a = run_analysis(cfg, opt);
  RunResult b = run_analysis(cfg, opt);
  CHECK(a.report_text == b.report_text);
  json rep = json::parse(a.report_text);
  CHECK(rep["config"]["numeric.seed"] == "1234");
  // verdicts are seed-stable even though residual samples move
  CHECK(rep["verdicts"]["is_berwald"]["verdict"] == "yes");
}

TEST_CASE("assert gives exit code 2 when the verdict is not yes") {
  Config cfg = parse_config(kDriftConfig);
  RunOptions opt;
  opt.assert_verdict = "berwald";
  RunResult r = run_analysis(cfg, opt);
  CHECK(r.exit_code == 2);

  Config flat = parse_config(kFlatConfig);
  RunResult ok = run_analysis(flat, opt);
  CHECK(ok.exit_code == 0);
}

TEST_CASE("numeric failures produce an error report and exit code 1") {
  // drift large enough to destroy strong convexity
  std::string text = kDriftConfig;
  size_t pos = text.find("0.3*x2");
  text.replace(pos, 6, "1.9*x2");
  Config cfg = parse_config(text);
  RunResult r = run_analysis(cfg);
  CHECK(r.exit_code == 1);
  json rep = json::parse(r.report_text);
  CHECK(rep.contains("error"));
  CHECK(rep["error"]["type"] == "StrongConvexityViolation");
  CHECK(rep["verdicts"].empty());
}

TEST_CASE("expression errors surface with their position") {
  std::string text = kFlatConfig;
  size_t pos = text.find("sqrt(y1^2 + y2^2) + 0.5*y1");
  std::string cfg_text = text;
  cfg_text.replace(pos, 26, "sqrt(y1^2 + y3^2)");
  Config cfg = parse_config(cfg_text);
  RunResult r = run_analysis(cfg);
  CHECK(r.exit_code == 1);
  json rep = json::parse(r.report_text);
  CHECK(rep["error"]["type"] == "UnknownSymbol");
  CHECK(rep["error"]["message"].get<std::string>().find("y3") !=
        std::string::npos);
}

TEST_CASE("report lands in the configured output file") {
  fs::path out = fs::temp_directory_path() / "finsler_report_test.json";
  std::error_code ec;
  fs::remove(out, ec);
  Config cfg = parse_config(kFlatConfig);
  RunOptions opt;
  opt.out_path = out.string();
  RunResult r = run_analysis(cfg, opt);
  CHECK(r.exit_code == 0);
  std::ifstream in(out);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == r.report_text);
  fs::remove(out, ec);
}

TEST_CASE("runtime-registered families build through the same pipeline") {
  static bool registered = false;
  if (!registered) {
    FamilyInfo info;
    info.name = "scaled_euclidean";
    info.summary = "euclidean norm times a fixed factor";
    info.keys = {"dimension"};
    info.build = [](const MetricConfig& m) {
      std::string terms;
      for (int i = 1; i <= m.dimension; ++i)
        terms += (i > 1 ? " + " : "") + std::string("y") + std::to_string(i) +
                 "^2";
      return FinslerStructure::custom("2*sqrt(" + terms + ")", m.dimension);
    };
    MetricRegistry::instance().register_family(info);
    registered = true;
  }
  CHECK(MetricRegistry::instance().find("scaled_euclidean") != nullptr);
  CHECK_THROWS_AS(MetricRegistry::instance().register_family(
                      {"euclidean", "", {}, nullptr}),
                  ConfigError);

  Config cfg = parse_config(
      "[metric]\nfamily = scaled_euclidean\ndimension = 2\n"
      "[chart]\nx1_min = -1\nx1_max = 1\nx2_min = -1\nx2_max = 1\n"
      "[analysis]\nrun = tensors\n");
  RunResult r = run_analysis(cfg);
  CHECK(r.exit_code == 0);
  json rep = json::parse(r.report_text);
  CHECK(rep["samples"]["tensors"]["min_f"].get<double>() > 1.0);
}

#ifdef FINSLER_CLI_PATH
TEST_CASE("the installed binary honors exit codes and output paths") {
  const std::string bin = FINSLER_CLI_PATH;
  fs::path cfg_path = write_file("finsler_cli_cfg.ini", kFlatConfig);
  fs::path out = fs::temp_directory_path() / "finsler_cli_report.json";
  std::error_code ec;
  fs::remove(out, ec);

  std::string cmd = bin + " analyze " + cfg_path.string() + " --out " +
                    out.string();
  CHECK(std::system(cmd.c_str()) == 0);
  std::ifstream in(out);
  REQUIRE(in.good());
  json rep;
  in >> rep;
  CHECK(rep["schema_version"] == "1");

  std::string bad = bin + " classify " + cfg_path.string() +
                    " --assert landsberg --out " + out.string();
  int rc = std::system(bad.c_str());
  CHECK(WIFEXITED(rc));
  CHECK(WEXITSTATUS(rc) == 0);  // flat drift metric is landsberg

  fs::path drift_path = write_file("finsler_cli_drift.ini", kDriftConfig);
  std::string fail = bin + " classify " + drift_path.string() +
                     " --assert berwald --out " + out.string();
  rc = std::system(fail.c_str());
  CHECK(WIFEXITED(rc));
  CHECK(WEXITSTATUS(rc) == 2);

  CHECK(std::system((bin + " list-metrics > /dev/null").c_str()) == 0);
  fs::remove(out, ec);
  fs::remove(cfg_path, ec);
  fs::remove(drift_path, ec);
}
#endif
