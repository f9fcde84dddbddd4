#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "finsler/types.hpp"

namespace finsler {

// Parsed run configuration. The file format is strict INI: `[section]`
// headers, `key = value` lines, `#` comments. Unknown sections, unknown keys,
// and duplicate keys are ConfigError with the offending line number, so typos
// fail loudly instead of silently running defaults.
//
// Sections and keys:
//   [metric]    family (euclidean|riemannian|randers|custom), dimension,
//               expression (custom), g_<i>_<j> (riemannian entries),
//               alpha_<i>_<j>, beta_<i> (randers data); entries are
//               expressions in x1..xn.
//   [chart]     x<i>_min, x<i>_max per axis (defaults +-1e6).
//   [analysis]  run = comma list of tensors, connections, geodesic,
//               transport, average, classify, holonomy;
//               assert = berwald|landsberg|rigidity.
//   [geodesic]  x, y = comma lists of coordinates; length.
//   [numeric]   seed, tol, quadrature_nodes, ode_rel_tol, ode_abs_tol,
//               sample_points, sample_dirs, curve_count, loop_count,
//               loop_sizes, t_grid.
//   [output]    report (json path), csv (sample table path).

struct MetricConfig {
  std::string family;
  int dimension = 0;
  std::string expression;
  std::vector<std::string> g;      // row-major, riemannian
  std::vector<std::string> alpha;  // row-major, randers
  std::vector<std::string> beta;   // randers
};

struct AnalysisConfig {
  std::vector<std::string> run;  // validated names, file order, no duplicates
  std::string assert_verdict;    // empty, or berwald|landsberg|rigidity

  bool wants(const std::string& name) const;
};

struct GeodesicConfig {
  bool specified = false;
  VectorXd x, y;
  double length = 1.0;
};

struct NumericConfig {
  uint64_t seed = 42;
  double tol = 1e-6;
  int quadrature_nodes = 64;
  double ode_rel_tol = 1e-9;
  double ode_abs_tol = 1e-11;
  int sample_points = 5;
  int sample_dirs = 16;
  int curve_count = 8;
  int loop_count = 8;
  std::vector<double> loop_sizes = {0.05, 0.1, 0.2, 0.4};
  std::vector<double> t_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
};

struct OutputConfig {
  std::string report;
  std::string csv;
};

struct Config {
  MetricConfig metric;
  ChartBox chart;  // materialized against metric.dimension
  AnalysisConfig analysis;
  GeodesicConfig geodesic;
  NumericConfig numeric;
  OutputConfig output;

  // Every accepted key as written, "section.key" -> value, for report echo.
  std::map<std::string, std::string> raw;
};

// Canonical execution order for analyses; `run` entries are validated against
// this list.
const std::vector<std::string>& known_analyses();

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

}  // namespace finsler
