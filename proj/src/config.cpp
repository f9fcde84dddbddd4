#include "finsler/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

const std::vector<std::string>& known_analyses() {
  static const std::vector<std::string> names = {
      "tensors",  "connections", "geodesic", "transport",
      "average",  "classify",    "holonomy"};
  return names;
}

bool AnalysisConfig::wants(const std::string& name) const {
  return std::find(run.begin(), run.end(), name) != run.end();
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError(msg, line);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in value of " + key);
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected a number for " + key + ", got '" + v + "'");
  }
}

long parse_int(const std::string& v, int line, const std::string& key) {
  try {
    size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in value of " + key);
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected an integer for " + key + ", got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& v, int line,
                                      const std::string& key) {
  std::vector<double> out;
  for (const std::string& item : split_list(v))
    out.push_back(parse_double(item, line, key));
  if (out.empty()) fail(line, "empty list for " + key);
  return out;
}

// Indexed keys like g_2_1, alpha_1_1, beta_2, x3_min. Returns true and fills
// the indices when `key` matches `prefix` with the expected index count.
bool match_indexed(const std::string& key, const std::string& prefix,
                   int count, int idx[2]) {
  if (key.compare(0, prefix.size(), prefix) != 0) return false;
  std::string rest = key.substr(prefix.size());
  for (int c = 0; c < count; ++c) {
    if (rest.empty() || rest[0] != '_') return false;
    rest = rest.substr(1);
    size_t d = 0;
    while (d < rest.size() && std::isdigit((unsigned char)rest[d])) ++d;
    if (d == 0) return false;
    idx[c] = std::stoi(rest.substr(0, d));
    rest = rest.substr(d);
  }
  return rest.empty();
}

struct IndexedValue {
  int i = 0, j = 0;
  std::string value;
  int line = 0;
};

struct RawConfig {
  std::map<std::string, std::string> scalars;  // section.key -> value
  std::map<std::string, int> lines;            // section.key -> line number
  std::vector<IndexedValue> g, alpha, beta;
  std::map<int, double> chart_lo, chart_hi;
};

const std::set<std::string>& section_names() {
  static const std::set<std::string> s = {"metric",   "chart",   "analysis",
                                          "geodesic", "numeric", "output"};
  return s;
}

bool known_scalar(const std::string& section, const std::string& key) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"metric", {"family", "dimension", "expression"}},
      {"analysis", {"run", "assert"}},
      {"geodesic", {"x", "y", "length"}},
      {"numeric",
       {"seed", "tol", "quadrature_nodes", "ode_rel_tol", "ode_abs_tol",
        "sample_points", "sample_dirs", "curve_count", "loop_count",
        "loop_sizes", "t_grid"}},
      {"output", {"report", "csv"}},
  };
  auto it = keys.find(section);
  return it != keys.end() && it->second.count(key) > 0;
}

RawConfig scan(const std::string& text) {
  RawConfig raw;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!section_names().count(section))
        fail(lineno, "unknown section [" + section + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(lineno, "expected 'key = value', got '" + line + "'");
    if (section.empty()) fail(lineno, "key before any [section] header");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (value.empty()) fail(lineno, "empty value for " + key);

    int idx[2] = {0, 0};
    if (section == "metric" && match_indexed(key, "g", 2, idx)) {
      raw.g.push_back({idx[0], idx[1], value, lineno});
    } else if (section == "metric" && match_indexed(key, "alpha", 2, idx)) {
      raw.alpha.push_back({idx[0], idx[1], value, lineno});
    } else if (section == "metric" && match_indexed(key, "beta", 1, idx)) {
      raw.beta.push_back({idx[0], 0, value, lineno});
    } else if (section == "chart") {
      // x<i>_min / x<i>_max
      bool ok = false;
      if (key.size() > 5 && key[0] == 'x') {
        size_t us = key.rfind('_');
        std::string suffix = us == std::string::npos ? "" : key.substr(us);
        std::string digits =
            us == std::string::npos ? "" : key.substr(1, us - 1);
        bool all_digits =
            !digits.empty() &&
            std::all_of(digits.begin(), digits.end(), [](unsigned char c) {
              return std::isdigit(c);
            });
        if (all_digits && (suffix == "_min" || suffix == "_max")) {
          int axis = std::stoi(digits);
          if (axis < 1) fail(lineno, "chart axis index must be >= 1");
          auto& side = suffix == "_min" ? raw.chart_lo : raw.chart_hi;
          if (side.count(axis)) fail(lineno, "duplicate key " + key);
          side[axis] = parse_double(value, lineno, key);
          raw.scalars["chart." + key] = value;
          ok = true;
        }
      }
      if (!ok) fail(lineno, "unknown key '" + key + "' in section [chart]");
    } else if (known_scalar(section, key)) {
      std::string full = section + "." + key;
      if (raw.scalars.count(full)) fail(lineno, "duplicate key " + key);
      raw.scalars[full] = value;
      raw.lines[full] = lineno;
    } else {
      fail(lineno, "unknown key '" + key + "' in section [" + section + "]");
    }
  }
  // Indexed duplicates.
  auto check_dup = [](const std::vector<IndexedValue>& v, const char* what) {
    for (size_t a = 0; a < v.size(); ++a)
      for (size_t b = a + 1; b < v.size(); ++b)
        if (v[a].i == v[b].i && v[a].j == v[b].j)
          fail(v[b].line, std::string("duplicate ") + what + " entry");
  };
  check_dup(raw.g, "g");
  check_dup(raw.alpha, "alpha");
  check_dup(raw.beta, "beta");
  return raw;
}

VectorXd parse_vector(const std::string& v, int line, const std::string& key,
                      int n) {
  std::vector<double> vals = parse_double_list(v, line, key);
  if (int(vals.size()) != n)
    fail(line, key + " needs " + std::to_string(n) + " coordinates");
  VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = vals[i];
  return out;
}

std::vector<std::string> materialize_entries(
    const std::vector<IndexedValue>& entries, int n, const char* what,
    bool square) {
  size_t count = square ? size_t(n) * n : size_t(n);
  std::vector<std::string> out(count);
  std::vector<int> seen(count, 0);
  for (const IndexedValue& e : entries) {
    int i = e.i, j = e.j;
    if (i < 1 || i > n || (square && (j < 1 || j > n)))
      fail(e.line, std::string(what) + " index out of range for dimension " +
                       std::to_string(n));
    size_t flat = square ? size_t(i - 1) * n + (j - 1) : size_t(i - 1);
    out[flat] = e.value;
    seen[flat] = e.line;
    if (square) {
      // Mirror symmetric entries unless the mirror is given explicitly.
      size_t mirror = size_t(j - 1) * n + (i - 1);
      if (!seen[mirror]) {
        out[mirror] = e.value;
        seen[mirror] = -e.line;
      }
    }
  }
  for (size_t f = 0; f < count; ++f)
    if (seen[f] == 0) {
      std::ostringstream os;
      os << "missing " << what << " entry ";
      if (square)
        os << "(" << (f / n + 1) << "," << (f % n + 1) << ")";
      else
        os << (f + 1);
      fail(0, os.str());
    }
  return out;
}

}  // namespace

Config parse_config(const std::string& text) {
  RawConfig raw = scan(text);
  Config cfg;

  auto get = [&](const std::string& full) -> const std::string* {
    auto it = raw.scalars.find(full);
    return it == raw.scalars.end() ? nullptr : &it->second;
  };
  auto line_of = [&](const std::string& full) {
    auto it = raw.lines.find(full);
    return it == raw.lines.end() ? 0 : it->second;
  };

  // [metric]
  if (const std::string* v = get("metric.family"))
    cfg.metric.family = *v;
  else
    fail(0, "missing required key family in [metric]");
  if (const std::string* v = get("metric.dimension")) {
    long d = parse_int(*v, line_of("metric.dimension"), "dimension");
    if (d < 1 || d > 4)
      fail(line_of("metric.dimension"), "dimension must be between 1 and 4");
    cfg.metric.dimension = int(d);
  } else {
    fail(0, "missing required key dimension in [metric]");
  }
  const int n = cfg.metric.dimension;
  if (const std::string* v = get("metric.expression")) cfg.metric.expression = *v;

  const std::string& fam = cfg.metric.family;
  if (fam == "custom") {
    if (cfg.metric.expression.empty())
      fail(0, "family custom needs an expression key");
  } else if (fam == "riemannian") {
    cfg.metric.g = materialize_entries(raw.g, n, "g", true);
  } else if (fam == "randers") {
    cfg.metric.alpha = materialize_entries(raw.alpha, n, "alpha", true);
    cfg.metric.beta = materialize_entries(raw.beta, n, "beta", false);
  } else if (fam != "euclidean") {
    // Other families may be registered at runtime; keep whatever indexed
    // data was provided without requiring it.
    for (const IndexedValue& e : raw.g) cfg.metric.g.push_back(e.value);
  }

  // [chart]
  cfg.chart = ChartBox::cube(n, -1e6, 1e6);
  for (const auto& [axis, v] : raw.chart_lo) {
    if (axis > n) fail(0, "chart axis exceeds dimension");
    cfg.chart.lo[axis - 1] = v;
  }
  for (const auto& [axis, v] : raw.chart_hi) {
    if (axis > n) fail(0, "chart axis exceeds dimension");
    cfg.chart.hi[axis - 1] = v;
  }
  for (int i = 0; i < n; ++i)
    if (!(cfg.chart.lo[i] < cfg.chart.hi[i]))
      fail(0, "chart bounds must satisfy min < max on every axis");

  // [analysis]
  if (const std::string* v = get("analysis.run")) {
    int ln = line_of("analysis.run");
    for (const std::string& name : split_list(*v)) {
      const auto& known = known_analyses();
      if (std::find(known.begin(), known.end(), name) == known.end())
        fail(ln, "unknown analysis '" + name + "'");
      if (cfg.analysis.wants(name)) fail(ln, "duplicate analysis '" + name + "'");
      cfg.analysis.run.push_back(name);
    }
  } else {
    cfg.analysis.run = {"tensors", "connections"};
  }
  if (const std::string* v = get("analysis.assert")) {
    int ln = line_of("analysis.assert");
    if (*v != "berwald" && *v != "landsberg" && *v != "rigidity")
      fail(ln, "assert must be berwald, landsberg, or rigidity");
    cfg.analysis.assert_verdict = *v;
    if (!cfg.analysis.wants("classify")) cfg.analysis.run.push_back("classify");
  }

  // [geodesic]
  if (get("geodesic.x") || get("geodesic.y") || get("geodesic.length")) {
    if (!get("geodesic.x") || !get("geodesic.y"))
      fail(0, "[geodesic] needs both x and y");
    cfg.geodesic.specified = true;
    cfg.geodesic.x = parse_vector(*get("geodesic.x"), line_of("geodesic.x"),
                                  "geodesic x", n);
    cfg.geodesic.y = parse_vector(*get("geodesic.y"), line_of("geodesic.y"),
                                  "geodesic y", n);
    if (const std::string* v = get("geodesic.length")) {
      cfg.geodesic.length =
          parse_double(*v, line_of("geodesic.length"), "length");
      if (cfg.geodesic.length <= 0.0)
        fail(line_of("geodesic.length"), "length must be positive");
    }
  }
  if ((cfg.analysis.wants("geodesic") || cfg.analysis.wants("transport")) &&
      !cfg.geodesic.specified)
    fail(0, "geodesic and transport analyses need a [geodesic] section");

  // [numeric]
  auto num_int = [&](const char* key, int lo, int& dst) {
    std::string full = std::string("numeric.") + key;
    if (const std::string* v = get(full)) {
      long d = parse_int(*v, line_of(full), key);
      if (d < lo)
        fail(line_of(full),
             std::string(key) + " must be >= " + std::to_string(lo));
      dst = int(d);
    }
  };
  auto num_double = [&](const char* key, double& dst) {
    std::string full = std::string("numeric.") + key;
    if (const std::string* v = get(full)) {
      double d = parse_double(*v, line_of(full), key);
      if (d <= 0.0) fail(line_of(full), std::string(key) + " must be positive");
      dst = d;
    }
  };
  if (const std::string* v = get("numeric.seed")) {
    long d = parse_int(*v, line_of("numeric.seed"), "seed");
    if (d < 0) fail(line_of("numeric.seed"), "seed must be >= 0");
    cfg.numeric.seed = uint64_t(d);
  }
  num_double("tol", cfg.numeric.tol);
  num_int("quadrature_nodes", 4, cfg.numeric.quadrature_nodes);
  num_double("ode_rel_tol", cfg.numeric.ode_rel_tol);
  num_double("ode_abs_tol", cfg.numeric.ode_abs_tol);
  num_int("sample_points", 1, cfg.numeric.sample_points);
  num_int("sample_dirs", 1, cfg.numeric.sample_dirs);
  num_int("curve_count", 1, cfg.numeric.curve_count);
  num_int("loop_count", 1, cfg.numeric.loop_count);
  if (const std::string* v = get("numeric.loop_sizes")) {
    cfg.numeric.loop_sizes =
        parse_double_list(*v, line_of("numeric.loop_sizes"), "loop_sizes");
    for (double s : cfg.numeric.loop_sizes)
      if (s <= 0.0)
        fail(line_of("numeric.loop_sizes"), "loop sizes must be positive");
  }
  if (const std::string* v = get("numeric.t_grid")) {
    cfg.numeric.t_grid =
        parse_double_list(*v, line_of("numeric.t_grid"), "t_grid");
    for (double t : cfg.numeric.t_grid)
      if (t < 0.0 || t > 1.0)
        fail(line_of("numeric.t_grid"), "t_grid values must lie in [0, 1]");
  }

  // [output]
  if (const std::string* v = get("output.report")) cfg.output.report = *v;
  if (const std::string* v = get("output.csv")) cfg.output.csv = *v;

  // Echo of everything accepted, for the report.
  cfg.raw = raw.scalars;
  for (const IndexedValue& e : raw.g)
    cfg.raw["metric.g_" + std::to_string(e.i) + "_" + std::to_string(e.j)] =
        e.value;
  for (const IndexedValue& e : raw.alpha)
    cfg.raw["metric.alpha_" + std::to_string(e.i) + "_" +
            std::to_string(e.j)] = e.value;
  for (const IndexedValue& e : raw.beta)
    cfg.raw["metric.beta_" + std::to_string(e.i)] = e.value;
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace finsler
