#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "finsler/classify.hpp"
#include "finsler/config.hpp"

namespace finsler {

// Minimal JSON tree with deterministic serialization: keys keep insertion
// order, doubles print with %.17g (round-trip exact), so a report is
// byte-identical across runs with the same seed. Non-finite numbers render
// as null.
struct JsonValue {
  enum class Kind { null, boolean, integer, number, string, array, object };

  Kind kind = Kind::null;
  bool b = false;
  int64_t i = 0;
  double d = 0.0;
  std::string s;
  std::vector<JsonValue> items;
  std::vector<std::pair<std::string, JsonValue>> members;

  static JsonValue null() { return JsonValue{}; }
  static JsonValue boolean(bool v);
  static JsonValue integer(int64_t v);
  static JsonValue number(double v);
  static JsonValue string(std::string v);
  static JsonValue array();
  static JsonValue object();

  JsonValue& set(const std::string& key, JsonValue v);  // appends, object only
  JsonValue& push(JsonValue v);                         // appends, array only
  const JsonValue* find(const std::string& key) const;

  std::string dump(int indent = 2) const;
};

// Report fragments shared by the CLI driver and tests.
JsonValue config_json(const Config& cfg);
JsonValue verdicts_json(const std::map<std::string, VerdictEntry>& verdicts);
JsonValue residuals_json(const std::vector<ResidualEntry>& residuals);

// Rows of doubles under a fixed header; plain RFC-4180-free CSV (no quoting
// needed for numeric tables).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace finsler
