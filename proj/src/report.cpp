#include "finsler/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

JsonValue JsonValue::boolean(bool v) {
  JsonValue j;
  j.kind = Kind::boolean;
  j.b = v;
  return j;
}

JsonValue JsonValue::integer(int64_t v) {
  JsonValue j;
  j.kind = Kind::integer;
  j.i = v;
  return j;
}

JsonValue JsonValue::number(double v) {
  JsonValue j;
  j.kind = Kind::number;
  j.d = v;
  return j;
}

JsonValue JsonValue::string(std::string v) {
  JsonValue j;
  j.kind = Kind::string;
  j.s = std::move(v);
  return j;
}

JsonValue JsonValue::array() {
  JsonValue j;
  j.kind = Kind::array;
  return j;
}

JsonValue JsonValue::object() {
  JsonValue j;
  j.kind = Kind::object;
  return j;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
  members.emplace_back(key, std::move(v));
  return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
  items.push_back(std::move(v));
  return *this;
}

const JsonValue* JsonValue::find(const std::string& key) const {
  for (const auto& [k, v] : members)
    if (k == key) return &v;
  return nullptr;
}

namespace {

void escape_to(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += char(c);
        }
    }
  }
  out += '"';
}

void number_to(std::string& out, double d) {
  if (!std::isfinite(d)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  out += buf;
  // Keep an unambiguous float (stable type on re-parse).
  if (!std::strpbrk(buf, ".eE")) out += ".0";
}

void dump_to(std::string& out, const JsonValue& v, int indent, int depth) {
  std::string pad(size_t(indent) * depth, ' ');
  std::string pad_in(size_t(indent) * (depth + 1), ' ');
  switch (v.kind) {
    case JsonValue::Kind::null:
      out += "null";
      break;
    case JsonValue::Kind::boolean:
      out += v.b ? "true" : "false";
      break;
    case JsonValue::Kind::integer:
      out += std::to_string(v.i);
      break;
    case JsonValue::Kind::number:
      number_to(out, v.d);
      break;
    case JsonValue::Kind::string:
      escape_to(out, v.s);
      break;
    case JsonValue::Kind::array: {
      if (v.items.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (size_t k = 0; k < v.items.size(); ++k) {
        out += pad_in;
        dump_to(out, v.items[k], indent, depth + 1);
        if (k + 1 < v.items.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += ']';
      break;
    }
    case JsonValue::Kind::object: {
      if (v.members.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (size_t k = 0; k < v.members.size(); ++k) {
        out += pad_in;
        escape_to(out, v.members[k].first);
        out += ": ";
        dump_to(out, v.members[k].second, indent, depth + 1);
        if (k + 1 < v.members.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += '}';
      break;
    }
  }
}

}  // namespace

std::string JsonValue::dump(int indent) const {
  std::string out;
  dump_to(out, *this, indent, 0);
  out += '\n';
  return out;
}

JsonValue config_json(const Config& cfg) {
  JsonValue obj = JsonValue::object();
  for (const auto& [key, value] : cfg.raw)
    obj.set(key, JsonValue::string(value));
  return obj;
}

JsonValue verdicts_json(const std::map<std::string, VerdictEntry>& verdicts) {
  JsonValue obj = JsonValue::object();
  for (const auto& [name, entry] : verdicts) {
    JsonValue e = JsonValue::object();
    e.set("verdict", JsonValue::string(entry.verdict));
    e.set("residual", JsonValue::number(entry.residual));
    e.set("tolerance", JsonValue::number(entry.tolerance));
    e.set("samples", JsonValue::integer(entry.samples));
    obj.set(name, std::move(e));
  }
  return obj;
}

JsonValue residuals_json(const std::vector<ResidualEntry>& residuals) {
  JsonValue arr = JsonValue::array();
  for (const ResidualEntry& r : residuals) {
    JsonValue e = JsonValue::object();
    e.set("name", JsonValue::string(r.name));
    e.set("value", JsonValue::number(r.value));
    e.set("tolerance", JsonValue::number(r.tolerance));
    arr.push(std::move(e));
  }
  return arr;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (size_t k = 0; k < header.size(); ++k)
    out << header[k] << (k + 1 < header.size() ? "," : "");
  out << '\n';
  char buf[40];
  for (const auto& row : rows) {
    for (size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", row[k]);
      out << buf << (k + 1 < row.size() ? "," : "");
    }
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace finsler
