#include "finsler/registry.hpp"

#include "finsler/errors.hpp"

namespace finsler {

MetricRegistry& MetricRegistry::instance() {
  static MetricRegistry reg;
  return reg;
}

MetricRegistry::MetricRegistry() {
  families_["euclidean"] = {
      "euclidean",
      "flat metric sqrt(sum y_i^2)",
      {"dimension"},
      [](const MetricConfig& m) {
        return FinslerStructure::euclidean(m.dimension);
      }};
  families_["riemannian"] = {
      "riemannian",
      "sqrt(g_ij(x) y_i y_j) from symmetric entries g_<i>_<j>",
      {"dimension", "g_<i>_<j>"},
      [](const MetricConfig& m) {
        return FinslerStructure::riemannian(m.dimension, m.g);
      }};
  families_["randers"] = {
      "randers",
      "sqrt(a_ij(x) y_i y_j) + b_i(x) y_i from alpha_<i>_<j> and beta_<i>",
      {"dimension", "alpha_<i>_<j>", "beta_<i>"},
      [](const MetricConfig& m) {
        return FinslerStructure::randers(m.dimension, m.alpha, m.beta);
      }};
  families_["custom"] = {
      "custom",
      "norm from an explicit expression in x1..xn, y1..yn",
      {"dimension", "expression"},
      [](const MetricConfig& m) {
        return FinslerStructure::custom(m.expression, m.dimension);
      }};
}

void MetricRegistry::register_family(FamilyInfo info) {
  if (families_.count(info.name))
    throw ConfigError("metric family '" + info.name + "' already registered");
  families_[info.name] = std::move(info);
}

const FamilyInfo* MetricRegistry::find(const std::string& name) const {
  auto it = families_.find(name);
  return it == families_.end() ? nullptr : &it->second;
}

std::vector<FamilyInfo> MetricRegistry::families() const {
  std::vector<FamilyInfo> out;
  for (const auto& [name, info] : families_) out.push_back(info);
  return out;
}

FinslerStructure MetricRegistry::build(const MetricConfig& metric) const {
  const FamilyInfo* info = find(metric.family);
  if (!info)
    throw ConfigError("unknown metric family '" + metric.family + "'");
  return info->build(metric);
}

}  // namespace finsler
