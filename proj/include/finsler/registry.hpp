#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "finsler/config.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// A metric family the CLI can build from a config file. Families registered
// at runtime show up in list-metrics and are constructed through the same
// path as the built-ins.
struct FamilyInfo {
  std::string name;
  std::string summary;                  // one line for list-metrics
  std::vector<std::string> keys;        // config keys the builder reads
  std::function<FinslerStructure(const MetricConfig&)> build;
};

class MetricRegistry {
 public:
  // Process-wide registry, seeded with euclidean, riemannian, randers,
  // and custom.
  static MetricRegistry& instance();

  // Throws ConfigError when a family of that name already exists.
  void register_family(FamilyInfo info);

  const FamilyInfo* find(const std::string& name) const;
  std::vector<FamilyInfo> families() const;  // sorted by name

  // Builds the structure for config.metric.family; ConfigError when unknown.
  FinslerStructure build(const MetricConfig& metric) const;

 private:
  MetricRegistry();
  std::map<std::string, FamilyInfo> families_;
};

}  // namespace finsler
