#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbc/optimizer.hpp"

namespace fbc::cli {

inline constexpr int kSchemaVersion = 1;

struct DistributionSpec {
  std::vector<GainAtom> atoms;                 // inline form
  std::optional<RayleighIndependent> rayleigh;  // quantized family form
  QuantizationGrid grid;
  bool iid = false;

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

struct CsitSpec {
  CsitKind kind = CsitKind::none;
  std::vector<std::size_t> table;

  friend bool operator==(const CsitSpec&, const CsitSpec&) = default;
};

enum class BoundChoice { inner, outer, both };

struct OutputSpec {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "json"};
  double svg_r0 = 0.0;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  DistributionSpec distribution;
  CsitSpec csit;
  double power = 1.0;
  BoundChoice bound = BoundChoice::both;
  Restriction restriction = Restriction::free;
  OptimizerOptions optimizer;
  OutputSpec output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise
/// Error(ConfigError). Numbers may also be given as decimal strings.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

Scenario build_scenario(const RunConfig& cfg);

std::string to_string(BoundChoice b);
std::string to_string(Restriction r);
std::string to_string(Bound b);
BoundChoice parse_bound(const std::string& s);
Restriction parse_restriction(const std::string& s);

}  // namespace fbc::cli
