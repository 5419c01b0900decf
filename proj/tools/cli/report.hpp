#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fbc/optimizer.hpp"

namespace fbc::cli {

nlohmann::json to_json(const Policy& p);
nlohmann::json to_json(const SupportResult& r);

/// A named traced region with its support table and provenance.
nlohmann::json region_json(const std::string& name, const TracedRegion& t);

/// A named region without search provenance (closed-form boxes).
nlohmann::json region_json(const std::string& name, const std::string& bound, const RateRegion& region);

RateRegion region_from_json(const nlohmann::json& j);

/// Writes `<dir>/region_<name>.{csv,svg}` for every region of the report and
/// `<dir>/report.json`, as selected by `formats`. Returns the written paths.
std::vector<std::string> emit_report(const nlohmann::json& report, const std::string& dir,
                                     const std::vector<std::string>& formats, double svg_r0);

}  // namespace fbc::cli
