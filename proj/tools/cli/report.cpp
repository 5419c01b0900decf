#include "report.hpp"

#include <filesystem>
#include <fstream>

#include "config.hpp"

namespace fbc::cli {

using nlohmann::json;

namespace {

json point(const RatePoint& p) { return json::array({p.r0, p.r1, p.r2}); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

json to_json(const Policy& p) {
  if (const auto* in = std::get_if<InnerPolicy>(&p)) {
    return {{"kind", "inner"}, {"phi", in->phi}, {"alpha", in->alpha}, {"beta", in->beta}};
  }
  const auto& out = std::get<OuterPolicy>(p);
  std::string r = "free";
  if (out.restriction == OuterRestriction::per_gain_and_symbol) r = "per_gain_and_symbol";
  if (out.restriction == OuterRestriction::monotone_no_csit) r = "monotone_no_csit";
  return {{"kind", "outer"}, {"phi", out.phi}, {"alpha", out.alpha}, {"beta", out.beta}, {"restriction", r}};
}

json to_json(const SupportResult& r) {
  return {{"weight", r.weight},         {"value", r.value},
          {"vertex", point(r.vertex)},  {"converged", r.converged},
          {"iterations", r.iterations}, {"policy", to_json(r.policy)}};
}

json region_json(const std::string& name, const TracedRegion& t) {
  json j = region_json(name, to_string(t.bound), t.region);
  j["restriction"] = to_string(t.restriction);
  j["supports"] = json::array();
  for (const auto& s : t.supports) j["supports"].push_back(to_json(s));
  j["policies"] = json::array();
  for (const auto& p : t.policies) j["policies"].push_back(to_json(p));
  return j;
}

json region_json(const std::string& name, const std::string& bound, const RateRegion& region) {
  json j{{"name", name}, {"bound", bound}, {"vertices", json::array()}, {"generators", region.generators}};
  for (const auto& v : region.vertices) j["vertices"].push_back(point(v));
  return j;
}

RateRegion region_from_json(const json& j) {
  RateRegion r;
  try {
    for (const auto& v : j.at("vertices")) {
      r.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()});
    }
    r.generators = j.at("generators").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed region in report: ") + e.what());
  }
  return r;
}

std::vector<std::string> emit_report(const json& report, const std::string& dir,
                                     const std::vector<std::string>& formats, double svg_r0) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create '" + dir + "': " + ec.message());
  auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };

  std::vector<std::string> written;
  for (const auto& rj : report.value("regions", json::array())) {
    const std::string name = rj.at("name").get<std::string>();
    const RateRegion region = region_from_json(rj);
    if (wants("csv")) {
      const auto path = fs::path(dir) / ("region_" + name + ".csv");
      auto out = open_out(path);
      write_region_csv(region, out);
      written.push_back(path.string());
    }
    if (wants("svg")) {
      const auto path = fs::path(dir) / ("region_" + name + ".svg");
      auto out = open_out(path);
      write_region_svg(region, svg_r0, out);
      written.push_back(path.string());
    }
  }
  if (wants("json")) {
    const auto path = fs::path(dir) / "report.json";
    auto out = open_out(path);
    out << report.dump(2) << '\n';
    written.push_back(path.string());
  }
  return written;
}

}  // namespace fbc::cli
