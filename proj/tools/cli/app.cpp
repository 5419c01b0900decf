#include "app.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "config.hpp"
#include "report.hpp"
#include "verify.hpp"

#ifndef FBC_VERSION
#define FBC_VERSION "0.0.0"
#endif

namespace fbc::cli {

namespace {

using nlohmann::json;

struct Overrides {
  std::string config;
  std::string bound;
  std::string restriction;
  std::size_t directions = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> formats;
};

// Configuration problems, including inputs the model rejects, exit with 2.
struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig resolve(const Overrides& o) {
  try {
    RunConfig cfg = load_config(o.config);
    if (!o.bound.empty()) cfg.bound = parse_bound(o.bound);
    if (!o.restriction.empty()) cfg.restriction = parse_restriction(o.restriction);
    if (o.directions > 0) cfg.optimizer.directions = o.directions;
    if (o.seed) cfg.optimizer.rng_seed = *o.seed;
    if (!o.out.empty()) cfg.output.dir = o.out;
    if (!o.formats.empty()) cfg.output.formats = o.formats;
    return cfg;
  } catch (const Error& e) {
    throw ConfigFailure(e.what());
  }
}

Scenario scenario_of(const RunConfig& cfg) {
  try {
    return build_scenario(cfg);
  } catch (const Error& e) {
    throw ConfigFailure(e.what());
  }
}

json base_report(const std::string& command, const RunConfig& cfg) {
  return {{"tool", "fbc"}, {"version", FBC_VERSION}, {"command", command}, {"config", to_json(cfg)},
          {"regions", json::array()}};
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void finish(const json& report, const RunConfig& cfg, double seconds, std::ostream& out) {
  for (const auto& path : emit_report(report, cfg.output.dir, cfg.output.formats, cfg.output.svg_r0)) {
    out << "wrote " << path << '\n';
  }
  // Wall-clock time lives beside the report so the report itself stays reproducible.
  const auto meta = std::filesystem::path(cfg.output.dir) / "run_meta.json";
  std::ofstream m(meta, std::ios::binary);
  if (!m) throw Error(ErrorKind::IoError, "cannot write '" + meta.string() + "'");
  m << json{{"tool", "fbc"}, {"version", FBC_VERSION}, {"wall_clock_seconds", seconds}}.dump(2) << '\n';
}

void summarize(const std::string& name, const RateRegion& r, std::ostream& out) {
  out << name << ": " << r.vertices.size() << " vertices, support(0,1,1) = "
      << fmt(support(r, {0, 1, 1})) << " bits\n";
}

json sumrate_json(const WaterfillResult& w) {
  return {{"value", w.value}, {"phi", w.phi}, {"kkt_residual", w.kkt_residual}};
}

int cmd_region(const RunConfig& cfg, const Scenario& s, json& report, std::ostream& out) {
  auto& regions = report["regions"];
  if (cfg.bound == BoundChoice::inner) {
    const auto t = trace_region(s, Bound::inner, Restriction::free, cfg.optimizer);
    regions.push_back(region_json("inner", t));
    summarize("inner", t.region, out);
    return kOk;
  }
  const auto b = trace_bounds(s, false, cfg.restriction, cfg.optimizer);
  if (cfg.bound == BoundChoice::both) {
    regions.push_back(region_json("inner", b.inner));
    summarize("inner", b.inner.region, out);
  }
  regions.push_back(region_json("outer", b.outer));
  summarize("outer", b.outer.region, out);
  if (b.outer_restricted) {
    regions.push_back(region_json("outer_restricted", *b.outer_restricted));
    summarize("outer_restricted", b.outer_restricted->region, out);
  }
  return kOk;
}

int cmd_secrecy(const RunConfig& cfg, const Scenario& s, json& report, std::ostream& out) {
  auto& regions = report["regions"];
  if (cfg.restriction != Restriction::free) {
    throw Error(ErrorKind::RestrictionUnavailable, "secrecy bounds take no gain-structured restriction");
  }
  if (cfg.bound == BoundChoice::inner) {
    const auto t = trace_region(s, Bound::secrecy_inner, Restriction::free, cfg.optimizer);
    regions.push_back(region_json("secrecy_inner", t));
    summarize("secrecy_inner", t.region, out);
    return kOk;
  }
  const auto b = trace_bounds(s, true, Restriction::free, cfg.optimizer);
  if (cfg.bound == BoundChoice::both) {
    regions.push_back(region_json("secrecy_inner", b.inner));
    summarize("secrecy_inner", b.inner.region, out);
  }
  regions.push_back(region_json("secrecy_outer", b.outer));
  summarize("secrecy_outer", b.outer.region, out);
  const auto nc = trace_region(s, Bound::secrecy_outer_nocommon, Restriction::free, cfg.optimizer);
  regions.push_back(region_json("secrecy_outer_nocommon", nc));
  summarize("secrecy_outer_nocommon", nc.region, out);
  return kOk;
}

int cmd_capacity(const RunConfig& cfg, const Scenario& s, json& report, std::ostream& out) {
  if (!csit_refines_order(s.dist, s.partition)) {
    throw Error(ErrorKind::CsitDoesNotDetermineOrder,
                "no closed capacity result applies: the CSIT does not reveal which user is stronger");
  }
  auto& regions = report["regions"];
  const auto wf = waterfill_sumrate(s);
  report["sumrate"] = sumrate_json(wf);
  out << "sum-rate capacity: " << fmt(wf.value) << " bits\n";

  if (s.partition.is_perfect()) {
    const auto b = trace_bounds(s, false, Restriction::free, cfg.optimizer);
    const auto dirs = octant_directions(cfg.optimizer.directions);
    double gap = 0.0;
    for (const auto& w : dirs) gap = std::max(gap, std::abs(support(b.inner.region, w) - support(b.outer.region, w)));
    regions.push_back(region_json("capacity", b.inner));
    regions.push_back(region_json("capacity_outer", b.outer));
    report["capacity_bound_gap"] = gap;
    summarize("capacity", b.inner.region, out);
    out << "inner/outer support gap: " << fmt(gap, 12) << " bits\n";

    const auto sec = trace_bounds(s, true, Restriction::free, cfg.optimizer);
    regions.push_back(region_json("secrecy_capacity", sec.inner));
    summarize("secrecy_capacity", sec.inner.region, out);
    return kOk;
  }
  // With the degradedness bit, the secrecy capacity region has no common
  // message and is achieved by the split policy over power allocations.
  const auto t = trace_region(s, Bound::secrecy_inner, Restriction::degradedness_split, cfg.optimizer);
  regions.push_back(region_json("secrecy_capacity", t));
  summarize("secrecy_capacity", t.region, out);
  return kOk;
}

int cmd_sumrate(const Scenario& s, json& report, std::ostream& out) {
  const auto wf = waterfill_sumrate(s);
  report["sumrate"] = sumrate_json(wf);
  out << fmt(wf.value) << " bits\n";
  out << "phi:";
  for (double p : wf.phi) out << ' ' << fmt(p);
  out << '\n';
  return kOk;
}

int cmd_verify(std::uint64_t seed, const std::string& dir, std::ostream& out) {
  const auto results = run_verify_suites(seed);
  bool ok = true;
  json j = json::array();
  for (const auto& r : results) {
    out << (r.ok ? "PASS  " : "FAIL  ") << r.name << "  worst=" << r.worst << "  tol=" << r.tol << "  ("
        << r.detail << ")\n";
    ok = ok && r.ok;
    j.push_back({{"suite", r.name}, {"ok", r.ok}, {"worst", r.worst}, {"tol", r.tol}, {"detail", r.detail}});
  }
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    std::ofstream f(std::filesystem::path(dir) / "verify.json", std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot write verify.json");
    f << json{{"seed", seed}, {"suites", j}}.dump(2) << '\n';
  }
  out << (ok ? "all suites passed\n" : "verification failed\n");
  return ok ? kOk : kVerifyFailed;
}

int cmd_emit(const std::string& path, const std::string& dir, std::vector<std::string> formats,
             double svg_r0, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw ConfigFailure("cannot open report '" + path + "'");
  json report;
  try {
    report = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigFailure(std::string("malformed report: ") + e.what());
  }
  if (formats.empty()) formats = {"csv", "json", "svg"};
  for (const auto& p : emit_report(report, dir, formats, svg_r0)) out << "wrote " << p << '\n';
  return kOk;
}

void add_common(CLI::App* sub, Overrides& o, bool with_bound) {
  sub->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  if (with_bound) {
    sub->add_option("--bound", o.bound, "inner, outer or both")
        ->check(CLI::IsMember({"inner", "outer", "both"}));
    sub->add_option("--restriction", o.restriction, "Outer-bound restriction")
        ->check(CLI::IsMember({"free", "thm4", "thm4-monotone"}));
    sub->add_option("--directions", o.directions, "Number of weight directions")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Optimizer RNG seed");
  }
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--format", o.formats, "Output formats")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity and secrecy regions of the two-user fading Gaussian broadcast channel"};
  app.name("fbc");
  app.set_version_flag("--version", FBC_VERSION);
  app.require_subcommand(1, 1);

  Overrides o;
  auto* region = app.add_subcommand("region", "Trace inner and/or outer bounds of the capacity region");
  auto* secrecy = app.add_subcommand("secrecy", "Trace the secrecy inner and outer bounds");
  auto* capacity = app.add_subcommand("capacity", "Closed capacity results where the CSIT allows them");
  auto* sumrate = app.add_subcommand("sumrate", "Sum-rate capacity by water-filling");
  for (auto* sub : {region, secrecy, capacity}) add_common(sub, o, true);
  add_common(sumrate, o, false);

  auto* verify = app.add_subcommand("verify", "Run the bundled identity and property suites");
  std::uint64_t verify_seed = kShippedSeed;
  std::string verify_out;
  verify->add_option("--seed", verify_seed, "Suite seed");
  verify->add_option("--out", verify_out, "Directory for verify.json");

  auto* emit = app.add_subcommand("emit", "Render CSV/JSON/SVG from a stored report.json");
  std::string emit_path;
  std::string emit_out = ".";
  std::vector<std::string> emit_formats;
  double emit_r0 = 0.0;
  emit->add_option("report", emit_path, "Path to report.json")->required();
  emit->add_option("--out", emit_out, "Output directory");
  emit->add_option("--format", emit_formats, "Output formats")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  emit->add_option("--svg-r0", emit_r0, "R0 value of the SVG slice");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kParseError;
  }

  try {
    if (verify->parsed()) return cmd_verify(verify_seed, verify_out, out);
    if (emit->parsed()) return cmd_emit(emit_path, emit_out, emit_formats, emit_r0, out);

    const RunConfig cfg = resolve(o);
    const Scenario s = scenario_of(cfg);
    const auto start = std::chrono::steady_clock::now();
    std::string name;
    json report;
    int code = kOk;
    if (region->parsed()) {
      report = base_report("region", cfg);
      code = cmd_region(cfg, s, report, out);
    } else if (secrecy->parsed()) {
      report = base_report("secrecy", cfg);
      code = cmd_secrecy(cfg, s, report, out);
    } else if (capacity->parsed()) {
      report = base_report("capacity", cfg);
      code = cmd_capacity(cfg, s, report, out);
    } else {
      report = base_report("sumrate", cfg);
      code = cmd_sumrate(s, report, out);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    finish(report, cfg, seconds, out);
    return code;
  } catch (const ConfigFailure& e) {
    err << "config error: " << e.what() << '\n';
    return kParseError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kComputeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputeError;
  }
}

}  // namespace fbc::cli
