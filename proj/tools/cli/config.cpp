#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace fbc::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && end == s.data() + s.size()) return v;
  }
  fail(what + " must be a number");
}

std::uint64_t whole(const json& j, const std::string& what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && end == s.data() + s.size()) return v;
  }
  fail(what + " must be a nonnegative integer");
}

bool boolean(const json& j, const std::string& what) {
  if (!j.is_boolean()) fail(what + " must be true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& what) {
  if (!j.is_string()) fail(what + " must be a string");
  return j.get<std::string>();
}

DistributionSpec parse_distribution(const json& j) {
  only_keys(j, "distribution",
            {"atoms", "family", "mean_gain1", "mean_gain2", "levels_per_axis", "tail_mass", "iid"});
  DistributionSpec d;
  if (j.contains("iid")) d.iid = boolean(j["iid"], "distribution.iid");
  if (j.contains("atoms") == j.contains("family")) {
    fail("distribution needs exactly one of 'atoms' or 'family'");
  }
  if (j.contains("atoms")) {
    for (const char* k : {"mean_gain1", "mean_gain2", "levels_per_axis", "tail_mass"}) {
      if (j.contains(k)) fail(std::string("'") + k + "' only applies to a family");
    }
    if (!j["atoms"].is_array() || j["atoms"].empty()) fail("distribution.atoms must be a nonempty array");
    for (const auto& a : j["atoms"]) {
      if (!a.is_array() || a.size() != 3) fail("each atom is [g1, g2, p]");
      d.atoms.push_back({number(a[0], "g1"), number(a[1], "g2"), number(a[2], "p")});
    }
    return d;
  }
  if (text(j["family"], "distribution.family") != "rayleigh_independent") {
    fail("unsupported family; expected rayleigh_independent");
  }
  RayleighIndependent r;
  if (j.contains("mean_gain1")) r.mean_gain1 = number(j["mean_gain1"], "mean_gain1");
  if (j.contains("mean_gain2")) r.mean_gain2 = number(j["mean_gain2"], "mean_gain2");
  if (j.contains("levels_per_axis")) {
    d.grid.levels_per_axis = static_cast<int>(whole(j["levels_per_axis"], "levels_per_axis"));
  }
  if (j.contains("tail_mass")) d.grid.tail_mass = number(j["tail_mass"], "tail_mass");
  d.rayleigh = r;
  return d;
}

CsitSpec parse_csit(json j) {
  if (j.is_string()) j = json{{"kind", j}};
  only_keys(j, "csit", {"kind", "table"});
  CsitSpec c;
  const std::string kind = text(j.value("kind", json("none")), "csit.kind");
  if (kind == "perfect") {
    c.kind = CsitKind::perfect;
  } else if (kind == "none") {
    c.kind = CsitKind::none;
  } else if (kind == "degradedness_bit") {
    c.kind = CsitKind::degradedness_bit;
  } else if (kind == "table") {
    c.kind = CsitKind::table;
    if (!j.contains("table") || !j["table"].is_array()) fail("csit.table must be an array");
    for (const auto& v : j["table"]) c.table.push_back(whole(v, "csit.table entry"));
  } else {
    fail("unknown csit kind '" + kind + "'");
  }
  if (c.kind != CsitKind::table && j.contains("table")) fail("csit.table needs kind 'table'");
  return c;
}

OptimizerOptions parse_optimizer(const json& j) {
  only_keys(j, "optimizer",
            {"directions", "restarts", "grid_seed_levels", "step_tol", "max_iters", "rng_seed", "threads"});
  OptimizerOptions o;
  if (j.contains("directions")) o.directions = whole(j["directions"], "directions");
  if (j.contains("restarts")) o.restarts = whole(j["restarts"], "restarts");
  if (j.contains("grid_seed_levels")) o.grid_seed_levels = whole(j["grid_seed_levels"], "grid_seed_levels");
  if (j.contains("step_tol")) o.step_tol = number(j["step_tol"], "step_tol");
  if (j.contains("max_iters")) o.max_iters = whole(j["max_iters"], "max_iters");
  if (j.contains("rng_seed")) o.rng_seed = whole(j["rng_seed"], "rng_seed");
  if (j.contains("threads")) o.threads = whole(j["threads"], "threads");
  validate(o);
  return o;
}

OutputSpec parse_output(const json& j) {
  only_keys(j, "output", {"dir", "formats", "svg_r0"});
  OutputSpec o;
  if (j.contains("dir")) o.dir = text(j["dir"], "output.dir");
  if (j.contains("formats")) {
    if (!j["formats"].is_array()) fail("output.formats must be an array");
    o.formats.clear();
    for (const auto& f : j["formats"]) {
      const auto v = text(f, "output format");
      if (v != "csv" && v != "json" && v != "svg") fail("unknown output format '" + v + "'");
      o.formats.push_back(v);
    }
  }
  if (j.contains("svg_r0")) o.svg_r0 = number(j["svg_r0"], "output.svg_r0");
  return o;
}

}  // namespace

std::string to_string(BoundChoice b) {
  switch (b) {
    case BoundChoice::inner: return "inner";
    case BoundChoice::outer: return "outer";
    case BoundChoice::both: return "both";
  }
  return "both";
}

std::string to_string(Restriction r) {
  switch (r) {
    case Restriction::free: return "free";
    case Restriction::thm4: return "thm4";
    case Restriction::thm4_monotone: return "thm4-monotone";
    case Restriction::degradedness_split: return "degradedness-split";
  }
  return "free";
}

std::string to_string(Bound b) {
  switch (b) {
    case Bound::inner: return "inner";
    case Bound::outer: return "outer";
    case Bound::secrecy_inner: return "secrecy_inner";
    case Bound::secrecy_outer: return "secrecy_outer";
    case Bound::secrecy_outer_nocommon: return "secrecy_outer_nocommon";
  }
  return "inner";
}

BoundChoice parse_bound(const std::string& s) {
  if (s == "inner") return BoundChoice::inner;
  if (s == "outer") return BoundChoice::outer;
  if (s == "both") return BoundChoice::both;
  fail("bound must be inner, outer or both");
}

Restriction parse_restriction(const std::string& s) {
  if (s == "free") return Restriction::free;
  if (s == "thm4") return Restriction::thm4;
  if (s == "thm4-monotone") return Restriction::thm4_monotone;
  fail("restriction must be free, thm4 or thm4-monotone");
}

RunConfig parse_config(const json& j) {
  only_keys(j, "config",
            {"schema_version", "distribution", "csit", "power", "bound", "restriction", "optimizer", "output"});
  RunConfig c;
  if (!j.contains("schema_version")) fail("schema_version is required");
  c.schema_version = static_cast<int>(whole(j["schema_version"], "schema_version"));
  if (c.schema_version != kSchemaVersion) {
    fail("unsupported schema_version " + std::to_string(c.schema_version));
  }
  if (!j.contains("distribution")) fail("distribution is required");
  c.distribution = parse_distribution(j["distribution"]);
  if (j.contains("csit")) c.csit = parse_csit(j["csit"]);
  if (j.contains("power")) c.power = number(j["power"], "power");
  if (!(c.power >= 0.0) || !std::isfinite(c.power)) fail("power must be finite and nonnegative");
  if (j.contains("bound")) c.bound = parse_bound(text(j["bound"], "bound"));
  if (j.contains("restriction")) c.restriction = parse_restriction(text(j["restriction"], "restriction"));
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j["optimizer"]);
  if (j.contains("output")) c.output = parse_output(j["output"]);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json dist;
  if (c.distribution.rayleigh) {
    dist["family"] = "rayleigh_independent";
    dist["mean_gain1"] = c.distribution.rayleigh->mean_gain1;
    dist["mean_gain2"] = c.distribution.rayleigh->mean_gain2;
    dist["levels_per_axis"] = c.distribution.grid.levels_per_axis;
    dist["tail_mass"] = c.distribution.grid.tail_mass;
  } else {
    dist["atoms"] = json::array();
    for (const auto& a : c.distribution.atoms) dist["atoms"].push_back({a.g1, a.g2, a.p});
  }
  dist["iid"] = c.distribution.iid;

  json csit;
  switch (c.csit.kind) {
    case CsitKind::perfect: csit["kind"] = "perfect"; break;
    case CsitKind::none: csit["kind"] = "none"; break;
    case CsitKind::degradedness_bit: csit["kind"] = "degradedness_bit"; break;
    case CsitKind::table:
      csit["kind"] = "table";
      csit["table"] = c.csit.table;
      break;
  }
  const auto& o = c.optimizer;
  return json{
      {"schema_version", c.schema_version},
      {"distribution", dist},
      {"csit", csit},
      {"power", c.power},
      {"bound", to_string(c.bound)},
      {"restriction", to_string(c.restriction)},
      {"optimizer",
       {{"directions", o.directions},
        {"restarts", o.restarts},
        {"grid_seed_levels", o.grid_seed_levels},
        {"step_tol", o.step_tol},
        {"max_iters", o.max_iters},
        {"rng_seed", o.rng_seed},
        {"threads", o.threads}}},
      {"output", {{"dir", c.output.dir}, {"formats", c.output.formats}, {"svg_r0", c.output.svg_r0}}},
  };
}

Scenario build_scenario(const RunConfig& cfg) {
  const auto& d = cfg.distribution;
  FadingDistribution dist = d.rayleigh ? quantize_continuous(*d.rayleigh, d.grid, d.iid)
                                       : build_discrete(d.atoms, d.iid);
  CsitMap csit = CsitMap::none();
  switch (cfg.csit.kind) {
    case CsitKind::perfect: csit = CsitMap::perfect(); break;
    case CsitKind::none: break;
    case CsitKind::degradedness_bit: csit = CsitMap::degradedness_bit(); break;
    case CsitKind::table: csit = CsitMap::from_table(cfg.csit.table); break;
  }
  return Scenario::make(std::move(dist), csit, cfg.power);
}

}  // namespace fbc::cli
