// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <functional>
#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "cli/app.hpp"
#include "fbc/oracle.hpp"
#include "fbc/optimizer.hpp"
#include "test_support.hpp"

using namespace fbc;
namespace fs = std::filesystem;

namespace {

using Rng = std::mt19937_64;

struct Outcome {
  bool ok = true;
  std::string detail;
};

double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

OptimizerOptions small_opts(std::size_t directions, std::uint64_t seed) {
  OptimizerOptions o;
  o.directions = directions;
  o.restarts = 4;
  o.grid_seed_levels = 3;
  o.max_iters = 300;
  o.rng_seed = seed;
  return o;
}

double max_support_gap(const RateRegion& a, const RateRegion& b, std::size_t n) {
  double gap = 0.0;
  for (const auto& w : octant_directions(n)) gap = std::max(gap, std::abs(support(a, w) - support(b, w)));
  return gap;
}

// A random perfect-CSIT instance with arbitrary outer functions, some on ties.
struct Draw {
  Scenario s;
  std::vector<double> phi, alpha, beta;
};

Draw perfect_draw(Rng& rng) {
  auto d = testing::random_dist(rng, 1 + static_cast<int>(rng() % 16));
  std::vector<GainAtom> atoms;
  for (std::size_t i = 0; i < d.size(); ++i) atoms.push_back(d[i]);
  for (auto& a : atoms) {
    if (rng() % 6 == 0) a.g2 = a.g1;
  }
  d = build_discrete(atoms);
  Draw out{Scenario{}, {}, {}, {}};
  double used = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.phi.push_back(3 * unit(rng));
    out.alpha.push_back(unit(rng));
    out.beta.push_back(unit(rng));
    used += d[i].p * out.phi.back();
  }
  out.s = Scenario::make(d, CsitMap::perfect(), used * (1 + 1e-12) + 1e-12);
  return out;
}

Outcome oracle_equivalence() {
  Rng rng(101);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    GainAtom a{6 * unit(rng), 6 * unit(rng), 1.0};
    if (t % 10 == 0) a.g2 = a.g1;
    const std::vector<GainAtom> atoms{a};
    const auto s = Scenario::make(build_discrete(atoms), CsitMap::none(), 5.0);
    const double alpha = unit(rng);
    const InnerPolicy pol{{5 * unit(rng)}, {alpha}, {(1 - alpha) * unit(rng)}};
    worst = std::max(worst, verify_closed_forms(s, pol, 1e-9).max_abs_err);
  }
  return {worst <= 1e-9, "1000 draws, worst |closed form - log-det| = " + sci(worst)};
}

Outcome capacity_coincidence() {
  Rng rng(202);
  double atom_worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto d = perfect_draw(rng);
    const auto in = perfect_csit_policy_map(d.s, d.alpha, d.beta, d.phi);
    for (std::size_t i = 0; i < d.s.dist.size(); ++i) {
      const auto a = inner_terms(d.s.dist[i], d.phi[i], in.alpha[i], in.beta[i]);
      const auto b = outer_terms(d.s.dist[i], d.phi[i], d.alpha[i], d.beta[i]);
      for (int k = 0; k < 4; ++k) atom_worst = std::max(atom_worst, std::abs(a[k] - b[k]));
    }
  }
  double hull_worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto d = testing::random_dist(rng, 2 + t % 3);
    const auto s = Scenario::make(d, CsitMap::perfect(), 0.5 + 2 * unit(rng));
    const auto b = trace_bounds(s, false, Restriction::free, small_opts(64, rng()));
    hull_worst = std::max(hull_worst, max_support_gap(b.inner.region, b.outer.region, 64));
  }
  return {atom_worst <= 1e-12 && hull_worst <= 1e-6,
          "per-atom worst " + sci(atom_worst) + ", traced hull support gap " + sci(hull_worst)};
}

Outcome secrecy_coincidence() {
  Rng rng(303);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto d = perfect_draw(rng);
    const auto in = perfect_csit_policy_map(d.s, d.alpha, d.beta, d.phi);
    for (std::size_t i = 0; i < d.s.dist.size(); ++i) {
      const auto a = secrecy_inner_terms(d.s.dist[i], d.phi[i], in.alpha[i], in.beta[i]);
      const auto b = secrecy_outer_terms(d.s.dist[i], d.phi[i], d.alpha[i], d.beta[i]);
      worst = std::max({worst, std::abs(a.r0_user1 - b.r0_user1), std::abs(a.r0_user2 - b.r0_user2),
                        std::abs(a.r1 - b.r1), std::abs(a.r2 - b.r2)});
    }
    const auto bi = secrecy_inner_box(d.s, in);
    const auto bo = secrecy_outer_box(d.s, OuterPolicy{d.phi, d.alpha, d.beta});
    worst = std::max({worst, std::abs(bi.r0_cap - bo.r0_cap), std::abs(bi.r1_cap - bo.r1_cap),
                      std::abs(bi.r2_cap - bo.r2_cap)});
  }
  double hull_worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto d = testing::random_dist(rng, 2 + t % 3);
    const auto s = Scenario::make(d, CsitMap::perfect(), 0.5 + 2 * unit(rng));
    const auto b = trace_bounds(s, true, Restriction::free, small_opts(64, rng()));
    hull_worst = std::max(hull_worst, max_support_gap(b.inner.region, b.outer.region, 64));
  }
  return {worst <= 1e-12 && hull_worst <= 1e-6,
          "per-atom/box worst " + sci(worst) + ", traced hull support gap " + sci(hull_worst)};
}

Outcome sumrate_waterfill() {
  Rng rng(404);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto d = testing::random_dist(rng, 1 + t % 4);
    CsitMap csit = CsitMap::perfect();
    if (t % 3 == 1) csit = CsitMap::degradedness_bit();
    const auto s = Scenario::make(d, csit, 0.2 + 4 * unit(rng));
    worst = std::max(worst, std::abs(waterfill_sumrate(s).value - testing::sumrate_grid(s, 1000)));
  }
  const std::vector<GainAtom> two{{3, 0, 0.5}, {1, 0, 0.5}};
  const auto res = waterfill_sumrate(Scenario::make(build_discrete(two), CsitMap::perfect(), 1.0));
  // Atoms are stored in canonical order, so symbol 0 is the weaker state.
  // Two-level KKT: phi1 - phi0 = 1/1 - 1/3 and phi0 + phi1 = 2.
  const double closed = 0.5 * std::log2(1 + 3 * (4.0 / 3)) + 0.5 * std::log2(1 + 1 * (2.0 / 3));
  const double err = std::max({std::abs(res.value - closed), std::abs(res.phi[1] - 4.0 / 3),
                               std::abs(res.phi[0] - 2.0 / 3)});
  return {worst <= 1e-3 && err <= 1e-6, "grid gap " + sci(worst) + " over 20 instances, two-symbol value " +
                                            std::to_string(res.value) + " vs closed form " +
                                            std::to_string(closed) + ", error " + sci(err)};
}

Outcome containment() {
  Rng rng(505);
  const auto dirs = octant_directions(64);
  double inner_gap = -1.0, restricted_gap = -1.0, secrecy_gap = -1.0;
  int restricted = 0;
  for (int t = 0; t < 50; ++t) {
    const bool iid = t % 2 == 0;
    const auto d = testing::random_dist(rng, 2 + t % 3, iid);
    CsitMap csit = CsitMap::none();
    switch (t % 4) {
      case 0: csit = CsitMap::perfect(); break;
      case 1: csit = CsitMap::none(); break;
      case 2: csit = CsitMap::degradedness_bit(); break;
      default: csit = testing::random_table(rng, d.size(), 2);
    }
    const auto s = Scenario::make(d, csit, 0.3 + 3 * unit(rng));
    auto opts = small_opts(12, rng());
    opts.restarts = 2;
    opts.max_iters = 100;
    const auto b = trace_bounds(s, false, iid ? Restriction::thm4 : Restriction::free, opts);
    inner_gap = std::max(inner_gap, contains(b.outer.region, b.inner.region, dirs, 1e-9).worst_gap);
    if (b.outer_restricted) {
      ++restricted;
      restricted_gap =
          std::max(restricted_gap, contains(b.outer.region, b.outer_restricted->region, dirs, 1e-9).worst_gap);
      inner_gap = std::max(inner_gap, contains(b.outer_restricted->region, b.inner.region, dirs, 1e-9).worst_gap);
    }
    const auto sec = trace_bounds(s, true, Restriction::free, opts);
    secrecy_gap = std::max(secrecy_gap, contains(sec.outer.region, sec.inner.region, dirs, 1e-9).worst_gap);
  }
  return {inner_gap <= 1e-9 && restricted_gap <= 1e-9 && secrecy_gap <= 1e-9 && restricted == 25,
          "worst excess: inner " + sci(inner_gap) + ", restricted " + sci(restricted_gap) + " (" +
              std::to_string(restricted) + " i.i.d. instances), secrecy " + sci(secrecy_gap)};
}

Outcome beta_monotonicity() {
  Rng rng(606);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double g1 = 0.01 + 8 * unit(rng);
    const GainAtom a{g1, g1 * unit(rng), 1.0};
    const double phi = 6 * unit(rng);
    double prev = outer_terms(a, phi, 0.0, 0.0)[2];
    for (int k = 1; k < 1000; ++k) {
      const double v = outer_terms(a, phi, 0.0, k / 999.0)[2];
      worst = std::max(worst, prev - v);
      prev = v;
    }
  }
  return {worst <= 1e-12, "1000 draws x 1000 beta points, largest decrease " + sci(worst)};
}

Outcome degradedness_secrecy() {
  Rng rng(707);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto d = testing::random_dist(rng, 1 + static_cast<int>(rng() % 8));
    CsitMap csit = CsitMap::degradedness_bit();
    if (t % 2) {
      // Any refinement of the bit keeps the ordering known.
      std::vector<std::size_t> table(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) table[i] = (second_dominant(d[i]) ? 1 : 0) + 2 * (i % 2);
      std::vector<std::size_t> labels = table;
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
      for (auto& v : table) v = std::lower_bound(labels.begin(), labels.end(), v) - labels.begin();
      csit = CsitMap::from_table(table);
    }
    auto s = Scenario::make(d, csit, 1.0);
    std::vector<double> phi(s.partition.symbol_count());
    double used = 0.0;
    for (std::size_t e = 0; e < phi.size(); ++e) used += s.partition.mass(e) * (phi[e] = 3 * unit(rng));
    s.power = used * (1 + 1e-12) + 1e-12;
    const auto box = secrecy_inner_box(s, degradedness_split(s, phi));
    const auto [r1, r2] = secrecy_outer_nocommon(s, phi);
    worst = std::max({worst, std::abs(box.r1_cap - r1), std::abs(box.r2_cap - r2)});
  }
  const std::vector<GainAtom> sym{{3, 1, 0.5}, {1, 3, 0.5}};
  const auto s = Scenario::make(build_discrete(sym), CsitMap::degradedness_bit(), 1.0);
  const std::vector<double> phi{1.0, 1.0};
  const auto box = secrecy_inner_box(s, degradedness_split(s, phi));
  const std::vector<RatePoint> corner{{0.0, box.r1_cap, box.r2_cap}};
  const auto rect = hull(corner);
  const double ex = std::max({std::abs(box.r1_cap - 0.5), std::abs(box.r2_cap - 0.5),
                              std::abs(support(rect, {0, 1, 1}) - 1.0)});
  return {worst <= 1e-12 && ex <= 1e-9,
          "split vs rectangle worst " + sci(worst) + ", symmetric example error " + sci(ex)};
}

Outcome degenerate_cases() {
  Rng rng(808);
  std::string detail;
  bool ok = true;

  // Zero power: every bound collapses to the origin.
  double zero = 0.0;
  for (int t = 0; t < 4; ++t) {
    const auto d = testing::random_dist(rng, 3, true);
    const auto s = Scenario::make(d, t % 2 ? CsitMap::perfect() : CsitMap::none(), 0.0);
    const auto opts = small_opts(6, rng());
    for (auto bound : {Bound::inner, Bound::outer, Bound::secrecy_inner, Bound::secrecy_outer,
                       Bound::secrecy_outer_nocommon}) {
      for (const auto& v : trace_region(s, bound, Restriction::free, opts).region.vertices) {
        zero = std::max({zero, std::abs(v.r0), std::abs(v.r1), std::abs(v.r2)});
      }
    }
  }
  ok = ok && zero == 0.0;
  detail += "P=0 largest coordinate " + sci(zero);

  // One state: the classical degraded superposition boundary.
  double classical = 0.0;
  for (const GainAtom a : {GainAtom{3.0, 1.0, 1.0}, GainAtom{0.5, 2.5, 1.0}, GainAtom{1.7, 1.7, 1.0}}) {
    const std::vector<GainAtom> atoms{a};
    const double power = 1.5;
    const auto s = Scenario::make(build_discrete(atoms), CsitMap::none(), power);
    auto opts = small_opts(64, 11);
    opts.restarts = 8;
    opts.step_tol = 1e-10;
    opts.max_iters = 4000;
    const auto t = trace_region(s, Bound::inner, Restriction::free, opts);
    for (const auto& w : octant_directions(64)) {
      // Relabel so the first receiver is the stronger one.
      const bool flip = a.g1 < a.g2;
      const Weight wf = flip ? Weight{w[0], w[2], w[1]} : w;
      const double ref = testing::superposition_support(std::max(a.g1, a.g2), std::min(a.g1, a.g2), power, wf);
      classical = std::max(classical, std::abs(support(t.region, w) - ref));
    }
  }
  ok = ok && classical <= 1e-6;
  detail += ", single-state boundary gap " + sci(classical);

  // Uniformly degraded: the weaker user's secrecy cap is exactly zero.
  double r2 = 0.0;
  for (int t = 0; t < 200; ++t) {
    auto d = testing::random_dist(rng, 1 + static_cast<int>(rng() % 6));
    std::vector<GainAtom> atoms;
    for (std::size_t i = 0; i < d.size(); ++i) {
      atoms.push_back({std::max(d[i].g1, d[i].g2), std::min(d[i].g1, d[i].g2), d[i].p});
    }
    const auto s = Scenario::make(build_discrete(atoms), t % 2 ? CsitMap::perfect() : CsitMap::none(), 2.0);
    const std::size_t m = s.partition.symbol_count(), n = s.dist.size();
    InnerPolicy in{std::vector<double>(m, 2.0), {}, {}};
    for (std::size_t e = 0; e < m; ++e) {
      const double a = unit(rng);
      in.alpha.push_back(a);
      in.beta.push_back((1 - a) * unit(rng));
    }
    OuterPolicy out{std::vector<double>(m, 2.0), {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      out.alpha.push_back(unit(rng));
      out.beta.push_back(unit(rng));
    }
    r2 = std::max({r2, std::abs(secrecy_inner_box(s, in).r2_cap), std::abs(secrecy_outer_box(s, out).r2_cap),
                   std::abs(secrecy_outer_nocommon(s, in.phi).second)});
    if (t < 4) {
      const auto tr = trace_region(s, Bound::secrecy_inner, Restriction::free, small_opts(6, rng()));
      for (const auto& v : tr.region.vertices) r2 = std::max(r2, std::abs(v.r2));
    }
  }
  ok = ok && r2 == 0.0;
  detail += ", degraded r2 cap " + sci(r2);
  return {ok, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(std::vector<std::string> args, std::ostream& out) {
  args.insert(args.begin(), "fbc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "fbc_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"schema_version": 1,
    "distribution": {"atoms": [[2.0, 0.5, 0.3], [0.7, 1.9, 0.3], [1.2, 1.1, 0.4]], "iid": true},
    "csit": "none", "power": 1.5, "bound": "both",
    "optimizer": {"directions": 8, "restarts": 3, "grid_seed_levels": 3, "max_iters": 150}})";

  bool same = true;
  int runs_ok = 0;
  for (const std::string cmd : {"region", "secrecy"}) {
    std::map<std::string, std::string> files[2];
    for (int k = 0; k < 2; ++k) {
      const auto out = dir / (cmd + std::to_string(k));
      std::ostringstream sink;
      const std::string restriction = cmd == "region" ? "thm4" : "free";
      if (invoke({cmd, "--config", cfg.string(), "--restriction", restriction, "--out", out.string(), "--format",
                  "csv,json,svg"},
                 sink) == 0) {
        ++runs_ok;
      }
      for (const auto& e : fs::directory_iterator(out)) {
        auto text = slurp(e.path());
        // The output directory is part of the echoed config.
        for (std::size_t p; (p = text.find(out.string())) != std::string::npos;) text.replace(p, out.string().size(), "OUT");
        if (e.path().filename() != "run_meta.json") files[k][e.path().filename().string()] = text;
      }
    }
    same = same && !files[0].empty() && files[0] == files[1];
  }
  std::ostringstream verify_out;
  const int verify_code = invoke({"verify"}, verify_out);
  return {same && runs_ok == 4 && verify_code == 0,
          std::string(same ? "reruns byte-identical" : "reruns differ") + ", verify exit " +
              std::to_string(verify_code)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 oracle equivalence", oracle_equivalence},
      {"2 perfect-CSIT capacity coincidence", capacity_coincidence},
      {"3 perfect-CSIT secrecy coincidence", secrecy_coincidence},
      {"4 water-filling sum rate", sumrate_waterfill},
      {"5 containment", containment},
      {"6 sum-rate monotone in beta", beta_monotonicity},
      {"7 degradedness-bit secrecy region", degradedness_secrecy},
      {"8 degenerate and classical cases", degenerate_cases},
      {"9 determinism and verify", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %s: %s [%.1fs]\n", r.ok ? "PASS" : "FAIL", name.c_str(), r.detail.c_str(), secs);
    std::fflush(stdout);
    failed += r.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
