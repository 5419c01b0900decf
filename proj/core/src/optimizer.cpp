#include "fbc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "search_space.hpp"

namespace fbc {

bool is_polytope_bound(Bound b) noexcept { return b == Bound::inner || b == Bound::outer; }

bool uses_outer_policy(Bound b) noexcept {
  return b == Bound::outer || b == Bound::secrecy_outer || b == Bound::secrecy_outer_nocommon;
}

void validate(const OptimizerOptions& o) {
  if (o.directions == 0 || o.restarts == 0 || o.grid_seed_levels == 0 || o.max_iters == 0 ||
      o.threads == 0 || !(o.step_tol > 0.0)) {
    throw Error(ErrorKind::ConfigError, "optimizer options must all be positive");
  }
}

void check_restriction(const Scenario& s, Bound bound, Restriction r) {
  switch (r) {
    case Restriction::free:
      return;
    case Restriction::thm4:
    case Restriction::thm4_monotone:
      if (bound != Bound::outer) {
        throw Error(ErrorKind::RestrictionUnavailable, "gain-structured restrictions apply to the outer bound only");
      }
      if (!s.dist.iid()) {
        throw Error(ErrorKind::RestrictionUnavailable, "gain-structured restrictions need i.i.d. states");
      }
      if (r == Restriction::thm4_monotone && s.partition.symbol_count() != 1) {
        throw Error(ErrorKind::RestrictionUnavailable, "the monotone restriction needs no CSIT");
      }
      return;
    case Restriction::degradedness_split:
      if (bound != Bound::inner && bound != Bound::secrecy_inner) {
        throw Error(ErrorKind::RestrictionUnavailable, "the degradedness split is an inner-bound policy");
      }
      if (!csit_refines_order(s.dist, s.partition)) {
        throw Error(ErrorKind::CsitDoesNotDetermineOrder, "the degradedness split needs the ordering at the transmitter");
      }
      return;
  }
}

namespace {

OuterRestriction outer_restriction_of(Restriction r) {
  switch (r) {
    case Restriction::thm4: return OuterRestriction::per_gain_and_symbol;
    case Restriction::thm4_monotone: return OuterRestriction::monotone_no_csit;
    default: return OuterRestriction::free;
  }
}

void check_weight(const Weight& w) {
  bool any = false;
  for (double c : w) {
    if (!std::isfinite(c) || c < 0.0) throw Error(ErrorKind::BadWeight, "weights must be finite and nonnegative");
    any = any || c > 0.0;
  }
  if (!any) throw Error(ErrorKind::BadWeight, "weight vector is zero");
}

RatePolytope polytope_of(const Scenario& s, Bound bound, const Policy& pol) {
  return bound == Bound::inner ? inner_polytope(s, std::get<InnerPolicy>(pol))
                               : outer_polytope(s, std::get<OuterPolicy>(pol));
}

RatePoint box_corner(const Scenario& s, Bound bound, const Policy& pol) {
  switch (bound) {
    case Bound::secrecy_inner: {
      const auto b = secrecy_inner_box(s, std::get<InnerPolicy>(pol));
      return {b.r0_cap, b.r1_cap, b.r2_cap};
    }
    case Bound::secrecy_outer: {
      const auto b = secrecy_outer_box(s, std::get<OuterPolicy>(pol));
      return {b.r0_cap, b.r1_cap, b.r2_cap};
    }
    default: {
      const auto [r1, r2] = secrecy_outer_nocommon(s, std::get<OuterPolicy>(pol).phi);
      return {0.0, r1, r2};
    }
  }
}

struct Refined {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iters = 0;
  bool converged = false;
};

template <typename F>
Refined refine(const detail::SearchSpace& sp, F&& f, std::vector<double> x,
               const OptimizerOptions& o) {
  constexpr double h = 1e-7;
  constexpr double gain_eps = 1e-14;
  Refined r;
  double fx = f(x);
  const std::size_t d = x.size();
  if (d == 0) return {std::move(x), fx, 0, true};

  double t = 0.1;  // gradient step length
  double s = 0.1;  // pattern step length
  std::vector<double> g(d), y;
  while (r.iters < o.max_iters) {
    ++r.iters;
    double gn = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      sp.project(xp);
      sp.project(xm);
      const double span = xp[i] - xm[i];
      g[i] = span > 0.0 ? (f(xp) - f(xm)) / span : 0.0;
      gn += g[i] * g[i];
    }
    gn = std::sqrt(gn);

    bool moved = false;
    if (gn > 0.0) {
      for (double tt = t; tt >= o.step_tol && !moved; tt *= 0.5) {
        y = x;
        for (std::size_t i = 0; i < d; ++i) y[i] += tt * g[i] / gn;
        sp.project(y);
        const double fy = f(y);
        if (fy > fx + gain_eps) {
          x = y, fx = fy, moved = true;
          t = std::min(0.5, 2.0 * tt);
        }
      }
    }
    // Kinks of the max-of-vertices objective stall the gradient; fall back
    // to compass search.
    while (!moved && s >= o.step_tol) {
      for (std::size_t i = 0; i < d && !moved; ++i) {
        for (double sign : {1.0, -1.0}) {
          y = x;
          y[i] += sign * s;
          sp.project(y);
          if (y == x) continue;
          const double fy = f(y);
          if (fy > fx + gain_eps) {
            x = y, fx = fy, moved = true;
            break;
          }
        }
      }
      if (!moved) s *= 0.5;
    }
    if (!moved) {
      r.converged = true;
      break;
    }
  }
  r.x = std::move(x);
  r.f = fx;
  return r;
}

SupportResult optimize(const Scenario& s, Bound bound, Restriction restriction, const Weight& w,
                       const OptimizerOptions& o, std::span<const Policy> seeds,
                       std::uint64_t stream) {
  const detail::SearchSpace sp(s, bound, restriction);
  auto f = [&](const std::vector<double>& x) { return evaluate(s, bound, sp.decode(x), w).value; };

  SupportResult best;
  best.weight = w;
  best.value = -std::numeric_limits<double>::infinity();
  auto offer = [&](const Policy& pol, std::size_t iters, bool converged) {
    const Evaluation ev = evaluate(s, bound, pol, w);
    if (ev.value > best.value) {
      best.value = ev.value;
      best.vertex = ev.vertex;
      best.policy = pol;
      best.iterations = iters;
      best.converged = converged;
    }
  };

  std::vector<std::vector<double>> starts;
  for (const Policy& seed : seeds) {
    offer(seed, 0, true);
    starts.push_back(sp.encode(seed));
  }

  struct Scored {
    std::vector<double> x;
    double f;
  };
  std::vector<Scored> pool;
  for (auto& x : sp.grid_seeds(o.grid_seed_levels)) pool.push_back({x, f(x)});
  std::mt19937_64 rng(o.rng_seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < o.restarts; ++k) {
    std::vector<double> x(sp.dim());
    for (double& v : x) v = unit(rng);
    sp.project(x);
    const double fx = f(x);
    pool.push_back({std::move(x), fx});
  }
  std::stable_sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) { return a.f > b.f; });
  const std::size_t keep = std::min(pool.size(), std::max<std::size_t>(1, o.restarts));
  for (std::size_t k = 0; k < keep; ++k) starts.push_back(std::move(pool[k].x));

  for (auto& x : starts) {
    const Refined r = refine(sp, f, std::move(x), o);
    offer(sp.decode(r.x), r.iters, r.converged);
  }
  return best;
}

void dedup_push(std::vector<Policy>& out, const Policy& p) {
  if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
}

}  // namespace

Evaluation evaluate(const Scenario& s, Bound bound, const Policy& pol, const Weight& w) {
  if (std::holds_alternative<OuterPolicy>(pol) != uses_outer_policy(bound)) {
    throw Error(ErrorKind::PolicyInfeasible, "policy kind does not match the bound");
  }
  Evaluation ev;
  if (is_polytope_bound(bound)) {
    const auto poly = polytope_of(s, bound, pol);
    const auto& c = poly.constraints;
    ev.vertex = staircase_argmax(c[0].rhs, c[1].rhs, std::min(c[2].rhs, c[3].rhs), w);
  } else {
    ev.vertex = box_corner(s, bound, pol);
  }
  ev.value = dot(w, ev.vertex);
  return ev;
}

std::vector<RatePoint> policy_vertices(const Scenario& s, Bound bound, const Policy& pol) {
  if (is_polytope_bound(bound)) return polytope_vertices(polytope_of(s, bound, pol));
  // The comprehensive hull supplies the remaining box corners.
  return {box_corner(s, bound, pol)};
}

std::vector<double> project_budget(std::span<const double> phi_raw, const CsitPartition& partition,
                                   double power) {
  if (phi_raw.size() != partition.symbol_count()) {
    throw Error(ErrorKind::PolicyInfeasible, "phi must have one entry per CSIT symbol");
  }
  CompensatedSum used;
  for (std::size_t e = 0; e < phi_raw.size(); ++e) used.add(partition.mass(e) * phi_raw[e]);
  std::vector<double> phi(phi_raw.begin(), phi_raw.end());
  if (used.value() > power) {
    const double scale = power / used.value();
    for (double& v : phi) v *= scale;
  }
  return phi;
}

SupportResult max_weighted(const Scenario& s, Bound bound, const Weight& w, Restriction restriction,
                           const OptimizerOptions& opts, std::span<const Policy> seeds) {
  validate(opts);
  check_weight(w);
  check_restriction(s, bound, restriction);
  return optimize(s, bound, restriction, w, opts, seeds, 0);
}

void rebuild_region(const Scenario& s, TracedRegion& t) {
  std::vector<RatePoint> points;
  std::vector<std::size_t> tags;
  for (std::size_t j = 0; j < t.policies.size(); ++j) {
    auto verts = policy_vertices(s, t.bound, t.policies[j]);
    if (is_polytope_bound(t.bound)) verts = transfer_closure(verts);
    for (const auto& v : verts) {
      points.push_back(v);
      tags.push_back(j);
    }
  }
  t.region = hull(points, tags);
}

TracedRegion trace_region(const Scenario& s, Bound bound, Restriction restriction,
                          const OptimizerOptions& opts,
                          std::span<const std::vector<Policy>> direction_seeds) {
  validate(opts);
  check_restriction(s, bound, restriction);
  const auto dirs = octant_directions(opts.directions);
  if (!direction_seeds.empty() && direction_seeds.size() != dirs.size()) {
    throw Error(ErrorKind::ConfigError, "need one seed list per direction");
  }
  auto seeds_for = [&](std::size_t k) {
    return direction_seeds.empty() ? std::vector<Policy>{} : direction_seeds[k];
  };

  TracedRegion t;
  t.bound = bound;
  t.restriction = restriction;
  t.supports.resize(dirs.size());
  if (opts.threads <= 1) {
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      auto seeds = seeds_for(k);
      if (k > 0) seeds.push_back(t.supports[k - 1].policy);
      t.supports[k] = optimize(s, bound, restriction, dirs[k], opts, seeds, k);
    }
  } else {
    std::vector<std::thread> pool;
    for (std::size_t id = 0; id < opts.threads; ++id) {
      pool.emplace_back([&, id] {
        for (std::size_t k = id; k < dirs.size(); k += opts.threads) {
          t.supports[k] = optimize(s, bound, restriction, dirs[k], opts, seeds_for(k), k);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& r : t.supports) dedup_push(t.policies, r.policy);
  rebuild_region(s, t);
  return t;
}

TracedBounds trace_bounds(const Scenario& s, bool secrecy, Restriction outer_restriction,
                          const OptimizerOptions& opts) {
  const Bound inner_bound = secrecy ? Bound::secrecy_inner : Bound::inner;
  const Bound outer_bound = secrecy ? Bound::secrecy_outer : Bound::outer;
  if (outer_restriction == Restriction::degradedness_split) {
    throw Error(ErrorKind::RestrictionUnavailable, "the degradedness split is not an outer-bound restriction");
  }
  if (outer_restriction != Restriction::free) check_restriction(s, outer_bound, outer_restriction);

  TracedBounds out;
  out.inner = trace_region(s, inner_bound, Restriction::free, opts);
  const std::size_t n = out.inner.supports.size();
  auto lift = [&](const Policy& p, OuterRestriction r) -> Policy {
    return lift_to_outer(s, std::get<InnerPolicy>(p), r);
  };

  std::vector<std::vector<Policy>> free_seeds(n);
  for (std::size_t k = 0; k < n; ++k) {
    free_seeds[k].push_back(lift(out.inner.supports[k].policy, OuterRestriction::free));
  }

  const OuterRestriction rr = outer_restriction_of(outer_restriction);
  if (outer_restriction != Restriction::free) {
    std::vector<std::vector<Policy>> seeds(n);
    for (std::size_t k = 0; k < n; ++k) seeds[k].push_back(lift(out.inner.supports[k].policy, rr));
    TracedRegion r = trace_region(s, outer_bound, outer_restriction, opts, seeds);
    for (const auto& p : out.inner.policies) dedup_push(r.policies, lift(p, rr));
    for (std::size_t k = 0; k < n; ++k) free_seeds[k].push_back(r.supports[k].policy);
    out.outer_restricted = std::move(r);
  }

  out.outer = trace_region(s, outer_bound, Restriction::free, opts, free_seeds);
  for (const auto& p : out.inner.policies) dedup_push(out.outer.policies, lift(p, OuterRestriction::free));
  if (out.outer_restricted) {
    for (const auto& p : out.outer_restricted->policies) dedup_push(out.outer.policies, p);
  }

  if (s.partition.is_perfect()) {
    // Every outer policy has an inner policy with the same region; feed them back.
    std::vector<Policy> mapped;
    for (const auto& p : out.outer.policies) {
      mapped.emplace_back(inner_from_outer(s, std::get<OuterPolicy>(p)));
    }
    for (const auto& m : mapped) dedup_push(out.inner.policies, m);
    if (out.outer_restricted) {
      for (const auto& m : mapped) dedup_push(out.outer_restricted->policies, lift(m, rr));
    }
    for (std::size_t k = 0; k < n; ++k) {
      auto& sup = out.inner.supports[k];
      const Policy m = inner_from_outer(s, std::get<OuterPolicy>(out.outer.supports[k].policy));
      const Evaluation ev = evaluate(s, inner_bound, m, sup.weight);
      if (ev.value >= sup.value) {
        sup.value = ev.value;
        sup.vertex = ev.vertex;
        sup.policy = m;
      }
    }
  }

  rebuild_region(s, out.inner);
  if (out.outer_restricted) rebuild_region(s, *out.outer_restricted);
  rebuild_region(s, out.outer);
  return out;
}

}  // namespace fbc
