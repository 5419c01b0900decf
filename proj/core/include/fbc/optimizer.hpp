#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fbc/geometry.hpp"
#include "fbc/rates.hpp"

namespace fbc {

struct OptimizerOptions {
  std::size_t directions = 64;
  std::size_t restarts = 16;
  std::size_t grid_seed_levels = 5;
  double step_tol = 1e-6;
  std::size_t max_iters = 2000;
  std::uint64_t rng_seed = 0x5eedULL;
  // > 1 runs directions concurrently; warm starts between neighbouring
  // directions are then disabled, so results depend on threads == 1 or not.
  std::size_t threads = 1;

  friend bool operator==(const OptimizerOptions&, const OptimizerOptions&) = default;
};

void validate(const OptimizerOptions& opts);

enum class Bound {
  inner,
  outer,
  secrecy_inner,
  secrecy_outer,
  secrecy_outer_nocommon,
};

enum class Restriction {
  free,
  thm4,                // alpha a function of (g2, E), beta of (g1, E); i.i.d. states
  thm4_monotone,       // additionally no CSIT and non-increasing in the gain
  degradedness_split,  // all power on the stronger user's satellite; power is the only variable
};

bool is_polytope_bound(Bound b) noexcept;
bool uses_outer_policy(Bound b) noexcept;

/// Throws RestrictionUnavailable (or CsitDoesNotDetermineOrder) when the pair
/// does not apply to the scenario.
void check_restriction(const Scenario& s, Bound bound, Restriction r);

using Policy = std::variant<InnerPolicy, OuterPolicy>;

/// Weighted-rate value of a single policy: the maximizing vertex of its region.
struct Evaluation {
  double value = 0.0;
  RatePoint vertex;
};

Evaluation evaluate(const Scenario& s, Bound bound, const Policy& pol, const Weight& w);

/// All extreme points of a single policy's region.
std::vector<RatePoint> policy_vertices(const Scenario& s, Bound bound, const Policy& pol);

struct SupportResult {
  Weight weight{};
  double value = 0.0;
  Policy policy;
  RatePoint vertex;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Scales phi down uniformly onto the budget E[phi(E)] <= P when it is exceeded.
std::vector<double> project_budget(std::span<const double> phi_raw, const CsitPartition& partition,
                                   double power);

struct WaterfillResult {
  std::vector<double> phi;
  double value = 0.0;
  double kkt_residual = 0.0;
};

/// Optimal power control for E[psi(max(g1, g2) phi(E))] under E[phi(E)] <= P.
WaterfillResult waterfill_sumrate(const Scenario& s, double tol = 1e-12);

/// Best weighted rate found over the policy space of `bound`. Seeds are
/// always refined and always compete with their own exact value.
SupportResult max_weighted(const Scenario& s, Bound bound, const Weight& w, Restriction restriction,
                           const OptimizerOptions& opts, std::span<const Policy> seeds = {});

struct TracedRegion {
  Bound bound = Bound::inner;
  Restriction restriction = Restriction::free;
  RateRegion region;                    // generators index into `policies`
  std::vector<SupportResult> supports;  // one per direction
  std::vector<Policy> policies;         // every policy whose region enters the hull
};

/// Per-direction warm seeds may be given with one list per direction.
TracedRegion trace_region(const Scenario& s, Bound bound, Restriction restriction,
                          const OptimizerOptions& opts,
                          std::span<const std::vector<Policy>> direction_seeds = {});

/// Rebuilds `t.region` from `t.policies`.
void rebuild_region(const Scenario& s, TracedRegion& t);

struct TracedBounds {
  TracedRegion inner;
  TracedRegion outer;
  std::optional<TracedRegion> outer_restricted;
};

/// Traces an achievable region together with its outer bound, cross-seeding
/// the searches so that the traced hulls are nested: every inner policy is
/// lifted into the outer searches, and with perfect CSIT every outer policy
/// is mapped back into the inner one. `secrecy` selects the secrecy pair; the
/// gain-structured restrictions apply only to the rate pair.
TracedBounds trace_bounds(const Scenario& s, bool secrecy, Restriction outer_restriction,
                          const OptimizerOptions& opts);

}  // namespace fbc
