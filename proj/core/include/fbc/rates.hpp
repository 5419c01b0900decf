#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fbc/fading.hpp"

namespace fbc {

/// psi(x) = log2(1 + x), the Gaussian capacity function in bits.
double psi(double x);

/// A fading law, its CSIT partition and the average power budget P.
struct Scenario {
  FadingDistribution dist;
  CsitPartition partition;
  double power = 0.0;

  static Scenario make(FadingDistribution dist, const CsitMap& csit, double power);
};

/// Superposition/Marton layering for the achievable schemes; every entry is
/// indexed by CSIT symbol. alpha is the power share of the second user's
/// satellite, beta that of the first user's satellite.
struct InnerPolicy {
  std::vector<double> phi;
  std::vector<double> alpha;
  std::vector<double> beta;

  friend bool operator==(const InnerPolicy&, const InnerPolicy&) = default;
};

/// Structural constraints on the outer-bound functions for i.i.d. states.
enum class OuterRestriction {
  free,
  per_gain_and_symbol,  // alpha depends on (g2, e), beta on (g1, e)
  monotone_no_csit,     // no CSIT; alpha non-increasing in g2, beta in g1
};

/// Outer-bound parameters: power per CSIT symbol, alpha/beta per state atom.
/// alpha and beta are not coupled.
struct OuterPolicy {
  std::vector<double> phi;
  std::vector<double> alpha;
  std::vector<double> beta;
  OuterRestriction restriction = OuterRestriction::free;

  friend bool operator==(const OuterPolicy&, const OuterPolicy&) = default;
};

struct RateConstraint {
  std::array<int, 3> coeff{};  // over (R0, R1, R2), entries in {0, 1}
  double rhs = 0.0;
};

/// {R >= 0 : coeff . R <= rhs for every constraint}.
struct RatePolytope {
  std::vector<RateConstraint> constraints;
};

/// Product region {R0 <= r0_cap, R1 <= r1_cap, R2 <= r2_cap}.
struct SecrecyBox {
  double r0_cap = 0.0;
  double r1_cap = 0.0;
  double r2_cap = 0.0;

  RatePolytope as_polytope() const;
};

void validate(const Scenario& s, const InnerPolicy& pol);
void validate(const Scenario& s, const OuterPolicy& pol);

// Per-state integrands. The constraint right-hand sides are their
// expectations; the coincidence theorems hold atom by atom on these.

/// {R0+R1, R0+R2, first sum-rate, second sum-rate} integrands of the inner bound.
std::array<double, 4> inner_terms(const GainAtom& a, double phi, double alpha, double beta);
/// Same four integrands for the outer bound, on the tie-inclusive split
/// g1 >= g2 / g1 < g2.
std::array<double, 4> outer_terms(const GainAtom& a, double phi, double alpha, double beta);

struct SecrecyTerms {
  double r0_user1 = 0.0;  // common-rate integrand decoded at receiver 1
  double r0_user2 = 0.0;
  double r1 = 0.0;  // confidential-rate integrand (before any positive part)
  double r2 = 0.0;
};

SecrecyTerms secrecy_inner_terms(const GainAtom& a, double phi, double alpha, double beta);
SecrecyTerms secrecy_outer_terms(const GainAtom& a, double phi, double alpha, double beta);

RatePolytope inner_polytope(const Scenario& s, const InnerPolicy& pol);
RatePolytope outer_polytope(const Scenario& s, const OuterPolicy& pol);
SecrecyBox secrecy_inner_box(const Scenario& s, const InnerPolicy& pol);
SecrecyBox secrecy_outer_box(const Scenario& s, const OuterPolicy& pol);

/// Outer rectangle without a common message: (R1 cap, R2 cap).
std::pair<double, double> secrecy_outer_nocommon(const Scenario& s, std::span<const double> phi);

/// E[psi(max(g1, g2) phi(E))]; requires CSIT that determines the ordering.
double sumrate_value(const Scenario& s, std::span<const double> phi);

/// Perfect-CSIT map from arbitrary outer functions (alpha*, beta*) per atom
/// to an inner policy: alpha = alpha* where g1 < g2, beta = beta* elsewhere.
InnerPolicy perfect_csit_policy_map(const Scenario& s, std::span<const double> alpha_star,
                                std::span<const double> beta_star, std::span<const double> phi);

/// The same map applied to an outer policy.
InnerPolicy inner_from_outer(const Scenario& s, const OuterPolicy& pol);

/// Split that sends the whole signal as the satellite of whichever user is
/// stronger: alpha = 1 on symbols where g1 < g2, beta = 1 on the others.
/// Requires CSIT that determines the ordering.
InnerPolicy degradedness_split(const Scenario& s, std::span<const double> phi);

/// Evaluates an inner policy's layering at each atom. The resulting outer
/// polytope contains the inner polytope and satisfies every restriction.
OuterPolicy lift_to_outer(const Scenario& s, const InnerPolicy& pol,
                          OuterRestriction restriction = OuterRestriction::free);

/// Re-indexes an inner policy through a CSIT refinement.
InnerPolicy lift_through_refinement(const InnerPolicy& coarse,
                                    std::span<const std::size_t> coarse_of_fine);

}  // namespace fbc
