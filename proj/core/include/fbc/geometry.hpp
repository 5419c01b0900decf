#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fbc/rates.hpp"

namespace fbc {

/// Geometry tolerances in bits.
inline constexpr double kGeomTol = 1e-9;
inline constexpr double kOptTol = 1e-6;

/// (R0, R1, R2) in bits per channel use.
struct RatePoint {
  double r0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;

  friend bool operator==(const RatePoint&, const RatePoint&) = default;
};

using Weight = std::array<double, 3>;

inline double dot(const Weight& w, const RatePoint& p) noexcept {
  return w[0] * p.r0 + w[1] * p.r1 + w[2] * p.r2;
}

/// Comprehensive convex region stored by its extreme points in lexicographic
/// order. `generators[i]` is an opaque provenance tag of vertices[i] (for
/// traced regions, the index of the direction whose policy produced it).
struct RateRegion {
  std::vector<RatePoint> vertices;
  std::vector<std::size_t> generators;
};

/// Extreme points of {R >= 0 : A R <= b}. Never empty: the origin is always
/// feasible because every rhs is nonnegative.
std::vector<RatePoint> polytope_vertices(const RatePolytope& poly);

/// Maximizer of w . R over {R >= 0 : R0+R1 <= a, R0+R2 <= b, R0+R1+R2 <= c}.
/// Closed-form shortcut for the superposition polytopes.
RatePoint staircase_argmax(double a, double b, double c, const Weight& w);

double support(const RateRegion& region, const Weight& w);
double support(std::span<const RatePoint> points, const Weight& w);

/// Adds, for each point with R0 > 0, the two full transfers of the common
/// rate into a private rate.
std::vector<RatePoint> transfer_closure(std::span<const RatePoint> points);

/// Extreme points of the convex hull of the points together with all their
/// projections onto coordinate planes. `tags`, when given, must be aligned
/// with `points`; projections inherit their parent's tag.
RateRegion hull(std::span<const RatePoint> points, std::span<const std::size_t> tags = {});

struct ContainmentReport {
  bool ok = true;
  double worst_gap = 0.0;  // max_w support(inner, w) - support(outer, w)
  Weight worst_dir{};
};

ContainmentReport contains(const RateRegion& outer, const RateRegion& inner,
                           std::span<const Weight> directions, double tol);

/// Deterministic Fibonacci spread of unit weights over the open nonnegative octant.
std::vector<Weight> octant_directions(std::size_t n);

/// Counter-clockwise (R1, R2) polygon of the region cut at fixed R0.
std::vector<std::array<double, 2>> slice_at_r0(const RateRegion& region, double r0);

/// One `r0,r1,r2` row per vertex with 9 decimals, canonical order.
void write_region_csv(const RateRegion& region, std::ostream& os);

/// Axis-labelled SVG of the (R1, R2) slice at fixed R0. The polyline points
/// are in bits; a group transform maps them onto the canvas.
void write_region_svg(const RateRegion& region, double r0, std::ostream& os);

}  // namespace fbc
