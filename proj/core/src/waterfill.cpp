#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbc/optimizer.hpp"

namespace fbc {

namespace {

struct SymbolLaw {
  std::vector<double> gain;  // max(g1, g2) per atom of the symbol
  std::vector<double> cond;  // p(s | e)
  double mass = 0.0;
};

// Marginal sum-rate of symbol e per unit power, times ln 2.
double slope(const SymbolLaw& law, double phi) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < law.gain.size(); ++j) {
    acc.add(law.cond[j] * law.gain[j] / (1.0 + law.gain[j] * phi));
  }
  return acc.value();
}

// Solves slope(phi) = level on [0, 1/level]; zero when even phi = 0 is too flat.
double level_power(const SymbolLaw& law, double level, double tol) {
  if (slope(law, 0.0) <= level) return 0.0;
  double lo = 0.0;
  double hi = 1.0 / level;
  if (slope(law, hi) > level) throw Error(ErrorKind::NoConvergence, "water level bracket failed");
  for (int it = 0; it < 400 && hi - lo > tol * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(law, mid) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

WaterfillResult waterfill_sumrate(const Scenario& s, double tol) {
  if (!csit_refines_order(s.dist, s.partition)) {
    throw Error(ErrorKind::CsitDoesNotDetermineOrder,
                "sum-rate water-filling needs CSIT that reveals which user is stronger");
  }
  const std::size_t m = s.partition.symbol_count();
  WaterfillResult res;
  res.phi.assign(m, 0.0);
  if (s.power == 0.0) return res;

  std::vector<SymbolLaw> laws(m);
  double top = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    const auto& g = s.partition.group(e);
    laws[e].mass = g.mass;
    laws[e].cond = g.conditional;
    for (std::size_t i : g.atoms) laws[e].gain.push_back(std::max(s.dist[i].g1, s.dist[i].g2));
    top = std::max(top, slope(laws[e], 0.0));
  }
  if (top == 0.0) {
    // Every gain is zero: no allocation helps. Spend the budget uniformly.
    std::fill(res.phi.begin(), res.phi.end(), s.power);
    res.value = sumrate_value(s, res.phi);
    return res;
  }

  auto usage = [&](double level, std::vector<double>& phi) {
    CompensatedSum used;
    for (std::size_t e = 0; e < m; ++e) {
      phi[e] = level_power(laws[e], level, tol);
      used.add(laws[e].mass * phi[e]);
    }
    return used.value();
  };

  // The level is lambda * ln 2; usage is non-increasing in it.
  std::vector<double> phi(m);
  double hi = top;
  double lo = top / 2;
  int halvings = 0;
  while (usage(lo, phi) < s.power) {
    hi = lo;
    lo /= 2;
    if (++halvings > 2000) throw Error(ErrorKind::NoConvergence, "water level lower bracket failed");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double used = usage(mid, phi);
    (used > s.power ? lo : hi) = mid;
    if (hi - lo <= tol * hi) break;
  }
  const double level = 0.5 * (lo + hi);
  const double used = usage(level, phi);
  if (!(used > 0.0)) throw Error(ErrorKind::NoConvergence, "water-filling spent no power");
  for (double& v : phi) v *= s.power / used;

  double kkt = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    const double gap = slope(laws[e], phi[e]) - level;
    kkt = std::max(kkt, phi[e] > 0.0 ? std::abs(gap) : std::max(0.0, gap));
  }
  res.phi = std::move(phi);
  res.value = sumrate_value(s, res.phi);
  res.kkt_residual = kkt / std::numbers::ln2;
  return res;
}

}  // namespace fbc
