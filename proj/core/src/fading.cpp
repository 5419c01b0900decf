#include "fbc/fading.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace fbc {

FadingDistribution build_discrete(std::span<const GainAtom> atoms, bool iid) {
  std::map<std::pair<double, double>, CompensatedSum> merged;
  CompensatedSum total;
  for (const GainAtom& a : atoms) {
    if (!(a.g1 >= 0.0) || !(a.g2 >= 0.0) || !std::isfinite(a.g1) || !std::isfinite(a.g2)) {
      throw Error(ErrorKind::NegativeGain, "gains must be finite and nonnegative");
    }
    if (!(a.p > 0.0) || !std::isfinite(a.p)) {
      throw Error(ErrorKind::NonPositiveMass, "atom mass must be positive");
    }
    merged[{a.g1, a.g2}].add(a.p);
    total.add(a.p);
  }
  const double s = total.value();
  if (atoms.empty() || s < 1.0 - 1e-9 || s > 1.0 + 1e-9) {
    throw Error(ErrorKind::MassSumOutOfTolerance,
                "atom masses sum to " + std::to_string(s) + ", expected 1 within 1e-9");
  }

  FadingDistribution dist;
  dist.iid_ = iid;
  dist.atoms_.reserve(merged.size());
  for (const auto& [gains, mass] : merged) {
    dist.atoms_.push_back({gains.first, gains.second, mass.value() / s});
  }
  return dist;
}

namespace {

// Representative gains of equiprobable cells of a truncated exponential law.
std::vector<double> exponential_cells(double mean, int levels, double tail_mass) {
  const double kept = 1.0 - tail_mass;
  std::vector<double> reps;
  reps.reserve(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    // survival function values at the cell edges
    const double s_lo = 1.0 - kept * k / levels;
    const double s_hi = 1.0 - kept * (k + 1) / levels;
    const double a = -mean * std::log(s_lo);
    const double b = -mean * std::log(s_hi);
    reps.push_back((s_lo * (a + mean) - s_hi * (b + mean)) / (s_lo - s_hi));
  }
  return reps;
}

}  // namespace

FadingDistribution quantize_continuous(const RayleighIndependent& family,
                                       const QuantizationGrid& grid, bool iid) {
  if (!(family.mean_gain1 > 0.0) || !(family.mean_gain2 > 0.0)) {
    throw Error(ErrorKind::BadGridSpec, "mean gains must be positive");
  }
  if (grid.levels_per_axis < 2) {
    throw Error(ErrorKind::BadGridSpec, "levels_per_axis must be at least 2");
  }
  if (!(grid.tail_mass > 0.0) || !(grid.tail_mass < 0.1)) {
    throw Error(ErrorKind::BadGridSpec, "tail_mass must lie in (0, 0.1)");
  }
  const auto c1 = exponential_cells(family.mean_gain1, grid.levels_per_axis, grid.tail_mass);
  const auto c2 = exponential_cells(family.mean_gain2, grid.levels_per_axis, grid.tail_mass);
  const double cell = 1.0 / grid.levels_per_axis;

  std::vector<GainAtom> atoms;
  atoms.reserve(c1.size() * c2.size());
  for (double g1 : c1) {
    for (double g2 : c2) {
      atoms.push_back({g1, g2, cell * cell});
    }
  }
  return build_discrete(atoms, iid);
}

CsitPartition partition_by_csit(const FadingDistribution& dist, const CsitMap& csit) {
  const std::size_t n = dist.size();
  std::vector<std::size_t> raw(n, 0);
  switch (csit.kind()) {
    case CsitKind::perfect:
      for (std::size_t i = 0; i < n; ++i) raw[i] = i;
      break;
    case CsitKind::none:
      break;
    case CsitKind::degradedness_bit:
      for (std::size_t i = 0; i < n; ++i) raw[i] = second_dominant(dist[i]) ? 1 : 0;
      break;
    case CsitKind::table: {
      const auto& table = csit.table();
      if (table.size() != n) {
        throw Error(ErrorKind::IncompleteTable, "CSIT table has " + std::to_string(table.size()) +
                                                    " entries for " + std::to_string(n) + " atoms");
      }
      const std::size_t count = *std::max_element(table.begin(), table.end()) + 1;
      std::vector<bool> hit(count, false);
      for (std::size_t s : table) hit[s] = true;
      if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
        throw Error(ErrorKind::IncompleteTable, "CSIT table leaves a symbol id unused");
      }
      raw = table;
      break;
    }
  }

  // Built-in maps may leave labels unused (e.g. a degradedness bit on a
  // uniformly degraded law); relabel densely in increasing label order.
  std::vector<std::size_t> labels = raw;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  CsitPartition part;
  part.kind_ = csit.kind();
  part.symbol_of_.resize(n);
  part.groups_.resize(labels.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = static_cast<std::size_t>(
        std::lower_bound(labels.begin(), labels.end(), raw[i]) - labels.begin());
    part.symbol_of_[i] = e;
    part.groups_[e].atoms.push_back(i);
  }
  for (auto& g : part.groups_) {
    CompensatedSum m;
    for (std::size_t i : g.atoms) m.add(dist[i].p);
    g.mass = m.value();
    g.conditional.reserve(g.atoms.size());
    for (std::size_t i : g.atoms) g.conditional.push_back(dist[i].p / g.mass);
  }
  return part;
}

bool csit_refines_order(const FadingDistribution& dist, const CsitPartition& partition) {
  for (const auto& g : partition.groups()) {
    const bool first = second_dominant(dist[g.atoms.front()]);
    for (std::size_t i : g.atoms) {
      if (second_dominant(dist[i]) != first) return false;
    }
  }
  return true;
}

std::optional<std::vector<std::size_t>> refinement_map(const CsitPartition& fine,
                                                       const CsitPartition& coarse) {
  if (fine.atom_count() != coarse.atom_count()) return std::nullopt;
  std::vector<std::size_t> map(fine.symbol_count());
  for (std::size_t e = 0; e < fine.symbol_count(); ++e) {
    const auto& atoms = fine.group(e).atoms;
    map[e] = coarse.symbol_of(atoms.front());
    for (std::size_t i : atoms) {
      if (coarse.symbol_of(i) != map[e]) return std::nullopt;
    }
  }
  return map;
}

}  // namespace fbc
