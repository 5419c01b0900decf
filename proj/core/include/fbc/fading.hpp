#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fbc/error.hpp"
#include "fbc/summation.hpp"

namespace fbc {

/// One support point of the fading law: linear power gains |S1|^2, |S2|^2 and
/// their probability mass. Phases never enter any rate expression, so only
/// magnitudes are stored.
struct GainAtom {
  double g1 = 0.0;
  double g2 = 0.0;
  double p = 0.0;

  friend bool operator==(const GainAtom&, const GainAtom&) = default;
};

/// Degradedness ordering of a single state. Ties belong to the
/// first-user-dominant event, uniformly across every formula.
inline bool first_dominant(const GainAtom& a) noexcept { return a.g1 >= a.g2; }
inline bool second_dominant(const GainAtom& a) noexcept { return a.g1 < a.g2; }

/// Finite joint law of (g1, g2). Atoms are canonically sorted by (g1, g2)
/// and their masses sum to one within 1e-12.
class FadingDistribution {
 public:
  std::span<const GainAtom> atoms() const noexcept { return atoms_; }
  const GainAtom& operator[](std::size_t i) const noexcept { return atoms_[i]; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool iid() const noexcept { return iid_; }

  friend bool operator==(const FadingDistribution&, const FadingDistribution&) = default;

 private:
  friend FadingDistribution build_discrete(std::span<const GainAtom>, bool);

  std::vector<GainAtom> atoms_;
  bool iid_ = false;
};

/// Merges duplicate gain pairs, checks the mass total against [1-1e-9, 1+1e-9]
/// and rescales it to exactly one.
FadingDistribution build_discrete(std::span<const GainAtom> atoms, bool iid = false);

struct RayleighIndependent {
  double mean_gain1 = 1.0;
  double mean_gain2 = 1.0;

  friend bool operator==(const RayleighIndependent&, const RayleighIndependent&) = default;
};

struct QuantizationGrid {
  int levels_per_axis = 16;
  double tail_mass = 1e-3;

  friend bool operator==(const QuantizationGrid&, const QuantizationGrid&) = default;
};

/// Discretizes independent Rayleigh fading (exponential power gains). Each
/// axis drops `tail_mass` from the upper tail, renormalizes, and splits the
/// remainder into equiprobable cells represented by their conditional means.
FadingDistribution quantize_continuous(const RayleighIndependent& family,
                                       const QuantizationGrid& grid, bool iid = false);

enum class CsitKind { perfect, none, degradedness_bit, table };

/// Deterministic quantizer from state atoms to transmitter side information.
class CsitMap {
 public:
  static CsitMap perfect() { return CsitMap(CsitKind::perfect, {}); }
  static CsitMap none() { return CsitMap(CsitKind::none, {}); }
  static CsitMap degradedness_bit() { return CsitMap(CsitKind::degradedness_bit, {}); }
  /// `table[i]` is the symbol of atom i in canonical order.
  static CsitMap from_table(std::vector<std::size_t> table) {
    return CsitMap(CsitKind::table, std::move(table));
  }

  CsitKind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& table() const noexcept { return table_; }

  friend bool operator==(const CsitMap&, const CsitMap&) = default;

 private:
  CsitMap(CsitKind kind, std::vector<std::size_t> table) : kind_(kind), table_(std::move(table)) {}

  CsitKind kind_;
  std::vector<std::size_t> table_;
};

struct CsitGroup {
  std::vector<std::size_t> atoms;   // indices into the distribution
  std::vector<double> conditional;  // p(s | e), aligned with `atoms`
  double mass = 0.0;                // p(e)
};

/// The factorization of the state law through a CSIT map. Symbol ids are
/// dense: every id in [0, symbol_count) owns at least one atom.
class CsitPartition {
 public:
  CsitKind kind() const noexcept { return kind_; }
  std::size_t symbol_count() const noexcept { return groups_.size(); }
  std::size_t atom_count() const noexcept { return symbol_of_.size(); }
  std::size_t symbol_of(std::size_t atom) const noexcept { return symbol_of_[atom]; }
  std::span<const std::size_t> symbols() const noexcept { return symbol_of_; }
  const std::vector<CsitGroup>& groups() const noexcept { return groups_; }
  const CsitGroup& group(std::size_t e) const noexcept { return groups_[e]; }
  double mass(std::size_t e) const noexcept { return groups_[e].mass; }

  /// Injective on atoms, regardless of how the map was specified.
  bool is_perfect() const noexcept { return groups_.size() == symbol_of_.size(); }

 private:
  friend CsitPartition partition_by_csit(const FadingDistribution&, const CsitMap&);

  CsitKind kind_ = CsitKind::none;
  std::vector<std::size_t> symbol_of_;
  std::vector<CsitGroup> groups_;
};

CsitPartition partition_by_csit(const FadingDistribution& dist, const CsitMap& csit);

/// True iff every CSIT group is constant in the indicator 1(g1 < g2).
bool csit_refines_order(const FadingDistribution& dist, const CsitPartition& partition);

/// For a refinement `fine` of `coarse`, the coarse symbol owning each fine
/// symbol. Empty when some fine group straddles two coarse groups.
std::optional<std::vector<std::size_t>> refinement_map(const CsitPartition& fine,
                                                       const CsitPartition& coarse);

/// Exact expectation over the finite support with compensated summation.
template <typename F>
double expect(const FadingDistribution& dist, F&& f) {
  CompensatedSum acc;
  for (const GainAtom& a : dist.atoms()) {
    const double v = f(a);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFiniteFunctional, "functional is not finite on an atom");
    }
    acc.add(a.p * v);
  }
  return acc.value();
}

}  // namespace fbc
