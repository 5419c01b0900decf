#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbc/optimizer.hpp"

namespace fbc::detail {

// Unit-box coordinates for a policy family. Every point of [0,1]^dim decodes
// to a feasible policy after `project`.
class SearchSpace {
 public:
  SearchSpace(const Scenario& s, Bound bound, Restriction restriction);

  std::size_t dim() const noexcept { return dim_; }

  void project(std::vector<double>& x) const;
  Policy decode(std::span<const double> x) const;
  std::vector<double> encode(const Policy& pol) const;

  /// Constant-layering seeds: every (alpha, beta) pair on a `levels` grid with
  /// full uniform power.
  std::vector<std::vector<double>> grid_seeds(std::size_t levels) const;

 private:
  enum class Layer { none, inner_pairs, outer_atoms, outer_classes };

  std::vector<double> decode_phi(std::span<const double> x) const;

  const Scenario& s_;
  Bound bound_;
  Restriction restriction_;
  Layer layer_ = Layer::none;

  std::size_t power_dims_ = 0;  // per-symbol shares (only when >1 symbol)
  bool scale_dim_ = false;      // fraction of the budget actually spent
  std::size_t layer_offset_ = 0;
  std::size_t dim_ = 0;

  // outer_atoms: relevant variable per atom (alpha on g1 < g2, beta otherwise)
  // outer_classes: alpha_class_[i] / beta_class_[i] index the class coordinates
  std::vector<std::size_t> alpha_class_;
  std::vector<std::size_t> beta_class_;
  std::size_t alpha_classes_ = 0;
  std::size_t beta_classes_ = 0;
  bool monotone_ = false;
};

}  // namespace fbc::detail
