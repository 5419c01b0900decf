#include "search_space.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace fbc::detail {

namespace {

// Euclidean projection of y onto non-increasing sequences (pool adjacent violators).
void project_nonincreasing(std::span<double> y) {
  std::vector<std::pair<double, std::size_t>> blocks;  // (sum, count)
  for (double v : y) {
    blocks.emplace_back(v, 1);
    while (blocks.size() > 1) {
      const auto& last = blocks.back();
      const auto& prev = blocks[blocks.size() - 2];
      if (prev.first / prev.second >= last.first / last.second) break;
      const std::pair<double, std::size_t> merged{prev.first + last.first, prev.second + last.second};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::size_t k = 0;
  for (const auto& [sum, count] : blocks) {
    for (std::size_t j = 0; j < count; ++j) y[k++] = sum / count;
  }
}

// Class index per atom for a key function; classes numbered in key order.
template <typename Key>
std::size_t classify(const Scenario& s, Key key, std::vector<std::size_t>& out) {
  std::map<decltype(key(std::size_t{})), std::size_t> ids;
  for (std::size_t i = 0; i < s.dist.size(); ++i) ids.emplace(key(i), 0);
  std::size_t next = 0;
  for (auto& [k, id] : ids) id = next++;
  out.resize(s.dist.size());
  for (std::size_t i = 0; i < s.dist.size(); ++i) out[i] = ids.at(key(i));
  return next;
}

}  // namespace

SearchSpace::SearchSpace(const Scenario& s, Bound bound, Restriction restriction)
    : s_(s), bound_(bound), restriction_(restriction) {
  const std::size_t m = s.partition.symbol_count();
  power_dims_ = m > 1 ? m : 0;
  scale_dim_ = bound == Bound::secrecy_inner || bound == Bound::secrecy_outer ||
               bound == Bound::secrecy_outer_nocommon;
  layer_offset_ = power_dims_ + (scale_dim_ ? 1 : 0);

  std::size_t layer_dims = 0;
  if (bound == Bound::secrecy_outer_nocommon || restriction == Restriction::degradedness_split) {
    layer_ = Layer::none;
  } else if (!uses_outer_policy(bound)) {
    layer_ = Layer::inner_pairs;
    layer_dims = 2 * m;
  } else if (restriction == Restriction::free) {
    layer_ = Layer::outer_atoms;
    layer_dims = s.dist.size();
  } else {
    layer_ = Layer::outer_classes;
    monotone_ = restriction == Restriction::thm4_monotone;
    const auto& d = s.dist;
    const auto& p = s.partition;
    // Classes are ordered by gain first, so for a single symbol the class
    // order is the gain order the monotone projection needs.
    alpha_classes_ = classify(
        s, [&](std::size_t i) { return std::pair{d[i].g2, p.symbol_of(i)}; }, alpha_class_);
    beta_classes_ = classify(
        s, [&](std::size_t i) { return std::pair{d[i].g1, p.symbol_of(i)}; }, beta_class_);
    layer_dims = alpha_classes_ + beta_classes_;
  }
  dim_ = layer_offset_ + layer_dims;
}

void SearchSpace::project(std::vector<double>& x) const {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  if (layer_ == Layer::inner_pairs) {
    for (std::size_t e = 0; e < s_.partition.symbol_count(); ++e) {
      double& a = x[layer_offset_ + 2 * e];
      double& b = x[layer_offset_ + 2 * e + 1];
      const double excess = a + b - 1.0;
      if (excess > 0.0) {
        a -= excess / 2;
        b -= excess / 2;
        if (a < 0.0) b = 1.0, a = 0.0;
        if (b < 0.0) a = 1.0, b = 0.0;
        if (a + b > 1.0) b = 1.0 - a;
      }
    }
  }
  if (monotone_) {
    std::span<double> all(x);
    project_nonincreasing(all.subspan(layer_offset_, alpha_classes_));
    project_nonincreasing(all.subspan(layer_offset_ + alpha_classes_, beta_classes_));
  }
}

std::vector<double> SearchSpace::decode_phi(std::span<const double> x) const {
  const auto& part = s_.partition;
  const std::size_t m = part.symbol_count();
  const double budget = s_.power * (scale_dim_ ? x[power_dims_] : 1.0);
  std::vector<double> u(m, 1.0);
  if (power_dims_ > 0) {
    CompensatedSum used;
    for (std::size_t e = 0; e < m; ++e) used.add(part.mass(e) * x[e]);
    if (used.value() > 0.0) {
      for (std::size_t e = 0; e < m; ++e) u[e] = x[e] / used.value();
    }
  }
  std::vector<double> phi(m);
  for (std::size_t e = 0; e < m; ++e) phi[e] = budget * u[e];
  return phi;
}

Policy SearchSpace::decode(std::span<const double> x) const {
  const std::size_t m = s_.partition.symbol_count();
  const std::size_t n = s_.dist.size();
  auto phi = decode_phi(x);

  if (bound_ == Bound::secrecy_outer_nocommon) {
    return OuterPolicy{std::move(phi), std::vector<double>(n, 1.0), std::vector<double>(n, 1.0),
                       OuterRestriction::free};
  }
  if (!uses_outer_policy(bound_)) {
    if (layer_ == Layer::none) return degradedness_split(s_, phi);
    InnerPolicy pol{std::move(phi), std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t e = 0; e < m; ++e) {
      pol.alpha[e] = x[layer_offset_ + 2 * e];
      pol.beta[e] = x[layer_offset_ + 2 * e + 1];
    }
    return pol;
  }

  OuterPolicy pol{std::move(phi), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                  OuterRestriction::free};
  if (layer_ == Layer::outer_atoms) {
    for (std::size_t i = 0; i < n; ++i) {
      (second_dominant(s_.dist[i]) ? pol.alpha[i] : pol.beta[i]) = x[layer_offset_ + i];
    }
  } else {
    pol.restriction = monotone_ ? OuterRestriction::monotone_no_csit
                                : OuterRestriction::per_gain_and_symbol;
    for (std::size_t i = 0; i < n; ++i) {
      pol.alpha[i] = x[layer_offset_ + alpha_class_[i]];
      pol.beta[i] = x[layer_offset_ + alpha_classes_ + beta_class_[i]];
    }
  }
  return pol;
}

std::vector<double> SearchSpace::encode(const Policy& policy) const {
  const bool outer = std::holds_alternative<OuterPolicy>(policy);
  if (outer != uses_outer_policy(bound_)) {
    throw Error(ErrorKind::PolicyInfeasible, "seed policy kind does not match the bound");
  }
  const auto& phi = outer ? std::get<OuterPolicy>(policy).phi : std::get<InnerPolicy>(policy).phi;
  const std::size_t m = s_.partition.symbol_count();
  if (phi.size() != m) throw Error(ErrorKind::PolicyInfeasible, "seed has the wrong symbol count");

  std::vector<double> x(dim_, 0.0);
  const double top = *std::max_element(phi.begin(), phi.end());
  CompensatedSum used;
  for (std::size_t e = 0; e < m; ++e) used.add(s_.partition.mass(e) * phi[e]);
  for (std::size_t e = 0; e < power_dims_; ++e) x[e] = top > 0.0 ? phi[e] / top : 1.0;
  if (scale_dim_) x[power_dims_] = s_.power > 0.0 ? used.value() / s_.power : 1.0;

  switch (layer_) {
    case Layer::none:
      break;
    case Layer::inner_pairs: {
      const auto& p = std::get<InnerPolicy>(policy);
      for (std::size_t e = 0; e < m; ++e) {
        x[layer_offset_ + 2 * e] = p.alpha[e];
        x[layer_offset_ + 2 * e + 1] = p.beta[e];
      }
      break;
    }
    case Layer::outer_atoms: {
      const auto& p = std::get<OuterPolicy>(policy);
      for (std::size_t i = 0; i < s_.dist.size(); ++i) {
        x[layer_offset_ + i] = second_dominant(s_.dist[i]) ? p.alpha[i] : p.beta[i];
      }
      break;
    }
    case Layer::outer_classes: {
      const auto& p = std::get<OuterPolicy>(policy);
      // Iterate in reverse so the first atom of each class wins.
      for (std::size_t i = s_.dist.size(); i-- > 0;) {
        x[layer_offset_ + alpha_class_[i]] = p.alpha[i];
        x[layer_offset_ + alpha_classes_ + beta_class_[i]] = p.beta[i];
      }
      break;
    }
  }
  project(x);
  return x;
}

std::vector<std::vector<double>> SearchSpace::grid_seeds(std::size_t levels) const {
  std::vector<double> vals;
  if (levels <= 1) {
    vals.push_back(0.5);
  } else {
    for (std::size_t k = 0; k < levels; ++k) vals.push_back(double(k) / double(levels - 1));
  }
  std::vector<double> base(dim_, 0.0);
  for (std::size_t e = 0; e < power_dims_; ++e) base[e] = 1.0;
  if (scale_dim_) base[power_dims_] = 1.0;

  std::vector<std::vector<double>> seeds;
  if (layer_ == Layer::none) {
    seeds.push_back(base);
    return seeds;
  }
  for (double a : vals) {
    for (double b : vals) {
      if (layer_ == Layer::inner_pairs && a + b > 1.0 + 1e-12) continue;
      auto x = base;
      if (layer_ == Layer::inner_pairs) {
        for (std::size_t e = 0; e < s_.partition.symbol_count(); ++e) {
          x[layer_offset_ + 2 * e] = a;
          x[layer_offset_ + 2 * e + 1] = b;
        }
      } else if (layer_ == Layer::outer_atoms) {
        for (std::size_t i = 0; i < s_.dist.size(); ++i) {
          x[layer_offset_ + i] = second_dominant(s_.dist[i]) ? a : b;
        }
      } else {
        for (std::size_t k = 0; k < alpha_classes_; ++k) x[layer_offset_ + k] = a;
        for (std::size_t k = 0; k < beta_classes_; ++k) x[layer_offset_ + alpha_classes_ + k] = b;
      }
      project(x);
      seeds.push_back(std::move(x));
    }
  }
  return seeds;
}

}  // namespace fbc::detail
