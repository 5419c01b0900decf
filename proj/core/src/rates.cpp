#include "fbc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace fbc {

double psi(double x) {
  if (x < 0.0 || std::isnan(x)) {
    throw Error(ErrorKind::NegativeArgument, "psi requires x >= 0");
  }
  return std::log1p(x) / std::numbers::ln2;
}

namespace {

// psi(g * num * phi / (g * den * phi + 1)): one Gaussian layer of power share
// `num` decoded against interference of power share `den`. Every rate
// expression goes through this helper so that algebraically identical terms
// are also bitwise identical.
double layer(double g, double num, double den, double phi) {
  return psi(g * num * phi / (g * den * phi + 1.0));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::PolicyInfeasible, what);
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

void check_power(const Scenario& s, std::span<const double> phi) {
  require(phi.size() == s.partition.symbol_count(), "phi must have one entry per CSIT symbol");
  CompensatedSum used;
  for (std::size_t e = 0; e < phi.size(); ++e) {
    require(std::isfinite(phi[e]) && phi[e] >= 0.0, "phi must be finite and nonnegative");
    used.add(s.partition.mass(e) * phi[e]);
  }
  require(used.value() <= s.power + 1e-9 * std::max(1.0, s.power),
          "power budget exceeded: E[phi] = " + std::to_string(used.value()) + " > P = " +
              std::to_string(s.power));
}

}  // namespace

Scenario Scenario::make(FadingDistribution dist, const CsitMap& csit, double power) {
  if (!(power >= 0.0) || !std::isfinite(power)) {
    throw Error(ErrorKind::NegativeArgument, "power budget must be finite and nonnegative");
  }
  Scenario s{std::move(dist), {}, power};
  s.partition = partition_by_csit(s.dist, csit);
  return s;
}

RatePolytope SecrecyBox::as_polytope() const {
  return {{{{1, 0, 0}, r0_cap}, {{0, 1, 0}, r1_cap}, {{0, 0, 1}, r2_cap}}};
}

void validate(const Scenario& s, const InnerPolicy& pol) {
  const std::size_t m = s.partition.symbol_count();
  require(pol.alpha.size() == m && pol.beta.size() == m,
          "alpha and beta must have one entry per CSIT symbol");
  for (std::size_t e = 0; e < m; ++e) {
    require(unit(pol.alpha[e]) && unit(pol.beta[e]), "alpha and beta must lie in [0, 1]");
    require(pol.alpha[e] + pol.beta[e] <= 1.0 + 1e-12, "alpha + beta must not exceed 1");
  }
  check_power(s, pol.phi);
}

void validate(const Scenario& s, const OuterPolicy& pol) {
  const std::size_t n = s.dist.size();
  require(pol.alpha.size() == n && pol.beta.size() == n,
          "outer alpha and beta must have one entry per state atom");
  for (std::size_t i = 0; i < n; ++i) {
    require(unit(pol.alpha[i]) && unit(pol.beta[i]), "alpha and beta must lie in [0, 1]");
  }
  check_power(s, pol.phi);

  constexpr double tol = 1e-12;
  switch (pol.restriction) {
    case OuterRestriction::free:
      break;
    case OuterRestriction::per_gain_and_symbol: {
      std::map<std::pair<double, std::size_t>, double> by_g2;
      std::map<std::pair<double, std::size_t>, double> by_g1;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t e = s.partition.symbol_of(i);
        auto [a, fresh_a] = by_g2.try_emplace({s.dist[i].g2, e}, pol.alpha[i]);
        require(fresh_a || std::abs(a->second - pol.alpha[i]) <= tol,
                "alpha must depend on (g2, E) only");
        auto [b, fresh_b] = by_g1.try_emplace({s.dist[i].g1, e}, pol.beta[i]);
        require(fresh_b || std::abs(b->second - pol.beta[i]) <= tol,
                "beta must depend on (g1, E) only");
      }
      break;
    }
    case OuterRestriction::monotone_no_csit:
      require(s.partition.symbol_count() == 1, "monotone restriction requires no CSIT");
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (s.dist[i].g2 >= s.dist[j].g2) {
            require(pol.alpha[i] <= pol.alpha[j] + tol, "alpha must be non-increasing in g2");
          }
          if (s.dist[i].g1 >= s.dist[j].g1) {
            require(pol.beta[i] <= pol.beta[j] + tol, "beta must be non-increasing in g1");
          }
        }
      }
      break;
  }
}

std::array<double, 4> inner_terms(const GainAtom& a, double phi, double alpha, double beta) {
  const double t1 = layer(a.g1, 1.0 - alpha, alpha, phi);
  const double t2 = layer(a.g2, 1.0 - beta, beta, phi);
  const double t3 = layer(a.g1, beta, alpha, phi) + t2;
  const double t4 = t1 + layer(a.g2, alpha, beta, phi);
  return {t1, t2, t3, t4};
}

std::array<double, 4> outer_terms(const GainAtom& a, double phi, double alpha, double beta) {
  if (first_dominant(a)) {
    const double full1 = layer(a.g1, 1.0, 0.0, phi);
    const double cloud2 = layer(a.g2, 1.0 - beta, beta, phi);
    return {full1, cloud2, layer(a.g1, beta, 0.0, phi) + cloud2, full1};
  }
  const double full2 = layer(a.g2, 1.0, 0.0, phi);
  const double cloud1 = layer(a.g1, 1.0 - alpha, alpha, phi);
  return {cloud1, full2, full2, layer(a.g2, alpha, 0.0, phi) + cloud1};
}

SecrecyTerms secrecy_inner_terms(const GainAtom& a, double phi, double alpha, double beta) {
  const double cloud = std::max(0.0, 1.0 - alpha - beta);
  const double sats = alpha + beta;
  return {layer(a.g1, cloud, sats, phi), layer(a.g2, cloud, sats, phi),
          layer(a.g1, beta, alpha, phi) - layer(a.g2, beta, 0.0, phi),
          layer(a.g2, alpha, beta, phi) - layer(a.g1, alpha, 0.0, phi)};
}

SecrecyTerms secrecy_outer_terms(const GainAtom& a, double phi, double alpha, double beta) {
  if (first_dominant(a)) {
    return {layer(a.g1, 1.0 - beta, beta, phi), layer(a.g2, 1.0 - beta, beta, phi),
            layer(a.g1, beta, 0.0, phi) - layer(a.g2, beta, 0.0, phi), 0.0};
  }
  return {layer(a.g1, 1.0 - alpha, alpha, phi), layer(a.g2, 1.0 - alpha, alpha, phi), 0.0,
          layer(a.g2, alpha, 0.0, phi) - layer(a.g1, alpha, 0.0, phi)};
}

namespace {

RatePolytope polytope_from(const std::array<CompensatedSum, 4>& t) {
  return {{{{1, 1, 0}, t[0].value()},
           {{1, 0, 1}, t[1].value()},
           {{1, 1, 1}, t[2].value()},
           {{1, 1, 1}, t[3].value()}}};
}

}  // namespace

RatePolytope inner_polytope(const Scenario& s, const InnerPolicy& pol) {
  validate(s, pol);
  std::array<CompensatedSum, 4> t;
  for (std::size_t i = 0; i < s.dist.size(); ++i) {
    const std::size_t e = s.partition.symbol_of(i);
    const auto terms = inner_terms(s.dist[i], pol.phi[e], pol.alpha[e], pol.beta[e]);
    for (int k = 0; k < 4; ++k) t[k].add(s.dist[i].p * terms[k]);
  }
  return polytope_from(t);
}

RatePolytope outer_polytope(const Scenario& s, const OuterPolicy& pol) {
  validate(s, pol);
  std::array<CompensatedSum, 4> t;
  for (std::size_t i = 0; i < s.dist.size(); ++i) {
    const double phi = pol.phi[s.partition.symbol_of(i)];
    const auto terms = outer_terms(s.dist[i], phi, pol.alpha[i], pol.beta[i]);
    for (int k = 0; k < 4; ++k) t[k].add(s.dist[i].p * terms[k]);
  }
  return polytope_from(t);
}

SecrecyBox secrecy_inner_box(const Scenario& s, const InnerPolicy& pol) {
  validate(s, pol);
  CompensatedSum c1, c2, r1, r2;
  for (std::size_t i = 0; i < s.dist.size(); ++i) {
    const std::size_t e = s.partition.symbol_of(i);
    const auto t = secrecy_inner_terms(s.dist[i], pol.phi[e], pol.alpha[e], pol.beta[e]);
    const double p = s.dist[i].p;
    c1.add(p * t.r0_user1);
    c2.add(p * t.r0_user2);
    r1.add(p * t.r1);
    r2.add(p * t.r2);
  }
  // The positive part wraps the whole expectation difference.
  return {std::min(c1.value(), c2.value()), std::max(0.0, r1.value()), std::max(0.0, r2.value())};
}

SecrecyBox secrecy_outer_box(const Scenario& s, const OuterPolicy& pol) {
  validate(s, pol);
  CompensatedSum c1, c2, r1, r2;
  for (std::size_t i = 0; i < s.dist.size(); ++i) {
    const double phi = pol.phi[s.partition.symbol_of(i)];
    const auto t = secrecy_outer_terms(s.dist[i], phi, pol.alpha[i], pol.beta[i]);
    const double p = s.dist[i].p;
    c1.add(p * t.r0_user1);
    c2.add(p * t.r0_user2);
    r1.add(p * t.r1);
    r2.add(p * t.r2);
  }
  return {std::min(c1.value(), c2.value()), r1.value(), r2.value()};
}

std::pair<double, double> secrecy_outer_nocommon(const Scenario& s, std::span<const double> phi) {
  check_power(s, phi);
  CompensatedSum r1, r2;
  for (std::size_t i = 0; i < s.dist.size(); ++i) {
    const GainAtom& a = s.dist[i];
    const double f = phi[s.partition.symbol_of(i)];
    const double gap = layer(a.g1, 1.0, 0.0, f) - layer(a.g2, 1.0, 0.0, f);
    if (first_dominant(a)) {
      r1.add(a.p * gap);
    } else {
      r2.add(a.p * -gap);
    }
  }
  return {r1.value(), r2.value()};
}

double sumrate_value(const Scenario& s, std::span<const double> phi) {
  if (!csit_refines_order(s.dist, s.partition)) {
    throw Error(ErrorKind::CsitDoesNotDetermineOrder,
                "sum-rate capacity needs CSIT that reveals which user is stronger");
  }
  check_power(s, phi);
  CompensatedSum acc;
  for (std::size_t i = 0; i < s.dist.size(); ++i) {
    const GainAtom& a = s.dist[i];
    acc.add(a.p * layer(std::max(a.g1, a.g2), 1.0, 0.0, phi[s.partition.symbol_of(i)]));
  }
  return acc.value();
}

InnerPolicy perfect_csit_policy_map(const Scenario& s, std::span<const double> alpha_star,
                                std::span<const double> beta_star, std::span<const double> phi) {
  if (!s.partition.is_perfect()) {
    throw Error(ErrorKind::RequiresPerfectCsit, "the coincidence map needs E = S");
  }
  const std::size_t n = s.dist.size();
  require(alpha_star.size() == n && beta_star.size() == n,
          "alpha* and beta* must have one entry per state atom");
  require(phi.size() == n, "phi must have one entry per CSIT symbol");
  InnerPolicy pol{std::vector<double>(phi.begin(), phi.end()), std::vector<double>(n, 0.0),
                  std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t e = s.partition.symbol_of(i);
    if (second_dominant(s.dist[i])) {
      pol.alpha[e] = alpha_star[i];
    } else {
      pol.beta[e] = beta_star[i];
    }
  }
  return pol;
}

InnerPolicy inner_from_outer(const Scenario& s, const OuterPolicy& pol) {
  return perfect_csit_policy_map(s, pol.alpha, pol.beta, pol.phi);
}

InnerPolicy degradedness_split(const Scenario& s, std::span<const double> phi) {
  if (!csit_refines_order(s.dist, s.partition)) {
    throw Error(ErrorKind::CsitDoesNotDetermineOrder,
                "the degradedness split needs CSIT that reveals which user is stronger");
  }
  const std::size_t m = s.partition.symbol_count();
  InnerPolicy pol{std::vector<double>(phi.begin(), phi.end()), std::vector<double>(m, 0.0),
                  std::vector<double>(m, 0.0)};
  for (std::size_t e = 0; e < m; ++e) {
    if (second_dominant(s.dist[s.partition.group(e).atoms.front()])) {
      pol.alpha[e] = 1.0;
    } else {
      pol.beta[e] = 1.0;
    }
  }
  return pol;
}

OuterPolicy lift_to_outer(const Scenario& s, const InnerPolicy& pol, OuterRestriction restriction) {
  const std::size_t n = s.dist.size();
  OuterPolicy out{pol.phi, std::vector<double>(n), std::vector<double>(n), restriction};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t e = s.partition.symbol_of(i);
    out.alpha[i] = pol.alpha[e];
    out.beta[i] = pol.beta[e];
  }
  return out;
}

InnerPolicy lift_through_refinement(const InnerPolicy& coarse,
                                    std::span<const std::size_t> coarse_of_fine) {
  InnerPolicy fine;
  for (std::size_t c : coarse_of_fine) {
    fine.phi.push_back(coarse.phi[c]);
    fine.alpha.push_back(coarse.alpha[c]);
    fine.beta.push_back(coarse.beta[c]);
  }
  return fine;
}

}  // namespace fbc
