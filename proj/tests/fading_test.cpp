#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fbc/fading.hpp"
#include "fbc/rates.hpp"

using namespace fbc;

namespace {

FadingDistribution symmetric() {
  const std::vector<GainAtom> atoms{{3, 1, 0.5}, {1, 3, 0.5}};
  return build_discrete(atoms);
}

}  // namespace

TEST_CASE("build_discrete merges and sorts") {
  const std::vector<GainAtom> atoms{{3, 1, 0.25}, {3, 1, 0.25}, {1, 3, 0.5}};
  const auto d = build_discrete(atoms);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == GainAtom{1, 3, 0.5});
  CHECK(d[1] == GainAtom{3, 1, 0.5});
  CHECK(symmetric().size() == 2);
}

TEST_CASE("build_discrete rejects bad input") {
  auto kind_of = [](std::vector<GainAtom> atoms) {
    try {
      build_discrete(atoms);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind_of({{3, 1, 0.5}, {1, 3, 0.6}}) == ErrorKind::MassSumOutOfTolerance);
  CHECK(kind_of({{3, 1, 1.0}, {1, 3, 0.0}}) == ErrorKind::NonPositiveMass);
  CHECK(kind_of({{-1, 1, 1.0}}) == ErrorKind::NegativeGain);
  CHECK(kind_of({}) == ErrorKind::MassSumOutOfTolerance);
}

TEST_CASE("mass within tolerance is renormalized") {
  const std::vector<GainAtom> atoms{{1, 2, 0.5 + 4e-10}, {2, 1, 0.5}};
  const auto d = build_discrete(atoms);
  CHECK(std::abs(d[0].p + d[1].p - 1.0) < 1e-15);
}

TEST_CASE("quantize_continuous") {
  CHECK_THROWS_AS(quantize_continuous({1, 1}, {1, 0.01}), Error);
  CHECK_THROWS_AS(quantize_continuous({1, 1}, {4, 0.2}), Error);
  CHECK_THROWS_AS(quantize_continuous({0, 1}, {4, 0.01}), Error);

  // Two equiprobable cells per axis after truncation; masses from the
  // closed-form CDF are 0.5 each.
  const auto d2 = quantize_continuous({1, 1}, {2, 0.01});
  REQUIRE(d2.size() == 4);
  double m0 = 0.0;
  for (const auto& a : d2.atoms()) {
    if (a.g1 == d2[0].g1) m0 += a.p;
  }
  CHECK(m0 == doctest::Approx(0.5).epsilon(1e-12));
  // The first cell ends at the truncated median -ln(1 - 0.99/2).
  const double edge = -std::log(1.0 - 0.99 / 2);
  CHECK(d2[0].g1 < edge);

  for (int levels : {4, 16, 64}) {
    const auto d = quantize_continuous({2, 1}, {levels, 1e-3});
    double total = 0.0, mean1 = 0.0, mean2 = 0.0;
    for (const auto& a : d.atoms()) {
      total += a.p;
      mean1 += a.p * a.g1;
      mean2 += a.p * a.g2;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(std::abs(mean1 - 2.0) / 2.0 < 0.02);
    CHECK(std::abs(mean2 - 1.0) < 0.02);
  }
}

TEST_CASE("quantization error does not grow with levels") {
  double prev = 1e9;
  for (int levels : {4, 16, 64}) {
    const auto d = quantize_continuous({2, 1}, {levels, 1e-3});
    double mean1 = 0.0;
    for (const auto& a : d.atoms()) mean1 += a.p * a.g1;
    const double err = std::abs(mean1 - 2.0);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("partition_by_csit") {
  const auto d = symmetric();
  const auto bit = partition_by_csit(d, CsitMap::degradedness_bit());
  REQUIRE(bit.symbol_count() == 2);
  // canonical order puts (1,3) first; it is the second-dominant atom
  CHECK(bit.symbol_of(0) == 1);
  CHECK(bit.symbol_of(1) == 0);
  CHECK(d[bit.group(0).atoms[0]] == GainAtom{3, 1, 0.5});
  CHECK(d[bit.group(1).atoms[0]] == GainAtom{1, 3, 0.5});
  CHECK(bit.mass(0) == 0.5);
  CHECK(bit.mass(1) == 0.5);

  const auto none = partition_by_csit(d, CsitMap::none());
  CHECK(none.symbol_count() == 1);
  CHECK(none.group(0).atoms.size() == 2);

  const std::vector<GainAtom> three{{1, 1, 0.2}, {2, 1, 0.3}, {1, 2, 0.5}};
  const auto d3 = build_discrete(three);
  const auto perfect = partition_by_csit(d3, CsitMap::perfect());
  CHECK(perfect.symbol_count() == 3);
  CHECK(perfect.is_perfect());

  CHECK_THROWS_AS(partition_by_csit(d3, CsitMap::from_table({0, 1})), Error);
  CHECK_THROWS_AS(partition_by_csit(d3, CsitMap::from_table({0, 2, 2})), Error);
  const auto table = partition_by_csit(d3, CsitMap::from_table({1, 0, 1}));
  CHECK(table.symbol_count() == 2);
}

TEST_CASE("ties go to the first-dominant symbol") {
  const std::vector<GainAtom> atoms{{2, 2, 0.5}, {1, 3, 0.5}};
  const auto d = build_discrete(atoms);
  const auto bit = partition_by_csit(d, CsitMap::degradedness_bit());
  const std::size_t tie = d[0].g1 == 2 ? 0 : 1;
  CHECK(bit.symbol_of(tie) == 0);
  CHECK(first_dominant(d[tie]));
}

TEST_CASE("expect") {
  const auto d = symmetric();
  CHECK(expect(d, [](const GainAtom&) { return 1.0; }) == 1.0);
  CHECK(expect(d, [](const GainAtom& a) { return a.g1; }) == 2.0);
  CHECK(expect(d, [](const GainAtom& a) { return psi(a.g1); }) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(expect(d, [](const GainAtom&) { return NAN; }), Error);
}

TEST_CASE("expect is linear and partitions conserve mass") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GainAtom> atoms;
    const int n = 1 + trial % 7;
    for (int i = 0; i < n; ++i) atoms.push_back({u(rng), u(rng), 1.0 / n});
    const auto d = build_discrete(atoms);
    const double a = u(rng), b = u(rng);
    auto f = [](const GainAtom& x) { return std::sin(x.g1) + x.g2; };
    auto g = [](const GainAtom& x) { return x.g1 * x.g2; };
    const double lhs = expect(d, [&](const GainAtom& x) { return a * f(x) + b * g(x); });
    CHECK(std::abs(lhs - (a * expect(d, f) + b * expect(d, g))) < 1e-12);

    std::vector<std::size_t> table(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) table[i] = i % 2;
    if (d.size() == 1) table[0] = 0;
    const auto part = partition_by_csit(d, CsitMap::from_table(table));
    double total = 0.0;
    for (const auto& grp : part.groups()) {
      total += grp.mass;
      double cond = 0.0;
      for (std::size_t j = 0; j < grp.atoms.size(); ++j) {
        cond += grp.conditional[j];
        CHECK(std::abs(grp.conditional[j] * grp.mass - d[grp.atoms[j]].p) < 1e-15);
      }
      CHECK(std::abs(cond - 1.0) < 1e-12);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("refinement lattice") {
  const std::vector<GainAtom> atoms{{1, 2, 0.25}, {2, 1, 0.25}, {3, 1, 0.25}, {1, 3, 0.25}};
  const auto d = build_discrete(atoms);
  const auto perfect = partition_by_csit(d, CsitMap::perfect());
  const auto mid = partition_by_csit(d, CsitMap::from_table({0, 0, 1, 2}));
  const auto coarse = partition_by_csit(d, CsitMap::from_table({0, 0, 1, 1}));
  const auto none = partition_by_csit(d, CsitMap::none());
  CHECK(refinement_map(perfect, mid).has_value());
  CHECK(refinement_map(mid, coarse).has_value());
  CHECK(refinement_map(perfect, coarse).has_value());
  CHECK(refinement_map(coarse, none).has_value());
  CHECK_FALSE(refinement_map(coarse, mid).has_value());
  CHECK_FALSE(refinement_map(none, perfect).has_value());
}

TEST_CASE("csit_refines_order") {
  const auto d = symmetric();
  CHECK(csit_refines_order(d, partition_by_csit(d, CsitMap::degradedness_bit())));
  CHECK(csit_refines_order(d, partition_by_csit(d, CsitMap::perfect())));
  CHECK_FALSE(csit_refines_order(d, partition_by_csit(d, CsitMap::none())));
}
