#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "fbc/oracle.hpp"

using namespace fbc;

TEST_CASE("joint covariance") {
  const auto zero = joint_covariance({0.0, 0.3, 0.3, 2.0, 5.0});
  CHECK(zero(Y1, Y1) == 1.0);
  CHECK(zero(Y2, Y2) == 1.0);
  CHECK(zero(Y1, Y2) == 0.0);
  CHECK(zero(Y1, W) == 0.0);

  const auto c = joint_covariance({1.0, 0.0, 1.0, 3.0, 1.0});
  CHECK(c(Y1, U) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(c(Y1, Y1) == 4.0);

  CHECK_THROWS_AS(joint_covariance({1.0, 0.7, 0.7, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(joint_covariance({-1.0, 0.1, 0.1, 1.0, 1.0}), Error);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double a = u(rng);
    const auto m = joint_covariance({5 * u(rng), a, (1 - a) * u(rng), 5 * u(rng), 5 * u(rng)});
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("gaussian_mi") {
  Eigen::MatrixXd indep = Eigen::MatrixXd::Identity(3, 3);
  CHECK(gaussian_mi(indep, {0}, {1}, {2}) == 0.0);

  // X unit, Y = X + N with unit noise.
  Eigen::MatrixXd scalar(2, 2);
  scalar << 1, 1, 1, 2;
  CHECK(gaussian_mi(scalar, {0}, {1}, {}, Field::real) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_mi(scalar, {0}, {1}, {}, Field::complex) == doctest::Approx(1.0).epsilon(1e-15));

  const auto c = joint_covariance({1.0, 0.25, 0.5, 3.0, 1.0});
  CHECK(gaussian_mi(c, {W, U}, {Y1}, {}) == doctest::Approx(std::log2(16.0 / 7.0)).epsilon(1e-12));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(2, 2) = -1.0;
  CHECK_THROWS_AS(gaussian_mi(bad, {0}, {1}, {2}), Error);
}

TEST_CASE("marton functionals") {
  const auto f = marton_functionals({1.0, 0.0, 1.0, 3.0, 1.0});
  CHECK(f.f1 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(f.f2) < 1e-12);
  CHECK(f.f3 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(f.f4) < 1e-12);
  CHECK(f.f5 == 0.0);

  const auto flat = marton_functionals({2.0, 0.0, 0.0, 3.0, 0.5});
  CHECK(std::abs(flat.f3) < 1e-12);
  CHECK(std::abs(flat.f4) < 1e-12);
  CHECK(flat.f1 == doctest::Approx(std::log2(7.0)).epsilon(1e-12));
  CHECK(flat.f2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oracle sanity properties") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double a = u(rng);
    const SignalingSpec spec{4 * u(rng), a, (1 - a) * u(rng), 4 * u(rng), 4 * u(rng)};
    const auto f = marton_functionals(spec);
    CHECK(std::abs(f.f5) <= 1e-12);
    CHECK(f.f3 <= f.f1 + 1e-12);
    CHECK(f.f4 <= f.f2 + 1e-12);

    const auto t4 = inner_terms({spec.g1, spec.g2, 1.0}, spec.phi, spec.alpha, spec.beta);
    CHECK(std::abs(f.f1 + f.f2 - f.f5 - (t4[0] + t4[1])) <= 1e-9);

    // A degraded second receiver learns less about V given the rest.
    SignalingSpec deg = spec;
    if (deg.g2 > deg.g1) std::swap(deg.g1, deg.g2);
    const auto cov = joint_covariance(deg);
    CHECK(gaussian_mi(cov, {V}, {Y2}, {W, U}) <= gaussian_mi(cov, {V}, {Y1}, {W, U}) + 1e-12);
  }
}

TEST_CASE("verify_closed_forms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<GainAtom> atoms;
    for (int i = 0; i < 4; ++i) atoms.push_back({4 * u(rng), 4 * u(rng), 0.25});
    const auto s = Scenario::make(build_discrete(atoms), CsitMap::perfect(), 2.0);
    const std::size_t m = s.partition.symbol_count();
    InnerPolicy pol{std::vector<double>(m, 2.0), std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t e = 0; e < m; ++e) {
      pol.alpha[e] = u(rng);
      pol.beta[e] = t % 5 == 0 ? 1.0 - pol.alpha[e] : (1 - pol.alpha[e]) * u(rng);
    }
    const auto rep = verify_closed_forms(s, pol, 1e-9);
    CHECK(rep.ok);
    CHECK(rep.max_abs_err <= 1e-9);

    std::fill(pol.phi.begin(), pol.phi.end(), 0.0);
    CHECK(verify_closed_forms(s, pol, 1e-9).max_abs_err <= 1e-12);
  }
}
