#include "fbc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fbc {

namespace {

constexpr double kRidge = 1e-12;

Eigen::MatrixXd pick(const Eigen::MatrixXd& m, const std::vector<int>& rows,
                     const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

// Natural log-determinant of a symmetric positive definite block.
double logdet(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularConditioning, "LDLT factorization failed");
  }
  const Eigen::VectorXd d = ldlt.vectorD();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) throw Error(ErrorKind::SingularConditioning, "block is not positive definite");
    acc += std::log(d(i));
  }
  return acc;
}

}  // namespace

Eigen::Matrix<double, 5, 5> joint_covariance(const SignalingSpec& spec) {
  const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!(spec.phi >= 0.0) || !std::isfinite(spec.phi) || !in_unit(spec.alpha) ||
      !in_unit(spec.beta) || spec.alpha + spec.beta > 1.0 + 1e-12 || !(spec.g1 >= 0.0) ||
      !(spec.g2 >= 0.0) || !std::isfinite(spec.g1) || !std::isfinite(spec.g2)) {
    throw Error(ErrorKind::InvalidSpec, "signaling spec out of range");
  }
  const double cloud = std::max(0.0, 1.0 - spec.alpha - spec.beta);
  // Loadings of X on (W, U, V).
  const double xw = std::sqrt(cloud * spec.phi);
  const double xu = std::sqrt(spec.beta * spec.phi);
  const double xv = std::sqrt(spec.alpha * spec.phi);
  const double s1 = std::sqrt(spec.g1);
  const double s2 = std::sqrt(spec.g2);

  Eigen::Matrix<double, 5, 5> c = Eigen::Matrix<double, 5, 5>::Zero();
  c(W, W) = c(U, U) = c(V, V) = 1.0;
  c(Y1, W) = c(W, Y1) = s1 * xw;
  c(Y1, U) = c(U, Y1) = s1 * xu;
  c(Y1, V) = c(V, Y1) = s1 * xv;
  c(Y2, W) = c(W, Y2) = s2 * xw;
  c(Y2, U) = c(U, Y2) = s2 * xu;
  c(Y2, V) = c(V, Y2) = s2 * xv;
  c(Y1, Y1) = spec.g1 * spec.phi + 1.0;
  c(Y2, Y2) = spec.g2 * spec.phi + 1.0;
  c(Y1, Y2) = c(Y2, Y1) = s1 * s2 * spec.phi;
  return c;
}

double gaussian_mi(const Eigen::MatrixXd& cov, const std::vector<int>& a, const std::vector<int>& b,
                   const std::vector<int>& c, Field field) {
  std::vector<int> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());

  // Schur complement of the conditioning block.
  Eigen::MatrixXd cond = pick(cov, ab, ab);
  if (!c.empty()) {
    Eigen::MatrixXd cc = pick(cov, c, c);
    cc.diagonal().array() += kRidge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cc);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
      throw Error(ErrorKind::SingularConditioning, "conditioning covariance is not invertible");
    }
    const Eigen::MatrixXd cross = pick(cov, ab, c);
    cond -= cross * ldlt.solve(cross.transpose());
  }
  const auto na = static_cast<Eigen::Index>(a.size());
  const auto nb = static_cast<Eigen::Index>(b.size());
  const double nats = logdet(cond.topLeftCorner(na, na)) + logdet(cond.bottomRightCorner(nb, nb)) -
                      logdet(cond);
  const double scale = field == Field::real ? 0.5 : 1.0;
  const double bits = scale * nats / std::numbers::ln2;
  if (bits < -1e-9) {
    throw Error(ErrorKind::NonFiniteFunctional, "negative mutual information " + std::to_string(bits));
  }
  return std::max(bits, 0.0);
}

MartonFunctionals marton_functionals(const SignalingSpec& spec) {
  const Eigen::MatrixXd cov = joint_covariance(spec);
  MartonFunctionals f;
  f.f1 = gaussian_mi(cov, {W, U}, {Y1}, {});
  f.f2 = gaussian_mi(cov, {W, V}, {Y2}, {});
  f.f3 = gaussian_mi(cov, {U}, {Y1}, {W});
  f.f4 = gaussian_mi(cov, {V}, {Y2}, {W});
  f.f5 = gaussian_mi(cov, {U}, {V}, {W});
  return f;
}

OracleReport verify_closed_forms(const Scenario& s, const InnerPolicy& pol, double tol) {
  validate(s, pol);
  OracleReport rep;
  for (std::size_t i = 0; i < s.dist.size(); ++i) {
    const std::size_t e = s.partition.symbol_of(i);
    const GainAtom& a = s.dist[i];
    const auto t = inner_terms(a, pol.phi[e], pol.alpha[e], pol.beta[e]);
    const auto f = marton_functionals({pol.phi[e], pol.alpha[e], pol.beta[e], a.g1, a.g2});
    const double err = std::max({std::abs(f.f1 - t[0]), std::abs(f.f2 - t[1]),
                                 std::abs(f.f3 - (t[2] - t[1])), std::abs(f.f4 - (t[3] - t[0]))});
    if (err > rep.max_abs_err) {
      rep.max_abs_err = err;
      rep.worst_atom = i;
    }
  }
  rep.ok = rep.max_abs_err <= tol;
  return rep;
}

}  // namespace fbc
