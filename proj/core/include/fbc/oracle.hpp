#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fbc/rates.hpp"

namespace fbc {

/// Layered Gaussian input X = sqrt(phi) (sqrt(beta) U + sqrt(1-alpha-beta) W + sqrt(alpha) V)
/// seen through one state atom, with unit-variance noise at both receivers.
struct SignalingSpec {
  double phi = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
};

/// Row/column order of the joint covariance.
enum Var : int { W = 0, U = 1, V = 2, Y1 = 3, Y2 = 4 };

/// Covariance of (W, U, V, Y1, Y2) as a real surrogate of the complex channel.
Eigen::Matrix<double, 5, 5> joint_covariance(const SignalingSpec& spec);

/// real: I = 1/2 log2 det-ratio; complex: log2 det-ratio (circular symmetry
/// doubles the real dimension, so the scalar AWGN case gives log2(1 + snr)).
enum class Field { real, complex };

/// I(A; B | C) in bits from log-determinants of Schur complements.
double gaussian_mi(const Eigen::MatrixXd& cov, const std::vector<int>& a, const std::vector<int>& b,
                   const std::vector<int>& c, Field field = Field::complex);

struct MartonFunctionals {
  double f1 = 0.0;  // I(W,U; Y1)
  double f2 = 0.0;  // I(W,V; Y2)
  double f3 = 0.0;  // I(U; Y1 | W)
  double f4 = 0.0;  // I(V; Y2 | W)
  double f5 = 0.0;  // I(U; V | W)
};

MartonFunctionals marton_functionals(const SignalingSpec& spec);

struct OracleReport {
  double max_abs_err = 0.0;
  std::size_t worst_atom = 0;
  bool ok = true;
};

/// Compares every closed-form inner-bound integrand against the log-det
/// route, atom by atom.
OracleReport verify_closed_forms(const Scenario& s, const InnerPolicy& pol, double tol);

}  // namespace fbc
