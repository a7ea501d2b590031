#pragma once

#include <optional>

#include "mc/matrix.hpp"
#include "mc/sampling.hpp"
#include "mc/subspace.hpp"

namespace mc {

struct OracleReport {
  DenseMatrix m_oracle;
  std::optional<double> error_frobenius;  // vs ground truth, when supplied
  double predicted_rms = 0.0;             // sigma * sqrt(df/m)
  std::size_t df = 0;                     // r(n1 + n2 - r)
};

struct OracleOptions {
  const DenseMatrix* ground_truth = nullptr;
  double sigma = 0.0;           // noise std for the RMS prediction (0 = unknown)
  bool row_space_only = false;  // fit on T0 = {X : rows in span(V)} instead of T
  double cg_rel_tol = 1e-8;
};

/// Least squares restricted to the tangent space: the benchmark estimator
/// that knows T (or just the row space, with row_space_only). Solved by CG
/// on the normal operator. Throws IllPosedError if the normal operator is
/// numerically singular.
OracleReport oracle_least_squares(const DenseMatrix& y_omega, const ObservationSet& omega,
                                  const TangentSpace& t, const OracleOptions& opts = {});

/// Worst-case noise of Frobenius norm delta, supported on Omega, built from
/// the minimal eigenvector of the normal operator: the oracle's error on
/// Y = P_Omega(M) + Z equals lambda_min^{-1/2} * delta.
DenseMatrix adversarial_noise(const TangentSpace& t, const ObservationSet& omega,
                              double delta);

/// Stochastic oracle error prediction sigma * sqrt(r(n1+n2-r)/m) per entry
/// pool (RMS over the whole matrix).
double oracle_rms_estimate(std::size_t n1, std::size_t n2, std::size_t r, std::size_t m,
                           double sigma);

}  // namespace mc
