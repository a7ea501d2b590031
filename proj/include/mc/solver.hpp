#pragma once

#include <string>
#include <vector>

#include "mc/matrix.hpp"
#include "mc/sampling.hpp"

namespace mc {

struct SolverOptions {
  double mu = 1.0;                        // final regularization weight
  double step = 1.0;                      // gradient step, must be in (0,2)
  double rel_tol = 1e-5;                  // relative iterate-change tolerance
  std::size_t max_iters = 2000;           // total iteration budget
  double continuation_factor = 0.25;      // geometric decrease of mu between stages
  double continuation_start_scale = 1.0;  // first stage mu = scale * ||P_Omega(Y)||

  void validate() const;
};

struct SolverReport {
  DenseMatrix m_hat;
  std::size_t iterations = 0;
  double final_mu = 0.0;
  double data_residual = 0.0;  // ||P_Omega(M_hat - Y)||_F
  double optimality_residual = 0.0;  // distance of -grad to mu * subdifferential
  std::vector<double> objective_trace;
  bool converged = true;
  bool unsampled_line = false;
  bool bracket_failure = false;  // constrained solve could not hit the target residual
  std::string note;
};

/// Singular-value soft-thresholding: U diag(max(sigma - tau, 0)) V^T,
/// the proximal operator of tau * nuclear norm.
DenseMatrix svt(const DenseMatrix& x, double tau);

/// Proximal gradient with continuation for
///   min 0.5 ||P_Omega(X - Y)||_F^2 + mu ||X||_*.
/// y_omega must be supported on omega. Continuation decreases the threshold
/// geometrically from continuation_start_scale * ||P_Omega(Y)|| down to
/// opts.mu; each stage ends when the relative iterate change drops below
/// rel_tol, the last stage additionally once first-order optimality holds to
/// 1e-3 * mu. Exceeding max_iters flags the report instead of throwing.
SolverReport solve_regularized(const DenseMatrix& y_omega, const ObservationSet& omega,
                               const SolverOptions& opts);

/// Same, warm-started from x0 (continuation skipped; used by the
/// constrained wrapper's bisection).
SolverReport solve_regularized(const DenseMatrix& y_omega, const ObservationSet& omega,
                               const SolverOptions& opts, const DenseMatrix& x0);

/// Minimum nuclear norm subject to ||P_Omega(X - Y)||_F <= delta, via
/// bisection on mu with warm starts. Returns M_hat = 0 when the zero matrix
/// is feasible. Residual matched to delta within 1% relative (30 steps max).
SolverReport solve_constrained(const DenseMatrix& y_omega, const ObservationSet& omega,
                               double delta, SolverOptions opts = {});

/// The regularization heuristic: sqrt(2 n p) * sigma for square matrices
/// (the random-matrix limit of ||P_Omega(Z)||/sqrt(n)), and
/// (sqrt(n1) + sqrt(n2)) * sqrt(p) * sigma for rectangular ones;
/// p = m/(n1*n2).
double choose_mu(std::size_t n1, std::size_t n2, std::size_t m, double sigma);

/// Worst-case recovery guarantee 4*sqrt(C_p*min(n1,n2)/p)*delta + 2*delta
/// with C_p = 2 + p.
double stability_bound(double p, std::size_t n1, std::size_t n2, double delta);

struct ConeTubeDiagnostics {
  double cone_slack = 0.0;  // ||M||_* - ||M_hat||_*, >= 0 when M is feasible
  double tube_value = 0.0;  // ||P_Omega(M_hat - M)||_F, <= 2*delta when M is feasible
};

ConeTubeDiagnostics diagnostics_cone_tube(const DenseMatrix& m, const DenseMatrix& m_hat,
                                          const DenseMatrix& y_omega,
                                          const ObservationSet& omega, double delta);

}  // namespace mc
