#pragma once

#include "mc/matrix.hpp"
#include "mc/sampling.hpp"

namespace mc {

/// The tangent space T of the rank-r manifold at a matrix with column space
/// span(U) and row space span(V): all matrices of the form U X^T + Y V^T.
class TangentSpace {
public:
  /// Validates that U and V have orthonormal columns (within 1e-10).
  TangentSpace(DenseMatrix u, DenseMatrix v);

  /// T built from the singular vectors of M above rank_tol * sigma_1.
  static TangentSpace from_matrix(const DenseMatrix& m, double rank_tol = 1e-10);

  std::size_t n1() const { return u_.rows(); }
  std::size_t n2() const { return v_.rows(); }
  std::size_t rank() const { return u_.cols(); }

  /// dim T = r(n1 + n2 - r).
  std::size_t dimension() const {
    return rank() * (n1() + n2() - rank());
  }

  const DenseMatrix& u() const { return u_; }
  const DenseMatrix& v() const { return v_; }

  /// P_T(X) = P_U X + X P_V - P_U X P_V.
  DenseMatrix project(const DenseMatrix& x) const;

  /// P_{T_perp}(X) = X - P_T(X); the two sum back to X up to roundoff.
  DenseMatrix project_perp(const DenseMatrix& x) const;

  /// E = U V^T.
  DenseMatrix sign_matrix() const;

private:
  DenseMatrix u_, v_;
};

/// The PSD operator P_T P_Omega P_T applied to X.
DenseMatrix apply_pt_pomega_pt(const TangentSpace& t, const ObservationSet& omega,
                               const DenseMatrix& x);

struct IsometryBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Extreme eigenvalues of P_T P_Omega P_T restricted to T. lambda_max by
/// power iteration, lambda_min by power iteration on the shifted operator
/// lambda_max*I - A. Deterministic start element. Compare the results
/// against [p/2, 3p/2]. Throws NumericalError if iteration stalls.
IsometryBounds isometry_bounds(const TangentSpace& t, const ObservationSet& omega,
                               double tol = 1e-8);

/// Conjugate gradient for (P_T P_Omega P_T) X = P_T(rhs) on T.
/// Relative residual tolerance rel_tol; iteration cap 10 * dim(T) unless a
/// smaller cap is given.
DenseMatrix solve_normal_on_t(const TangentSpace& t, const ObservationSet& omega,
                              const DenseMatrix& rhs, double rel_tol = 1e-8,
                              std::size_t max_iters = 0);

/// Least-squares dual-certificate candidate
///   Lambda = P_Omega P_T (P_T P_Omega P_T)^{-1} (E),
/// the minimum-Frobenius-norm matrix supported on Omega with P_T(Lambda) = E
/// (up to CG tolerance). Throws IllPosedError when lambda_min <= 1e-8.
DenseMatrix build_certificate_candidate(const TangentSpace& t, const ObservationSet& omega,
                                        const DenseMatrix& e);

struct CertificateReport {
  DenseMatrix lambda;
  bool supported_on_omega = false;
  double pt_residual = 0.0;   // ||P_T(Lambda) - E||_F
  double ptperp_norm = 0.0;   // ||P_{T_perp}(Lambda)||
  bool satisfies_half = false;  // ptperp_norm <= 1/2
  bool satisfies_one = false;   // ptperp_norm < 1
};

/// Checks the dual-certificate conditions; failed checks are data, not errors.
CertificateReport verify_certificate(const DenseMatrix& lambda, const TangentSpace& t,
                                     const ObservationSet& omega, const DenseMatrix& e,
                                     double tol = 1e-6);

/// Slack of the certificate lower bound on the nuclear norm under an
/// Omega-null perturbation H:
///   (||M+H||_* - ||M||_*) + (1 - ||P_{T_perp}(Lambda)||) ||P_{T_perp}(H)||_*.
/// Nonnegative (within roundoff) whenever Lambda is a valid certificate.
/// Throws ParameterError if H is not Omega-null within 1e-10.
double lemma2_gap(const DenseMatrix& m, const TangentSpace& t, const DenseMatrix& lambda,
                  const DenseMatrix& h, const ObservationSet& omega);

}  // namespace mc
