#pragma once

#include <vector>

#include "mc/matrix.hpp"

namespace mc {

/// Thin SVD X = U diag(s) V^T with k = min(rows, cols).
/// Columns of U and V are orthonormal; singular values are nonincreasing.
/// Sign convention: the largest-magnitude entry of each left singular vector
/// is nonnegative (ties broken by lowest row index), so results are
/// reproducible run to run.
struct SvdResult {
  DenseMatrix u;                        // n1 x k
  std::vector<double> singular_values;  // length k, nonincreasing
  DenseMatrix v;                        // n2 x k

  /// U * diag(s) * V^T, keeping only singular values strictly above cutoff.
  DenseMatrix reconstruct(double cutoff = -1.0) const;

  /// Number of singular values above rel_tol * sigma_1.
  std::size_t numerical_rank(double rel_tol = 1e-10) const;
};

/// Full (thin) SVD. Throws NumericalError on non-convergence.
SvdResult svd(const DenseMatrix& x);

/// Largest singular value to relative tolerance tol, by power iteration on
/// X^T X with the normalized all-ones start vector (deterministic); restarts
/// from a perturbed e1 if the Rayleigh quotient stagnates at zero.
double spectral_norm(const DenseMatrix& x, double tol = 1e-10);

/// Sum of singular values.
double nuclear_norm(const DenseMatrix& x);

}  // namespace mc
