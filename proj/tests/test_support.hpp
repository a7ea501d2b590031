#pragma once

// Shared helpers for the test suites: small random inputs and an independent
// dense eigendecomposition route for checking the iterative isometry bounds.

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mc/matrix.hpp"
#include "mc/model.hpp"
#include "mc/rng.hpp"
#include "mc/sampling.hpp"
#include "mc/subspace.hpp"

namespace mc::test {

inline DenseMatrix gaussian_matrix(std::size_t n1, std::size_t n2, RngSeed seed,
                                   double std_dev = 1.0) {
  CounterRng rng(seed);
  DenseMatrix x(n1, n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) x(i, j) = std_dev * rng.next_gaussian();
  return x;
}

inline DenseMatrix random_low_rank(std::size_t n1, std::size_t n2, std::size_t r,
                                   RngSeed seed) {
  return gen_low_rank(n1, n2, r, default_factor_std(n1, n2), seed).m;
}

/// Extends r orthonormal columns to a full n x n orthonormal basis by
/// modified Gram-Schmidt over the identity columns.
inline DenseMatrix complete_orthonormal_basis(const DenseMatrix& u) {
  const std::size_t n = u.rows(), r = u.cols();
  std::vector<std::vector<double>> basis;
  basis.reserve(n);
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = u(i, k);
    basis.push_back(std::move(col));
  }
  for (std::size_t c = 0; c < n && basis.size() < n; ++c) {
    std::vector<double> col(n, 0.0);
    col[c] = 1.0;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += b[i] * col[i];
      for (std::size_t i = 0; i < n; ++i) col[i] -= dot * b[i];
    }
    double norm = 0.0;
    for (double v : col) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // identity column already spanned
    for (double& v : col) v /= norm;
    basis.push_back(std::move(col));
  }
  if (basis.size() != n) throw std::runtime_error("basis completion failed");
  DenseMatrix full(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) full(i, k) = basis[k][i];
  return full;
}

/// All eigenvalues of P_T P_Omega P_T restricted to T, computed by assembling
/// the operator as a dense symmetric matrix in an explicit orthonormal basis
/// of T and calling a dense symmetric eigensolver. Intended for small
/// problems (n1 + n2 <= 200); independent of the power-iteration route.
inline std::vector<double> explicit_isometry_spectrum(const TangentSpace& t,
                                                      const ObservationSet& omega) {
  const std::size_t n1 = t.n1(), n2 = t.n2(), r = t.rank();
  if (n1 + n2 > 200) throw std::runtime_error("explicit spectrum: problem too large");
  const DenseMatrix ub = complete_orthonormal_basis(t.u());
  const DenseMatrix vb = complete_orthonormal_basis(t.v());

  // Basis of T: x_a y_b^T for column pairs with a < r or b < r.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      if (a < r || b < r) pairs.emplace_back(a, b);
  const std::size_t dim = pairs.size();

  // A_kl = sum over Omega of B_k(i,j) B_l(i,j) with B_k(i,j) = x_a(i) y_b(j).
  std::vector<double> a(dim * dim, 0.0);
  for (const auto& [i, j] : omega.indices()) {
    std::vector<double> bval(dim);
    for (std::size_t k = 0; k < dim; ++k)
      bval[k] = ub(i, pairs[k].first) * vb(j, pairs[k].second);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t l = 0; l <= k; ++l) a[k * dim + l] += bval[k] * bval[l];
  }
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t l = k + 1; l < dim; ++l) a[k * dim + l] = a[l * dim + k];

  std::vector<double> w(dim);
  const auto info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'L', static_cast<int>(dim),
                                  a.data(), static_cast<int>(dim), w.data());
  if (info != 0) throw std::runtime_error("dsyev failed");
  return w;  // ascending
}

/// A random perturbation supported entirely off Omega.
inline DenseMatrix random_omega_null(const ObservationSet& omega, RngSeed seed) {
  DenseMatrix h = gaussian_matrix(omega.rows(), omega.cols(), seed);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j)
      if (omega.contains(i, j)) h(i, j) = 0.0;
  return h;
}

}  // namespace mc::test
