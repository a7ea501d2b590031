#include "mc/svd.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "mc/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace mc {

namespace {

// Single BLAS thread: the box is single-core anyway and fixed threading keeps
// results bit-identical between runs.
const bool blas_pinned = [] {
  openblas_set_num_threads(1);
  return true;
}();

void apply_sign_convention(DenseMatrix& u, DenseMatrix& v) {
  const std::size_t k = u.cols();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
      const double a = std::fabs(u(i, col));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (u(arg, col) < 0.0) {
      for (std::size_t i = 0; i < u.rows(); ++i) u(i, col) = -u(i, col);
      for (std::size_t j = 0; j < v.rows(); ++j) v(j, col) = -v(j, col);
    }
  }
}

}  // namespace

DenseMatrix SvdResult::reconstruct(double cutoff) const {
  const std::size_t k = singular_values.size();
  std::size_t keep = 0;
  while (keep < k && singular_values[keep] > cutoff) ++keep;
  DenseMatrix us(u.rows(), keep);
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < keep; ++j) us(i, j) = u(i, j) * singular_values[j];
  DenseMatrix vk(v.rows(), keep);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < keep; ++j) vk(i, j) = v(i, j);
  if (keep == 0) return DenseMatrix(u.rows(), v.rows());
  return multiply_a_bt(us, vk);
}

std::size_t SvdResult::numerical_rank(double rel_tol) const {
  if (singular_values.empty() || singular_values[0] <= 0.0) return 0;
  const double cut = rel_tol * singular_values[0];
  std::size_t r = 0;
  while (r < singular_values.size() && singular_values[r] > cut) ++r;
  return r;
}

SvdResult svd(const DenseMatrix& x) {
  x.check_finite("svd input");
  const int m = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  const int k = std::min(m, n);
  if (k == 0) throw DimensionError("svd: empty matrix");

  std::vector<double> a(x.entries().begin(), x.entries().end());
  std::vector<double> s(k);
  std::vector<double> u(static_cast<std::size_t>(m) * k);
  std::vector<double> vt(static_cast<std::size_t>(k) * n);

  int info = LAPACKE_dgesdd(LAPACK_ROW_MAJOR, 'S', m, n, a.data(), n, s.data(), u.data(),
                            k, vt.data(), n);
  if (info != 0) {
    // dgesdd occasionally fails on hard cases; retry with the QR-based driver.
    a.assign(x.entries().begin(), x.entries().end());
    std::vector<double> superb(k > 1 ? k - 1 : 1);
    info = LAPACKE_dgesvd(LAPACK_ROW_MAJOR, 'S', 'S', m, n, a.data(), n, s.data(),
                          u.data(), k, vt.data(), n, superb.data());
    if (info != 0) throw NumericalError("svd: LAPACK did not converge");
  }

  SvdResult result;
  result.u = DenseMatrix(static_cast<std::size_t>(m), static_cast<std::size_t>(k),
                         std::move(u));
  result.singular_values = std::move(s);
  // vt is k x n row-major; V is its transpose.
  DenseMatrix v(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < k; ++c) v(j, c) = vt[static_cast<std::size_t>(c) * n + j];
  result.v = std::move(v);
  apply_sign_convention(result.u, result.v);
  return result;
}

double spectral_norm(const DenseMatrix& x, double tol) {
  if (tol <= 0.0) throw ParameterError("spectral_norm: tol must be positive");
  x.check_finite("spectral_norm input");
  const std::size_t n1 = x.rows(), n2 = x.cols();
  if (n1 == 0 || n2 == 0) return 0.0;
  const double fro = frobenius_norm(x);
  if (fro == 0.0) return 0.0;

  auto run = [&](std::vector<double> v) -> double {
    // Power iteration on X^T X: v <- X^T (X v).
    double nv = 0.0;
    for (double c : v) nv += c * c;
    nv = std::sqrt(nv);
    for (double& c : v) c /= nv;
    double sigma = 0.0;
    const std::size_t max_iters = 20000;
    std::vector<double> w(n1);
    for (std::size_t it = 0; it < max_iters; ++it) {
      for (std::size_t i = 0; i < n1; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n2; ++j) s += x(i, j) * v[j];
        w[i] = s;
      }
      double wn = 0.0;
      for (double c : w) wn += c * c;
      const double sigma_new = std::sqrt(wn);
      if (sigma_new == 0.0) return 0.0;  // start vector in the null space
      for (std::size_t j = 0; j < n2; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n1; ++i) s += x(i, j) * w[i];
        v[j] = s;
      }
      double vn = 0.0;
      for (double c : v) vn += c * c;
      vn = std::sqrt(vn);
      if (vn == 0.0) return 0.0;
      for (double& c : v) c /= vn;
      if (std::fabs(sigma_new - sigma) <= tol * sigma_new && it > 0) return sigma_new;
      sigma = sigma_new;
    }
    return sigma;
  };

  std::vector<double> ones(n2, 1.0);
  double sigma = run(ones);
  if (sigma == 0.0) {
    // All-ones start landed in the null space; perturb towards e1.
    std::vector<double> start(n2, 1.0);
    start[0] += 0.5;
    for (std::size_t j = 1; j < n2; ++j) start[j] += 1e-3 * static_cast<double>(j % 7);
    sigma = run(start);
  }
  if (sigma == 0.0 && fro > 0.0) {
    // Degenerate start vectors; fall back to the exact value.
    auto f = svd(x);
    sigma = f.singular_values.empty() ? 0.0 : f.singular_values[0];
  }
  return sigma;
}

double nuclear_norm(const DenseMatrix& x) {
  auto f = svd(x);
  double s = 0.0;
  for (double v : f.singular_values) s += v;
  return s;
}

}  // namespace mc
