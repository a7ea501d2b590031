#include "mc/subspace.hpp"

#include <cmath>

#include "mc/errors.hpp"
#include "mc/rng.hpp"
#include "mc/svd.hpp"

namespace mc {

namespace {

void check_orthonormal(const DenseMatrix& basis, const char* name) {
  const DenseMatrix gram = multiply_at_b(basis, basis);
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = 0; j < gram.cols(); ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      if (std::fabs(gram(i, j) - target) > 1e-10)
        throw ParameterError(std::string("TangentSpace: ") + name +
                             " does not have orthonormal columns");
    }
}

}  // namespace

TangentSpace::TangentSpace(DenseMatrix u, DenseMatrix v) : u_(std::move(u)), v_(std::move(v)) {
  if (u_.cols() != v_.cols()) throw DimensionError("TangentSpace: U and V rank mismatch");
  if (u_.cols() == 0 || u_.cols() > u_.rows() || v_.cols() > v_.rows())
    throw ParameterError("TangentSpace: invalid rank");
  check_orthonormal(u_, "U");
  check_orthonormal(v_, "V");
}

TangentSpace TangentSpace::from_matrix(const DenseMatrix& m, double rank_tol) {
  if (frobenius_norm(m) == 0.0)
    throw ParameterError("TangentSpace::from_matrix: zero matrix has no tangent space");
  auto f = svd(m);
  const std::size_t r = f.numerical_rank(rank_tol);
  DenseMatrix u(m.rows(), r), v(m.cols(), r);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) u(i, k) = f.u(i, k);
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t k = 0; k < r; ++k) v(j, k) = f.v(j, k);
  return TangentSpace(std::move(u), std::move(v));
}

DenseMatrix TangentSpace::project(const DenseMatrix& x) const {
  if (x.rows() != n1() || x.cols() != n2())
    throw DimensionError("TangentSpace::project: shape mismatch");
  // P_U X + X P_V - P_U X P_V with P_U = U U^T, P_V = V V^T, all as
  // rank-r products: O(n^2 r).
  const DenseMatrix utx = multiply_at_b(u_, x);          // r x n2
  const DenseMatrix pu_x = multiply(u_, utx);            // n1 x n2
  const DenseMatrix xv = multiply(x, v_);                // n1 x r
  const DenseMatrix x_pv = multiply_a_bt(xv, v_);        // n1 x n2
  const DenseMatrix utxv = multiply(utx, v_);            // r x r
  const DenseMatrix pu_x_pv = multiply_a_bt(multiply(u_, utxv), v_);
  DenseMatrix out = pu_x;
  out += x_pv;
  out -= pu_x_pv;
  return out;
}

DenseMatrix TangentSpace::project_perp(const DenseMatrix& x) const {
  DenseMatrix out = x;
  out -= project(x);
  return out;
}

DenseMatrix TangentSpace::sign_matrix() const { return multiply_a_bt(u_, v_); }

DenseMatrix apply_pt_pomega_pt(const TangentSpace& t, const ObservationSet& omega,
                               const DenseMatrix& x) {
  return t.project(project_omega(t.project(x), omega));
}

namespace {

// Deterministic nonzero starting element of T.
DenseMatrix power_start(const TangentSpace& t) {
  CounterRng gen(RngSeed{0xA11CEULL, 0});
  DenseMatrix g(t.n1(), t.n2());
  for (std::size_t i = 0; i < t.n1(); ++i)
    for (std::size_t j = 0; j < t.n2(); ++j) g(i, j) = gen.next_gaussian();
  DenseMatrix x = t.project(g);
  const double nx = frobenius_norm(x);
  if (nx == 0.0) throw NumericalError("isometry_bounds: degenerate start element");
  x *= 1.0 / nx;
  return x;
}

// Largest eigenvalue (Rayleigh quotient) of a PSD operator on T.
template <typename Op>
double power_largest(const TangentSpace& t, Op&& apply, double tol, std::size_t max_iters) {
  DenseMatrix x = power_start(t);
  double rho = 0.0;
  double prev_change = -1.0;
  std::size_t stable = 0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    DenseMatrix y = apply(x);
    const double ny = frobenius_norm(y);
    // Every operator passed here is a composition of orthogonal projections
    // (possibly shifted), so its spectrum lives in [0, 1]; a numerically zero
    // image of a unit vector means the top eigenvalue is zero.
    if (ny <= 1e-13) return 0.0;
    const double rho_new = inner_product(x, y);
    y *= 1.0 / ny;
    const double change = std::fabs(rho_new - rho);
    x = std::move(y);
    rho = rho_new;
    // The Rayleigh sequence converges linearly; estimate the remaining error
    // from the observed contraction ratio (err ~ change * q / (1 - q)).
    double err_est = change;
    if (prev_change > 0.0 && change > 0.0 && change < prev_change) {
      const double q = change / prev_change;
      err_est = change * q / (1.0 - q);
    }
    prev_change = change;
    if (err_est <= tol * std::max(std::fabs(rho), 1e-12)) {
      if (++stable >= 3) return rho;
    } else {
      stable = 0;
    }
  }
  throw NumericalError("power iteration did not converge");
}

}  // namespace

IsometryBounds isometry_bounds(const TangentSpace& t, const ObservationSet& omega,
                               double tol) {
  if (t.n1() != omega.rows() || t.n2() != omega.cols())
    throw DimensionError("isometry_bounds: shape mismatch");
  const std::size_t cap = 200000;
  auto op = [&](const DenseMatrix& x) { return apply_pt_pomega_pt(t, omega, x); };
  const double lambda_max = power_largest(t, op, tol, cap);
  if (lambda_max == 0.0) return IsometryBounds{0.0, 0.0};
  auto shifted = [&](const DenseMatrix& x) {
    DenseMatrix y = t.project(x);
    y *= lambda_max;
    y -= op(x);
    return y;
  };
  const double nu = power_largest(t, shifted, tol, cap);
  return IsometryBounds{lambda_max - nu, lambda_max};
}

DenseMatrix solve_normal_on_t(const TangentSpace& t, const ObservationSet& omega,
                              const DenseMatrix& rhs, double rel_tol,
                              std::size_t max_iters) {
  if (max_iters == 0) max_iters = 10 * t.dimension();
  DenseMatrix x(t.n1(), t.n2());
  DenseMatrix r = t.project(rhs);
  const double b_norm = frobenius_norm(r);
  if (b_norm == 0.0) return x;
  DenseMatrix p = r;
  double rs = inner_product(r, r);
  for (std::size_t it = 0; it < max_iters; ++it) {
    if (std::sqrt(rs) <= rel_tol * b_norm) return x;
    const DenseMatrix q = apply_pt_pomega_pt(t, omega, p);
    const double pq = inner_product(p, q);
    if (!(pq > 0.0))
      throw NumericalError("solve_normal_on_t: operator lost positive definiteness");
    const double alpha = rs / pq;
    x += alpha * p;
    r -= alpha * q;
    const double rs_new = inner_product(r, r);
    p *= rs_new / rs;
    p += r;
    rs = rs_new;
  }
  if (std::sqrt(rs) > rel_tol * b_norm)
    throw NumericalError("solve_normal_on_t: CG did not reach tolerance");
  return x;
}

DenseMatrix build_certificate_candidate(const TangentSpace& t, const ObservationSet& omega,
                                        const DenseMatrix& e) {
  const IsometryBounds bounds = isometry_bounds(t, omega);
  if (bounds.lambda_min <= 1e-8)
    throw IllPosedError("build_certificate_candidate: P_T P_Omega P_T is (numerically) "
                        "singular on T; no certificate expected");
  const DenseMatrix x = solve_normal_on_t(t, omega, e, 1e-8);
  return project_omega(x, omega);
}

CertificateReport verify_certificate(const DenseMatrix& lambda, const TangentSpace& t,
                                     const ObservationSet& omega, const DenseMatrix& e,
                                     double tol) {
  CertificateReport report;
  report.lambda = lambda;
  DenseMatrix off_support = lambda;
  off_support -= project_omega(lambda, omega);
  const double lnorm = frobenius_norm(lambda);
  report.supported_on_omega =
      frobenius_norm(off_support) <= tol * std::max(lnorm, 1e-300);
  DenseMatrix pt_diff = t.project(lambda);
  pt_diff -= e;
  report.pt_residual = frobenius_norm(pt_diff);
  report.ptperp_norm = spectral_norm(t.project_perp(lambda), 1e-8);
  report.satisfies_half = report.ptperp_norm <= 0.5;
  report.satisfies_one = report.ptperp_norm < 1.0;
  return report;
}

double lemma2_gap(const DenseMatrix& m, const TangentSpace& t, const DenseMatrix& lambda,
                  const DenseMatrix& h, const ObservationSet& omega) {
  const double h_on_omega = frobenius_norm(project_omega(h, omega));
  if (h_on_omega > 1e-10 * std::max(1.0, frobenius_norm(h)))
    throw ParameterError("lemma2_gap: H must vanish on Omega");
  const double a = spectral_norm(t.project_perp(lambda), 1e-8);
  DenseMatrix mh = m;
  mh += h;
  const double diff = nuclear_norm(mh) - nuclear_norm(m);
  return diff + (1.0 - a) * nuclear_norm(t.project_perp(h));
}

}  // namespace mc
