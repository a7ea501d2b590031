#include "mc/oracle.hpp"

#include <cmath>
#include <functional>

#include "mc/errors.hpp"
#include "mc/rng.hpp"
#include "mc/svd.hpp"

namespace mc {

namespace {

using Projector = std::function<DenseMatrix(const DenseMatrix&)>;

DenseMatrix cg_solve(const Projector& project, const ObservationSet& omega,
                     const DenseMatrix& rhs, double rel_tol, std::size_t max_iters) {
  DenseMatrix x(rhs.rows(), rhs.cols());
  DenseMatrix r = project(rhs);
  const double b_norm = frobenius_norm(r);
  if (b_norm == 0.0) return x;
  DenseMatrix p = r;
  double rs = inner_product(r, r);
  for (std::size_t it = 0; it < max_iters; ++it) {
    if (std::sqrt(rs) <= rel_tol * b_norm) return x;
    const DenseMatrix q = project(project_omega(project(p), omega));
    const double pq = inner_product(p, q);
    if (!(pq > 0.0)) throw IllPosedError("oracle: normal operator is singular on the fit space");
    const double alpha = rs / pq;
    x += alpha * p;
    r -= alpha * q;
    const double rs_new = inner_product(r, r);
    p *= rs_new / rs;
    p += r;
    rs = rs_new;
  }
  throw NumericalError("oracle: CG did not reach tolerance");
}

}  // namespace

OracleReport oracle_least_squares(const DenseMatrix& y_omega, const ObservationSet& omega,
                                  const TangentSpace& t, const OracleOptions& opts) {
  if (y_omega.rows() != omega.rows() || y_omega.cols() != omega.cols() ||
      y_omega.rows() != t.n1() || y_omega.cols() != t.n2())
    throw DimensionError("oracle_least_squares: shape mismatch");

  Projector project;
  std::size_t df;
  if (opts.row_space_only) {
    // T0 = {X : every row in span(V)}: P_T0(X) = X V V^T, dim = n1 * r.
    project = [&t](const DenseMatrix& x) {
      return multiply_a_bt(multiply(x, t.v()), t.v());
    };
    df = t.n1() * t.rank();
  } else {
    project = [&t](const DenseMatrix& x) { return t.project(x); };
    df = t.dimension();
  }

  const std::size_t cap = 10 * t.dimension() + 100;
  OracleReport report;
  report.m_oracle = cg_solve(project, omega, y_omega, opts.cg_rel_tol, cap);
  report.df = t.dimension();
  if (opts.ground_truth) {
    DenseMatrix diff = report.m_oracle;
    diff -= *opts.ground_truth;
    report.error_frobenius = frobenius_norm(diff);
  }
  if (opts.sigma > 0.0)
    report.predicted_rms =
        oracle_rms_estimate(t.n1(), t.n2(), t.rank(), omega.count(), opts.sigma);
  return report;
}

DenseMatrix adversarial_noise(const TangentSpace& t, const ObservationSet& omega,
                              double delta) {
  if (delta < 0.0) throw ParameterError("adversarial_noise: delta must be nonnegative");
  if (delta == 0.0) return DenseMatrix(t.n1(), t.n2());

  // Minimal eigenvector of A*A = P_T P_Omega P_T by inverse power iteration;
  // each step is one CG solve on T.
  Projector project = [&t](const DenseMatrix& x) { return t.project(x); };
  const std::size_t cap = 10 * t.dimension() + 100;

  CounterRng gen(RngSeed{0xADE5ULL, 0});
  DenseMatrix g(t.n1(), t.n2());
  for (std::size_t i = 0; i < t.n1(); ++i)
    for (std::size_t j = 0; j < t.n2(); ++j) g(i, j) = gen.next_gaussian();
  DenseMatrix x = t.project(g);
  double nx = frobenius_norm(x);
  if (nx == 0.0) throw NumericalError("adversarial_noise: degenerate start");
  x *= 1.0 / nx;

  double rayleigh = 0.0;
  bool converged = false;
  for (std::size_t it = 0; it < 500; ++it) {
    DenseMatrix y = cg_solve(project, omega, x, 1e-10, cap);
    const double ny = frobenius_norm(y);
    if (ny == 0.0) throw NumericalError("adversarial_noise: inverse iteration broke down");
    y *= 1.0 / ny;
    const DenseMatrix ay = t.project(project_omega(t.project(y), omega));
    const double rho = inner_product(y, ay);
    x = std::move(y);
    if (it > 0 && std::fabs(rho - rayleigh) <= 1e-6 * std::max(rho, 1e-30)) {
      rayleigh = rho;
      converged = true;
      break;
    }
    rayleigh = rho;
  }
  if (!converged)
    throw NumericalError("adversarial_noise: eigenvector iteration did not converge");
  if (rayleigh <= 0.0)
    throw IllPosedError("adversarial_noise: normal operator is singular");

  // Z = delta * lambda_min^{-1/2} * A(z'); rescaled to hit ||Z||_F = delta
  // exactly (the CG/eigen tolerances would otherwise leave a 1e-6 slack).
  DenseMatrix z = project_omega(t.project(x), omega);
  const double nz = frobenius_norm(z);
  if (nz == 0.0) throw IllPosedError("adversarial_noise: eigenvector maps to zero on Omega");
  z *= delta / nz;
  return z;
}

double oracle_rms_estimate(std::size_t n1, std::size_t n2, std::size_t r, std::size_t m,
                           double sigma) {
  if (m == 0) throw ParameterError("oracle_rms_estimate: m must be positive");
  if (sigma < 0.0) throw ParameterError("oracle_rms_estimate: sigma must be nonnegative");
  const double df = static_cast<double>(r) * (static_cast<double>(n1 + n2) - static_cast<double>(r));
  return sigma * std::sqrt(df / static_cast<double>(m));
}

}  // namespace mc
