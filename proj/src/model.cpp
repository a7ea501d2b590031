#include "mc/model.hpp"

#include <algorithm>
#include <cmath>

#include "mc/errors.hpp"
#include "mc/svd.hpp"

namespace mc {

double default_factor_std(std::size_t n1, std::size_t n2) {
  const double n = static_cast<double>(std::min(n1, n2));
  return 20.0 / std::sqrt(n);
}

LowRankInstance gen_low_rank(std::size_t n1, std::size_t n2, std::size_t r,
                             double factor_std, RngSeed rng) {
  if (r < 1 || r > std::min(n1, n2))
    throw ParameterError("gen_low_rank: rank must be in [1, min(n1,n2)]");
  if (!(factor_std > 0.0)) throw ParameterError("gen_low_rank: factor_std must be positive");
  CounterRng gen(rng);
  DenseMatrix left(n1, r), right(n2, r);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t k = 0; k < r; ++k) left(i, k) = factor_std * gen.next_gaussian();
  for (std::size_t j = 0; j < n2; ++j)
    for (std::size_t k = 0; k < r; ++k) right(j, k) = factor_std * gen.next_gaussian();
  return LowRankInstance{multiply_a_bt(left, right), r, factor_std, rng};
}

NoisyObservations add_noise(const DenseMatrix& m, const ObservationSet& omega,
                            double noise_std, RngSeed rng) {
  if (noise_std < 0.0) throw ParameterError("add_noise: noise_std must be nonnegative");
  if (m.rows() != omega.rows() || m.cols() != omega.cols())
    throw DimensionError("add_noise: shape mismatch");
  CounterRng gen(rng);
  DenseMatrix y(m.rows(), m.cols());
  double delta_sq = 0.0;
  for (const auto& [i, j] : omega.indices()) {
    const double z = noise_std > 0.0 ? noise_std * gen.next_gaussian() : 0.0;
    y(i, j) = m(i, j) + z;
    delta_sq += z * z;
  }
  return NoisyObservations{omega, std::move(y), noise_std, std::sqrt(delta_sq)};
}

double delta_estimate(std::size_t m, double sigma) {
  const double md = static_cast<double>(m);
  return std::sqrt((md + std::sqrt(8.0 * md)) * sigma * sigma);
}

namespace {

SvdResult rank_revealing_svd(const DenseMatrix& m, const char* op) {
  if (frobenius_norm(m) == 0.0)
    throw ParameterError(std::string(op) + ": undefined for the zero matrix");
  return svd(m);
}

}  // namespace

double incoherence_mu_B(const DenseMatrix& m) {
  auto f = rank_revealing_svd(m, "incoherence_mu_B");
  const std::size_t r = f.numerical_rank(kRankRelTol);
  const double n1 = static_cast<double>(m.rows());
  const double n2 = static_cast<double>(m.cols());
  double mu = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    double umax = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) umax = std::max(umax, std::fabs(f.u(i, k)));
    for (std::size_t j = 0; j < m.cols(); ++j) vmax = std::max(vmax, std::fabs(f.v(j, k)));
    mu = std::max({mu, n1 * umax * umax, n2 * vmax * vmax});
  }
  return mu;
}

StrongIncoherence strong_incoherence(const DenseMatrix& m) {
  if (m.rows() > 2000 || m.cols() > 2000)
    throw ParameterError("strong_incoherence: capped to dimensions <= 2000 (O(n^2 r) cost)");
  auto f = rank_revealing_svd(m, "strong_incoherence");
  const std::size_t r = f.numerical_rank(kRankRelTol);
  const double rd = static_cast<double>(r);
  const double n1 = static_cast<double>(m.rows());
  const double n2 = static_cast<double>(m.cols());

  // Trim factors to numerical rank; P_U = U U^T evaluated pairwise.
  auto projection_deviation = [&](const DenseMatrix& basis, double n) {
    double worst = 0.0;
    const std::size_t dim = basis.rows();
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a; b < dim; ++b) {
        double dot = 0.0;
        for (std::size_t k = 0; k < r; ++k) dot += basis(a, k) * basis(b, k);
        const double target = (a == b) ? rd / n : 0.0;
        worst = std::max(worst, std::fabs(dot - target));
      }
    }
    return worst * n / std::sqrt(rd);
  };

  StrongIncoherence out;
  out.mu1 = std::max(projection_deviation(f.u, n1), projection_deviation(f.v, n2));

  DenseMatrix u_r(m.rows(), r), v_r(m.cols(), r);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) u_r(i, k) = f.u(i, k);
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t k = 0; k < r; ++k) v_r(j, k) = f.v(j, k);
  const DenseMatrix e = multiply_a_bt(u_r, v_r);
  out.mu2 = max_abs_entry(e) * std::sqrt(n1 * n2 / rd);
  return out;
}

DenseMatrix sign_matrix(const DenseMatrix& m) {
  auto f = rank_revealing_svd(m, "sign_matrix");
  const std::size_t r = f.numerical_rank(kRankRelTol);
  DenseMatrix u_r(m.rows(), r), v_r(m.cols(), r);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) u_r(i, k) = f.u(i, k);
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t k = 0; k < r; ++k) v_r(j, k) = f.v(j, k);
  return multiply_a_bt(u_r, v_r);
}

}  // namespace mc
