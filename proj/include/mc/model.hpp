#pragma once

#include "mc/matrix.hpp"
#include "mc/rng.hpp"
#include "mc/sampling.hpp"

namespace mc {

/// Synthetic ground truth: M = M_L * M_R^T with i.i.d. Gaussian factors.
struct LowRankInstance {
  DenseMatrix m;
  std::size_t rank = 0;
  double factor_std = 0.0;
  RngSeed seed;
};

/// Noisy samples on Omega: Y = P_Omega(M) + P_Omega(Z).
struct NoisyObservations {
  ObservationSet omega;
  DenseMatrix y_omega;  // zero off Omega by construction
  double noise_std = 0.0;
  double delta = 0.0;  // exact ||P_Omega(Z)||_F of the injected noise
};

/// Default factor standard deviation 20/sqrt(n), n = min dimension.
double default_factor_std(std::size_t n1, std::size_t n2);

LowRankInstance gen_low_rank(std::size_t n1, std::size_t n2, std::size_t r,
                             double factor_std, RngSeed rng);

NoisyObservations add_noise(const DenseMatrix& m, const ObservationSet& omega,
                            double noise_std, RngSeed rng);

/// High-probability bound on delta^2 when the noise std is known but the
/// realization is hidden: (m + sqrt(8m)) * sigma^2.
double delta_estimate(std::size_t m, double sigma);

/// Basic incoherence: max over singular vectors (above the numerical-rank
/// cutoff) of max(n1*||u_k||_inf^2, n2*||v_k||_inf^2). Always >= 1.
double incoherence_mu_B(const DenseMatrix& m);

struct StrongIncoherence {
  double mu1 = 0.0;  // smallest mu making both projection displays hold
  double mu2 = 0.0;  // max |E_ab| * sqrt(n1*n2/r)
  double parameter() const { return mu1 > mu2 ? mu1 : mu2; }
};

/// Evaluates the two strong-incoherence displays exactly; O(n^2 r) work,
/// refused above n = 2000 per dimension (the metric is diagnostic only).
StrongIncoherence strong_incoherence(const DenseMatrix& m);

/// E = sum_k u_k v_k^T over singular triples above the rank cutoff.
DenseMatrix sign_matrix(const DenseMatrix& m);

/// Numerical-rank cutoff used throughout: sigma_k > 1e-10 * sigma_1.
inline constexpr double kRankRelTol = 1e-10;

}  // namespace mc
