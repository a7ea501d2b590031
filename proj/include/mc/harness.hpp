#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mc/matrix.hpp"
#include "mc/solver.hpp"

namespace mc {

enum class SamplingModel { UniformM, BernoulliP };
enum class SweepAxis { None, N, P, R };

std::string to_string(SamplingModel m);
std::string to_string(SweepAxis a);

struct ExperimentConfig {
  std::size_t n1 = 600;
  std::size_t n2 = 600;
  std::size_t rank = 2;
  SamplingModel sampling = SamplingModel::UniformM;
  double fraction = 0.2;  // observation fraction p (Bernoulli probability)
  std::optional<std::size_t> sample_count;  // exact m for uniform sampling
  double noise_std = 1.0;
  std::size_t trials = 20;
  std::uint64_t base_seed = 1;
  SolverOptions solver{};
  std::optional<double> mu_override;  // default: choose_mu per trial
  std::optional<double> factor_std;   // default: 20/sqrt(n)
  SweepAxis axis = SweepAxis::None;
  std::vector<double> grid;  // P axis: m/df targets; N axis: sizes; R axis: ranks

  std::size_t effective_m() const;
  void validate() const;  // throws ParameterError on infeasible grids
};

/// One synthetic trial: generate, sample, corrupt, solve, benchmark.
struct TrialResult {
  std::uint64_t stream = 0;
  std::size_t omega_count = 0;
  double delta_realized = 0.0;
  double error_frobenius = 0.0;
  double rms_error = 0.0;  // ||M_hat - M||_F / sqrt(n1*n2)
  double oracle_rms = 0.0;
  double oracle_estimate = 0.0;  // sigma*sqrt(df/m)
  double ratio_vs_estimate = 0.0;
  double stability_bound_value = 0.0;
  bool stability_ok = true;
  double mu = 0.0;
  double data_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  bool resampled = false;
  double seconds = 0.0;
};

/// The persistence unit: configuration echo, per-trial data, aggregates.
struct ExperimentRecord {
  static constexpr int kSchemaVersion = 1;
  std::string kind;
  nlohmann::ordered_json config;
  nlohmann::ordered_json points;  // array of {axis value, trials, aggregates}
  nlohmann::ordered_json summary;

  nlohmann::ordered_json to_json() const;
  /// True when every stored aggregate equals the recomputed mean/std of its
  /// per-trial values.
  static bool verify_aggregates(const nlohmann::ordered_json& record, double tol = 1e-12);
  bool any_stability_violation() const;
};

/// One synthetic trial with everything derived from (base_seed, trial_index).
/// Trials whose Omega misses an entire row/column are resampled on the next
/// stream and flagged.
TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index,
                      bool with_oracle);

/// RMS-vs-n table at p = 0.2, r = 2, sigma = 1, mu = sqrt(2np).
ExperimentRecord run_table1(std::uint64_t base_seed,
                            const std::vector<std::size_t>& ns = {100, 200, 500, 1000},
                            std::size_t trials = 20);

/// Recovery/oracle/estimate curves along one axis (P: m/df grid at fixed n;
/// N: size grid; R: rank grid).
ExperimentRecord run_figure2_sweep(SweepAxis axis, ExperimentConfig cfg);

/// Approximately-low-rank protocol on a user-supplied matrix: subsample,
/// recover with cross-validated (or overridden) mu, compare against
/// truncated-SVD baselines.
ExperimentRecord run_real_data(const std::string& matrix_file, double observe_fraction,
                               std::optional<double> mu_override = std::nullopt,
                               std::uint64_t base_seed = 1);

/// Full matrix from CSV; throws IoError if any field is missing or ragged.
DenseMatrix ingest_csv(const std::string& path);

/// JSON record at `path` (timestamp kept outside the record object so the
/// record itself is byte-reproducible); sweeps also get `path.tsv` plot data
/// with the 1.68x reference curves.
void write_results(const ExperimentRecord& record, const std::string& path);

}  // namespace mc
