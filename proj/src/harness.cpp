#include "mc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "mc/errors.hpp"
#include "mc/io.hpp"
#include "mc/model.hpp"
#include "mc/oracle.hpp"
#include "mc/rng.hpp"
#include "mc/subspace.hpp"
#include "mc/svd.hpp"

namespace mc {

namespace {

using json = nlohmann::ordered_json;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Population standard deviation; verify_aggregates recomputes the same form.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

json trial_to_json(const TrialResult& t) {
  return json{{"stream", t.stream},
              {"omega_count", t.omega_count},
              {"delta_realized", t.delta_realized},
              {"error_frobenius", t.error_frobenius},
              {"rms_error", t.rms_error},
              {"oracle_rms", t.oracle_rms},
              {"oracle_estimate", t.oracle_estimate},
              {"ratio_vs_estimate", t.ratio_vs_estimate},
              {"stability_bound", t.stability_bound_value},
              {"stability_ok", t.stability_ok},
              {"mu", t.mu},
              {"data_residual", t.data_residual},
              {"iterations", t.iterations},
              {"converged", t.converged},
              {"resampled", t.resampled}};  // wall-clock time stays out of the
                                            // record so records are reproducible
}

json aggregate_of(const std::vector<TrialResult>& trials) {
  std::vector<double> rms, ratio, orms;
  std::size_t violations = 0;
  for (const auto& t : trials) {
    rms.push_back(t.rms_error);
    ratio.push_back(t.ratio_vs_estimate);
    orms.push_back(t.oracle_rms);
    if (!t.stability_ok) ++violations;
  }
  return json{{"mean_rms", mean_of(rms)},       {"std_rms", std_of(rms)},
              {"mean_ratio", mean_of(ratio)},   {"std_ratio", std_of(ratio)},
              {"mean_oracle_rms", mean_of(orms)}, {"std_oracle_rms", std_of(orms)},
              {"stability_violations", violations}};
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"n1", c.n1},
         {"n2", c.n2},
         {"rank", c.rank},
         {"sampling", to_string(c.sampling)},
         {"fraction", c.fraction},
         {"noise_std", c.noise_std},
         {"trials", c.trials},
         {"base_seed", c.base_seed},
         {"solver",
          json{{"step", c.solver.step},
               {"rel_tol", c.solver.rel_tol},
               {"max_iters", c.solver.max_iters},
               {"continuation_factor", c.solver.continuation_factor},
               {"continuation_start_scale", c.solver.continuation_start_scale}}},
         {"axis", to_string(c.axis)},
         {"grid", c.grid}};
  if (c.sample_count) j["sample_count"] = *c.sample_count;
  if (c.mu_override) j["mu_override"] = *c.mu_override;
  if (c.factor_std) j["factor_std"] = *c.factor_std;
  return j;
}

}  // namespace

std::string to_string(SamplingModel m) {
  return m == SamplingModel::UniformM ? "uniform-m" : "bernoulli-p";
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::N: return "n";
    case SweepAxis::P: return "p";
    case SweepAxis::R: return "r";
    default: return "none";
  }
}

std::size_t ExperimentConfig::effective_m() const {
  if (sample_count) return *sample_count;
  return static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n1) * static_cast<double>(n2)));
}

void ExperimentConfig::validate() const {
  if (n1 == 0 || n2 == 0) throw ParameterError("config: empty shape");
  if (rank < 1 || rank >= std::min(n1, n2))
    throw ParameterError("config: rank must be in [1, min(n1,n2))");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ParameterError("config: fraction must be in (0,1]");
  if (noise_std < 0.0) throw ParameterError("config: noise_std must be nonnegative");
  if (trials < 1) throw ParameterError("config: trials must be >= 1");
  const std::size_t df = rank * (n1 + n2 - rank);
  if (effective_m() <= df)
    throw ParameterError("config: m <= df = r(n1+n2-r); the rank grid point is infeasible");
  if (axis == SweepAxis::None) return;
  if (grid.empty()) throw ParameterError("config: sweep grid must be nonempty");
  for (double g : grid) {
    if (!(g > 0.0)) throw ParameterError("config: grid values must be positive");
    if (axis == SweepAxis::R) {
      const auto r = static_cast<std::size_t>(g);
      if (r < 1 || r >= std::min(n1, n2))
        throw ParameterError("config: rank grid point out of range");
      const std::size_t dfr = r * (n1 + n2 - r);
      if (effective_m() <= dfr)
        throw ParameterError("config: rank grid point has m <= df (infeasible)");
    }
  }
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index,
                      bool with_oracle) {
  const auto t_start = std::chrono::steady_clock::now();
  TrialResult out;

  const double factor_std = cfg.factor_std.value_or(default_factor_std(cfg.n1, cfg.n2));
  LowRankInstance instance;
  std::optional<ObservationSet> omega;
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt >= 64)
      throw NumericalError("run_trial: could not sample Omega covering every line");
    const std::uint64_t stream =
        derive_stream(cfg.base_seed, trial_index + attempt * 1000003ULL);
    instance = gen_low_rank(cfg.n1, cfg.n2, cfg.rank, factor_std, RngSeed{stream, 0});
    if (cfg.sampling == SamplingModel::UniformM)
      omega = sample_uniform(cfg.n1, cfg.n2, cfg.effective_m(), RngSeed{stream, 1});
    else
      omega = sample_bernoulli(cfg.n1, cfg.n2, cfg.fraction, RngSeed{stream, 2});
    out.stream = stream;
    if (!omega->has_unsampled_line()) break;
    out.resampled = true;
  }

  const NoisyObservations noisy =
      add_noise(instance.m, *omega, cfg.noise_std, RngSeed{out.stream, 3});
  out.omega_count = omega->count();
  out.delta_realized = noisy.delta;

  const double p_hat = omega->fraction();
  double mu = cfg.mu_override.value_or(
      choose_mu(cfg.n1, cfg.n2, omega->count(), cfg.noise_std));
  if (mu <= 0.0) mu = 1e-9 * std::max(1.0, frobenius_norm(noisy.y_omega));
  out.mu = mu;

  SolverOptions opts = cfg.solver;
  opts.mu = mu;
  SolverReport solve = solve_regularized(noisy.y_omega, *omega, opts);
  if (!solve.converged) {
    opts.max_iters *= 2;
    solve = solve_regularized(noisy.y_omega, *omega, opts);
  }
  out.iterations = solve.iterations;
  out.converged = solve.converged;
  out.data_residual = solve.data_residual;

  DenseMatrix err = solve.m_hat;
  err -= instance.m;
  out.error_frobenius = frobenius_norm(err);
  out.rms_error = out.error_frobenius /
                  std::sqrt(static_cast<double>(cfg.n1) * static_cast<double>(cfg.n2));

  out.oracle_estimate =
      oracle_rms_estimate(cfg.n1, cfg.n2, cfg.rank, omega->count(), cfg.noise_std);
  out.ratio_vs_estimate =
      out.oracle_estimate > 0.0 ? out.rms_error / out.oracle_estimate : 0.0;

  if (with_oracle) {
    const TangentSpace t = TangentSpace::from_matrix(instance.m);
    OracleOptions oopts;
    oopts.ground_truth = &instance.m;
    oopts.sigma = cfg.noise_std;
    const OracleReport oracle = oracle_least_squares(noisy.y_omega, *omega, t, oopts);
    out.oracle_rms = *oracle.error_frobenius /
                     std::sqrt(static_cast<double>(cfg.n1) * static_cast<double>(cfg.n2));
  }

  if (cfg.noise_std > 0.0) {
    out.stability_bound_value = stability_bound(p_hat, cfg.n1, cfg.n2, noisy.delta);
    out.stability_ok = out.error_frobenius <= out.stability_bound_value;
  }

  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

namespace {

json run_point(const ExperimentConfig& cfg, double axis_value, double m_over_df,
               bool with_oracle) {
  std::vector<TrialResult> trials;
  trials.reserve(cfg.trials);
  for (std::size_t i = 0; i < cfg.trials; ++i)
    trials.push_back(run_trial(cfg, i, with_oracle));
  json jt = json::array();
  for (const auto& t : trials) jt.push_back(trial_to_json(t));
  return json{{"axis_value", axis_value}, {"n1", cfg.n1},
              {"n2", cfg.n2},             {"rank", cfg.rank},
              {"m", cfg.effective_m()},   {"m_over_df", m_over_df},
              {"trials", std::move(jt)},  {"aggregate", aggregate_of(trials)}};
}

}  // namespace

ExperimentRecord run_table1(std::uint64_t base_seed, const std::vector<std::size_t>& ns,
                            std::size_t trials) {
  ExperimentRecord record;
  record.kind = "table1";
  record.points = json::array();
  json means;
  for (std::size_t n : ns) {
    ExperimentConfig cfg;
    cfg.n1 = cfg.n2 = n;
    cfg.rank = 2;
    cfg.fraction = 0.2;
    cfg.noise_std = 1.0;
    cfg.trials = trials;
    cfg.base_seed = base_seed;
    cfg.validate();
    const double df = static_cast<double>(cfg.rank * (2 * n - cfg.rank));
    json point = run_point(cfg, static_cast<double>(n),
                           static_cast<double>(cfg.effective_m()) / df, true);
    means[std::to_string(n)] = point["aggregate"]["mean_rms"];
    record.points.push_back(std::move(point));
    if (record.config.is_null()) record.config = config_to_json(cfg);
  }
  record.config["ns"] = ns;
  record.summary = json{{"mean_rms_by_n", means}};
  return record;
}

ExperimentRecord run_figure2_sweep(SweepAxis axis, ExperimentConfig cfg) {
  if (axis == SweepAxis::None) throw ParameterError("sweep: axis must be n, p, or r");
  cfg.axis = axis;
  if (cfg.grid.empty()) {
    switch (axis) {
      case SweepAxis::P: cfg.grid = {2, 3, 4, 5, 6, 8, 10}; break;  // m/df targets
      case SweepAxis::N: cfg.grid = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000}; break;
      case SweepAxis::R: cfg.grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; break;
      default: break;
    }
  }

  ExperimentRecord record;
  record.kind = "sweep-" + to_string(axis);
  record.points = json::array();

  for (double g : cfg.grid) {
    ExperimentConfig point_cfg = cfg;
    point_cfg.axis = SweepAxis::None;
    point_cfg.grid.clear();
    double axis_value = g;
    if (axis == SweepAxis::P) {
      const std::size_t df = point_cfg.rank * (point_cfg.n1 + point_cfg.n2 - point_cfg.rank);
      const auto m = static_cast<std::size_t>(std::llround(g * static_cast<double>(df)));
      if (m > point_cfg.n1 * point_cfg.n2)
        throw ParameterError("sweep: m/df target exceeds the full grid");
      point_cfg.sample_count = m;
      point_cfg.fraction = static_cast<double>(m) /
                           (static_cast<double>(point_cfg.n1) * static_cast<double>(point_cfg.n2));
    } else if (axis == SweepAxis::N) {
      point_cfg.n1 = point_cfg.n2 = static_cast<std::size_t>(g);
    } else {
      point_cfg.rank = static_cast<std::size_t>(g);
    }
    point_cfg.validate();
    const double df = static_cast<double>(
        point_cfg.rank * (point_cfg.n1 + point_cfg.n2 - point_cfg.rank));
    record.points.push_back(run_point(point_cfg, axis_value,
                                      static_cast<double>(point_cfg.effective_m()) / df,
                                      true));
  }
  record.config = config_to_json(cfg);

  double worst_ratio = 0.0;
  std::vector<double> mean_ratios;
  for (const auto& point : record.points) {
    for (const auto& t : point["trials"])
      worst_ratio = std::max(worst_ratio, t["ratio_vs_estimate"].get<double>());
    mean_ratios.push_back(point["aggregate"]["mean_ratio"].get<double>());
  }
  record.summary = json{{"worst_ratio_vs_estimate", worst_ratio},
                        {"mean_ratio_by_point", mean_ratios}};
  return record;
}

DenseMatrix ingest_csv(const std::string& path) {
  CsvMatrix csv = read_csv_matrix(path);
  if (!csv.missing.empty())
    throw IoError(path + ": missing entry at row " + std::to_string(csv.missing[0].first) +
                  ", column " + std::to_string(csv.missing[0].second) +
                  " (a full matrix is required here)");
  return std::move(csv.values);
}

namespace {

// Robust noise-scale guess: median absolute residual against a rank-2 fit of
// the inflated zero-filled observations, scaled to a Gaussian sigma.
double estimate_noise_scale(const DenseMatrix& y_omega, const ObservationSet& omega) {
  const double p = omega.fraction();
  DenseMatrix inflated = y_omega;
  inflated *= 1.0 / p;
  auto f = svd(inflated);
  const DenseMatrix fit =
      f.reconstruct(f.singular_values.size() > 2 ? f.singular_values[2] : 0.0);
  std::vector<double> abs_res;
  abs_res.reserve(omega.count());
  for (const auto& [i, j] : omega.indices())
    abs_res.push_back(std::fabs(y_omega(i, j) - fit(i, j)));
  std::nth_element(abs_res.begin(), abs_res.begin() + abs_res.size() / 2, abs_res.end());
  const double med = abs_res[abs_res.size() / 2];
  return 1.4826 * med;
}

}  // namespace

ExperimentRecord run_real_data(const std::string& matrix_file, double observe_fraction,
                               std::optional<double> mu_override, std::uint64_t base_seed) {
  if (!(observe_fraction > 0.0 && observe_fraction <= 1.0))
    throw ParameterError("run_real_data: observe_fraction must be in (0,1]");
  const DenseMatrix m = ingest_csv(matrix_file);
  const std::size_t n1 = m.rows(), n2 = m.cols();
  const auto m_count = static_cast<std::size_t>(
      std::llround(observe_fraction * static_cast<double>(n1) * static_cast<double>(n2)));
  const std::uint64_t stream = derive_stream(base_seed, 0);
  const ObservationSet omega = sample_uniform(n1, n2, m_count, RngSeed{stream, 1});
  const DenseMatrix y_omega = project_omega(m, omega);

  double mu = 0.0;
  double sigma_hat = 0.0;
  json cv_info;
  if (mu_override) {
    mu = *mu_override;
  } else {
    sigma_hat = estimate_noise_scale(y_omega, omega);
    const double mu_center =
        std::max(choose_mu(n1, n2, omega.count(), std::max(sigma_hat, 1e-12)),
                 1e-6 * spectral_norm(y_omega, 1e-6));
    // 5-fold entry holdout over 10 log-spaced candidates around the heuristic.
    std::vector<double> grid;
    for (int k = 0; k < 10; ++k)
      grid.push_back(mu_center * std::pow(10.0, -1.5 + 3.0 * k / 9.0));

    auto indices = omega.indices();
    CounterRng shuffler(RngSeed{stream, 7});
    for (std::size_t k = indices.size(); k > 1; --k)
      std::swap(indices[k - 1], indices[shuffler.next_below(k)]);

    double best_err = 0.0;
    bool first = true;
    json cv_errs = json::array();
    for (double candidate : grid) {
      double cv_err = 0.0;
      for (int fold = 0; fold < 5; ++fold) {
        std::vector<std::pair<std::size_t, std::size_t>> train;
        train.reserve(indices.size());
        for (std::size_t k = 0; k < indices.size(); ++k)
          if (static_cast<int>(k % 5) != fold) train.push_back(indices[k]);
        const ObservationSet omega_train(n1, n2, std::move(train));
        SolverOptions opts;
        opts.mu = candidate;
        const SolverReport rep =
            solve_regularized(project_omega(m, omega_train), omega_train, opts);
        for (std::size_t k = fold; k < indices.size(); k += 5) {
          const auto& [i, j] = indices[k];
          const double d = rep.m_hat(i, j) - m(i, j);
          cv_err += d * d;
        }
      }
      cv_errs.push_back(json{{"mu", candidate}, {"holdout_sse", cv_err}});
      if (first || cv_err < best_err) {
        best_err = cv_err;
        mu = candidate;
        first = false;
      }
    }
    cv_info = json{{"sigma_hat", sigma_hat}, {"candidates", cv_errs}};
  }

  SolverOptions opts;
  opts.mu = mu;
  const SolverReport rep = solve_regularized(y_omega, omega, opts);
  DenseMatrix err = rep.m_hat;
  err -= m;
  const double m_norm = frobenius_norm(m);
  const double rel_error = m_norm > 0.0 ? frobenius_norm(err) / m_norm : 0.0;

  // Truncated-SVD baselines with full knowledge of M.
  auto f = svd(m);
  json baselines;
  for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{10}}) {
    if (k > f.singular_values.size()) break;
    double tail_sq = 0.0;
    for (std::size_t s = k; s < f.singular_values.size(); ++s)
      tail_sq += f.singular_values[s] * f.singular_values[s];
    baselines["rank_" + std::to_string(k)] =
        m_norm > 0.0 ? std::sqrt(tail_sq) / m_norm : 0.0;
  }

  ExperimentRecord record;
  record.kind = "real";
  record.config = json{{"matrix_file", matrix_file},
                       {"rows", n1},
                       {"cols", n2},
                       {"observe_fraction", observe_fraction},
                       {"base_seed", base_seed}};
  if (mu_override) record.config["mu_override"] = *mu_override;
  record.points = json::array();
  record.points.push_back(json{{"mu_used", mu},
                               {"omega_count", omega.count()},
                               {"relative_error", rel_error},
                               {"data_residual", rep.data_residual},
                               {"iterations", rep.iterations},
                               {"converged", rep.converged},
                               {"truncated_svd_baselines", baselines}});
  if (!cv_info.is_null()) record.points.back()["cross_validation"] = cv_info;
  record.summary = json{{"relative_error", rel_error}};
  return record;
}

nlohmann::ordered_json ExperimentRecord::to_json() const {
  return json{{"schema_version", kSchemaVersion},
              {"kind", kind},
              {"config", config},
              {"points", points},
              {"summary", summary}};
}

bool ExperimentRecord::verify_aggregates(const nlohmann::ordered_json& record, double tol) {
  if (!record.contains("points")) return false;
  for (const auto& point : record["points"]) {
    if (!point.contains("trials") || !point.contains("aggregate")) continue;
    std::vector<double> rms, ratio, orms;
    for (const auto& t : point["trials"]) {
      rms.push_back(t["rms_error"].get<double>());
      ratio.push_back(t["ratio_vs_estimate"].get<double>());
      orms.push_back(t["oracle_rms"].get<double>());
    }
    const auto& agg = point["aggregate"];
    if (std::fabs(agg["mean_rms"].get<double>() - mean_of(rms)) > tol) return false;
    if (std::fabs(agg["std_rms"].get<double>() - std_of(rms)) > tol) return false;
    if (std::fabs(agg["mean_ratio"].get<double>() - mean_of(ratio)) > tol) return false;
    if (std::fabs(agg["mean_oracle_rms"].get<double>() - mean_of(orms)) > tol) return false;
  }
  return true;
}

bool ExperimentRecord::any_stability_violation() const {
  for (const auto& point : points) {
    if (!point.contains("aggregate")) continue;
    if (point["aggregate"].value("stability_violations", 0) > 0) return true;
  }
  return false;
}

void write_results(const ExperimentRecord& record, const std::string& path) {
  const auto now_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
  json file{{"record", record.to_json()}, {"written_at_unix_ms", now_ms}};
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << file.dump(2) << "\n";
  if (!out) throw IoError(path + ": write failed");

  if (record.kind.rfind("sweep-", 0) == 0 || record.kind == "table1") {
    std::ofstream tsv(path + ".tsv");
    if (!tsv) throw IoError(path + ".tsv: cannot open for writing");
    tsv << "# x\tmean_rms\tstd_rms\toracle_rms_x1.68\testimate_x1.68\n";
    for (const auto& point : record.points) {
      const auto& agg = point["aggregate"];
      tsv << format_double(point["axis_value"].get<double>()) << "\t"
          << format_double(agg["mean_rms"].get<double>()) << "\t"
          << format_double(agg["std_rms"].get<double>()) << "\t"
          << format_double(1.68 * agg["mean_oracle_rms"].get<double>()) << "\t"
          << format_double(1.68 * point["trials"][0]["oracle_estimate"].get<double>())
          << "\n";
    }
    if (!tsv) throw IoError(path + ".tsv: write failed");
  }
}

}  // namespace mc
