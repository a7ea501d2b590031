// Command-line front end for the matrix-completion toolkit.
//
// Exit codes: 0 success, 1 error, 2 stability-envelope violation.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "mc/errors.hpp"
#include "mc/harness.hpp"
#include "mc/io.hpp"
#include "mc/model.hpp"
#include "mc/oracle.hpp"
#include "mc/rng.hpp"
#include "mc/sampling.hpp"
#include "mc/solver.hpp"
#include "mc/subspace.hpp"
#include "mc/svd.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitStabilityViolation = 2;

int finish_record(const mc::ExperimentRecord& record, const std::string& out_path) {
  if (!out_path.empty()) mc::write_results(record, out_path);
  std::cout << record.to_json().dump(2) << "\n";
  if (record.any_stability_violation()) {
    std::cerr << "stability envelope violated in at least one trial\n";
    return kExitStabilityViolation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank matrix completion from noisy entries"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file; command-line flags win");

  std::uint64_t seed = 1;
  std::size_t trials = 20;
  std::string out_path;
  app.add_option("--seed", seed, "Base RNG seed")->capture_default_str();
  app.add_option("--trials", trials, "Trials per experiment point")->capture_default_str();
  app.add_option("--out", out_path, "Write the JSON result record here");

  // generate: synthesize a low-rank instance plus noisy observations.
  auto* generate = app.add_subcommand("generate", "Synthesize instance files");
  std::size_t g_n1 = 100, g_n2 = 100, g_rank = 2;
  double g_fraction = 0.2, g_noise = 1.0;
  std::optional<double> g_factor_std;
  std::string g_prefix = "instance";
  generate->add_option("--n1", g_n1)->capture_default_str();
  generate->add_option("--n2", g_n2)->capture_default_str();
  generate->add_option("--rank", g_rank)->capture_default_str();
  generate->add_option("--fraction", g_fraction, "Observed fraction p")->capture_default_str();
  generate->add_option("--noise-std", g_noise)->capture_default_str();
  generate->add_option("--factor-std", g_factor_std, "Factor entry std (default 20/sqrt(n))");
  generate->add_option("--prefix", g_prefix, "Output prefix: <prefix>.truth.csv, <prefix>.obs")
      ->capture_default_str();

  // complete: solve from an observation file.
  auto* complete = app.add_subcommand("complete", "Recover a matrix from an observation file");
  std::string c_obs, c_mode = "reg", c_recovered_out;
  std::optional<double> c_mu, c_delta, c_sigma;
  complete->add_option("--obs", c_obs, "Observation file")->required();
  complete->add_option("--mode", c_mode, "reg | constrained")
      ->check(CLI::IsMember({"reg", "constrained"}))
      ->capture_default_str();
  complete->add_option("--mu", c_mu, "Regularization weight (reg mode)");
  complete->add_option("--delta", c_delta, "Residual budget (constrained mode)");
  complete->add_option("--sigma", c_sigma, "Noise std; used to pick mu/delta when not given");
  complete->add_option("--recovered", c_recovered_out, "Write the recovered matrix CSV here");

  // certify: tangent-space / dual-certificate diagnostics on an instance.
  auto* certify = app.add_subcommand("certify", "Tangent and certificate diagnostics");
  std::string y_truth, y_obs;
  certify->add_option("--truth", y_truth, "Ground-truth matrix CSV")->required();
  certify->add_option("--obs", y_obs, "Observation file")->required();

  // oracle: least-squares baseline on the true tangent space.
  auto* oracle_cmd = app.add_subcommand("oracle", "Oracle least-squares baseline");
  std::string o_truth, o_obs;
  double o_sigma = 0.0;
  bool o_row_space_only = false;
  oracle_cmd->add_option("--truth", o_truth, "Ground-truth matrix CSV")->required();
  oracle_cmd->add_option("--obs", o_obs, "Observation file")->required();
  oracle_cmd->add_option("--sigma", o_sigma, "Noise std for the RMS prediction");
  oracle_cmd->add_flag("--row-space-only", o_row_space_only, "Fit only the row space (T0)");

  // table1: RMS error versus n.
  auto* table1 = app.add_subcommand("table1", "RMS error vs n at p=0.2, r=2, sigma=1");
  std::vector<std::size_t> t_ns = {100, 200, 500, 1000};
  table1->add_option("--n", t_ns, "Sizes to run")->capture_default_str();

  // sweep: figure-style curves along one axis.
  auto* sweep = app.add_subcommand("sweep", "Recovery vs oracle curves along one axis");
  std::string s_axis;
  std::size_t s_n = 600, s_rank = 2;
  double s_fraction = 0.2;
  std::vector<double> s_grid;
  sweep->add_option("--axis", s_axis, "n | p | r")
      ->required()
      ->check(CLI::IsMember({"n", "p", "r"}));
  sweep->add_option("--n", s_n, "Matrix size (fixed axes)")->capture_default_str();
  sweep->add_option("--rank", s_rank, "Rank (fixed axes)")->capture_default_str();
  sweep->add_option("--fraction", s_fraction, "Observed fraction (fixed axes)")
      ->capture_default_str();
  sweep->add_option("--grid", s_grid, "Axis grid (p axis: m/df targets)");

  // real: approximately-low-rank protocol on a user matrix.
  auto* real = app.add_subcommand("real", "Subsample-and-recover a real matrix");
  std::string r_file;
  double r_fraction = 0.3;
  std::optional<double> r_mu;
  real->add_option("--file", r_file, "Full matrix CSV")->required();
  real->add_option("--fraction", r_fraction, "Observed fraction")->capture_default_str();
  real->add_option("--mu", r_mu, "Pin mu instead of cross-validating");

  // Let the global --seed/--trials/--out/--config appear after the
  // subcommand name too.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const double factor = g_factor_std.value_or(mc::default_factor_std(g_n1, g_n2));
      const std::uint64_t stream = mc::derive_stream(seed, 0);
      const auto instance =
          mc::gen_low_rank(g_n1, g_n2, g_rank, factor, mc::RngSeed{stream, 0});
      const auto m_count = static_cast<std::size_t>(
          std::llround(g_fraction * static_cast<double>(g_n1) * static_cast<double>(g_n2)));
      const auto omega = mc::sample_uniform(g_n1, g_n2, m_count, mc::RngSeed{stream, 1});
      const auto noisy = mc::add_noise(instance.m, omega, g_noise, mc::RngSeed{stream, 3});
      mc::write_csv_matrix(instance.m, g_prefix + ".truth.csv");
      mc::write_observation_file(noisy.y_omega, omega, g_prefix + ".obs");
      std::cout << "wrote " << g_prefix << ".truth.csv and " << g_prefix << ".obs (m="
                << omega.count() << ", delta=" << noisy.delta << ")\n";
      return kExitOk;
    }

    if (complete->parsed()) {
      const auto data = mc::read_observation_file(c_obs);
      mc::SolverReport report;
      if (c_mode == "constrained") {
        double delta = c_delta.value_or(0.0);
        if (!c_delta && c_sigma)
          delta = mc::delta_estimate(data.omega.count(), *c_sigma);
        report = mc::solve_constrained(data.y_omega, data.omega, delta);
      } else {
        mc::SolverOptions opts;
        if (c_mu)
          opts.mu = *c_mu;
        else if (c_sigma)
          opts.mu = mc::choose_mu(data.omega.rows(), data.omega.cols(),
                                  data.omega.count(), *c_sigma);
        else
          throw mc::ParameterError("complete: give --mu or --sigma in reg mode");
        report = mc::solve_regularized(data.y_omega, data.omega, opts);
      }
      if (!c_recovered_out.empty()) mc::write_csv_matrix(report.m_hat, c_recovered_out);
      mc::ExperimentRecord record;
      record.kind = "complete";
      record.config = nlohmann::ordered_json{{"obs", c_obs}, {"mode", c_mode}};
      record.points = nlohmann::ordered_json::array();
      record.points.push_back(nlohmann::ordered_json{
          {"mu", report.final_mu},
          {"data_residual", report.data_residual},
          {"iterations", report.iterations},
          {"converged", report.converged},
          {"unsampled_line", report.unsampled_line},
          {"bracket_failure", report.bracket_failure},
          {"nuclear_norm", mc::nuclear_norm(report.m_hat)},
          {"note", report.note}});
      record.summary = record.points.back();
      return finish_record(record, out_path);
    }

    if (certify->parsed()) {
      const auto truth = mc::ingest_csv(y_truth);
      const auto data = mc::read_observation_file(y_obs);
      const auto t = mc::TangentSpace::from_matrix(truth);
      const auto e = t.sign_matrix();
      const auto bounds = mc::isometry_bounds(t, data.omega);
      const double p = data.omega.fraction();
      nlohmann::ordered_json point{{"rank", t.rank()},
                                   {"dim_T", t.dimension()},
                                   {"p", p},
                                   {"lambda_min", bounds.lambda_min},
                                   {"lambda_max", bounds.lambda_max},
                                   {"isometry_lower_ok", bounds.lambda_min >= p / 2},
                                   {"isometry_upper_ok", bounds.lambda_max <= 3 * p / 2},
                                   {"mu_B", mc::incoherence_mu_B(truth)}};
      try {
        const auto lambda = mc::build_certificate_candidate(t, data.omega, e);
        const auto report = mc::verify_certificate(lambda, t, data.omega, e);
        point["certificate"] = nlohmann::ordered_json{
            {"supported_on_omega", report.supported_on_omega},
            {"pt_residual", report.pt_residual},
            {"ptperp_norm", report.ptperp_norm},
            {"satisfies_half", report.satisfies_half},
            {"satisfies_one", report.satisfies_one}};
      } catch (const mc::IllPosedError& e_ill) {
        point["certificate"] = nlohmann::ordered_json{{"ill_posed", e_ill.what()}};
      }
      mc::ExperimentRecord record;
      record.kind = "certify";
      record.config = nlohmann::ordered_json{{"truth", y_truth}, {"obs", y_obs}};
      record.points = nlohmann::ordered_json::array({point});
      record.summary = point;
      return finish_record(record, out_path);
    }

    if (oracle_cmd->parsed()) {
      const auto truth = mc::ingest_csv(o_truth);
      const auto data = mc::read_observation_file(o_obs);
      const auto t = mc::TangentSpace::from_matrix(truth);
      mc::OracleOptions opts;
      opts.ground_truth = &truth;
      opts.sigma = o_sigma;
      opts.row_space_only = o_row_space_only;
      const auto report = mc::oracle_least_squares(data.y_omega, data.omega, t, opts);
      mc::ExperimentRecord record;
      record.kind = "oracle";
      record.config = nlohmann::ordered_json{{"truth", o_truth},
                                             {"obs", o_obs},
                                             {"row_space_only", o_row_space_only}};
      record.points = nlohmann::ordered_json::array();
      record.points.push_back(nlohmann::ordered_json{
          {"df", report.df},
          {"error_frobenius", report.error_frobenius ? *report.error_frobenius : 0.0},
          {"predicted_rms", report.predicted_rms}});
      record.summary = record.points.back();
      return finish_record(record, out_path);
    }

    if (table1->parsed()) {
      const auto record = mc::run_table1(seed, t_ns, trials);
      return finish_record(record, out_path);
    }

    if (sweep->parsed()) {
      mc::ExperimentConfig cfg;
      cfg.n1 = cfg.n2 = s_n;
      cfg.rank = s_rank;
      cfg.fraction = s_fraction;
      cfg.trials = trials;
      cfg.base_seed = seed;
      cfg.grid = s_grid;
      const mc::SweepAxis axis = s_axis == "n"   ? mc::SweepAxis::N
                                 : s_axis == "p" ? mc::SweepAxis::P
                                                 : mc::SweepAxis::R;
      const auto record = mc::run_figure2_sweep(axis, cfg);
      return finish_record(record, out_path);
    }

    if (real->parsed()) {
      const auto record = mc::run_real_data(r_file, r_fraction, r_mu, seed);
      return finish_record(record, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
