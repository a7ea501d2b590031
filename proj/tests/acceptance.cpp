// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mc/harness.hpp"
#include "mc/model.hpp"
#include "mc/oracle.hpp"
#include "mc/rng.hpp"
#include "mc/sampling.hpp"
#include "mc/solver.hpp"
#include "mc/subspace.hpp"
#include "mc/svd.hpp"
#include "test_support.hpp"

using namespace mc;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Criterion 1: mean RMS vs n benchmark at r=2, p=0.2, sigma=1, mu=sqrt(2np).
ExperimentRecord criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = run_table1(1, {100, 200}, 20);
  const double mean100 = rec.points[0]["aggregate"]["mean_rms"].get<double>();
  const double mean200 = rec.points[1]["aggregate"]["mean_rms"].get<double>();
  const bool ok100 = mean100 >= 0.75 * 0.99 && mean100 <= 1.25 * 0.99;
  const bool ok200 = mean200 >= 0.75 * 0.61 && mean200 <= 1.25 * 0.61;
  report(1, ok100 && ok200, "mean RMS within +/-25% of 0.99 (n=100) and 0.61 (n=200)",
         "n=100: " + fmt(mean100) + ", n=200: " + fmt(mean200) + ", " +
             fmt(elapsed_s(t0)) + "s");
  return rec;
}

// Criterion 2: noiseless exact recovery via the constrained program.
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  int successes = 0;
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const std::uint64_t stream = derive_stream(2026, s);
    const auto inst = gen_low_rank(40, 40, 2, default_factor_std(40, 40), {stream, 0});
    const auto omega = sample_uniform(40, 40, 800, {stream, 1});  // p = 0.5
    if (omega.has_unsampled_line()) continue;  // counts against the success tally
    const auto rep = solve_constrained(project_omega(inst.m, omega), omega, 0.0);
    const double rel = frobenius_norm(rep.m_hat - inst.m) / frobenius_norm(inst.m);
    worst = std::max(worst, rel);
    if (rel <= 1e-3) ++successes;
  }
  report(2, successes >= 18,
         "noiseless recovery rel err <= 1e-3 in >= 18/20 seeds (n=40, r=2, p=0.5)",
         std::to_string(successes) + "/20, worst rel err " + fmt(worst) + ", " +
             fmt(elapsed_s(t0)) + "s");
}

// Criterion 3: recovered-vs-oracle-estimate ratios on the undersampling sweep.
ExperimentRecord criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.n1 = cfg.n2 = 300;  // reduced size, same ratio band
  cfg.rank = 2;
  cfg.noise_std = 1.0;
  cfg.trials = 20;
  cfg.base_seed = 3;
  cfg.grid = {3, 5, 8};
  const auto rec = run_figure2_sweep(SweepAxis::P, cfg);

  double worst = rec.summary["worst_ratio_vs_estimate"].get<double>();
  double sum = 0.0;
  std::size_t count = 0;
  std::string per_point;
  for (const auto& point : rec.points) {
    const double mean = point["aggregate"]["mean_ratio"].get<double>();
    per_point += (per_point.empty() ? "" : "/") + fmt(mean);
    for (const auto& t : point["trials"]) {
      sum += t["ratio_vs_estimate"].get<double>();
      ++count;
    }
  }
  const double mean_ratio = sum / static_cast<double>(count);
  const bool ok = worst <= 2.25 && mean_ratio >= 1.3 && mean_ratio <= 2.0;
  report(3, ok, "RMS/(sigma*sqrt(df/m)) <= 2.25 everywhere, mean in [1.3, 2.0]",
         "worst " + fmt(worst) + ", mean " + fmt(mean_ratio) + " (per m/df=3/5/8: " +
             per_point + "), " + fmt(elapsed_s(t0)) + "s");
  return rec;
}

// Criterion 4: no violation of the worst-case error bound in any noisy trial.
void criterion_4(const ExperimentRecord& table, const ExperimentRecord& sweep) {
  std::size_t violations = 0, trials = 0;
  for (const auto* rec : {&table, &sweep})
    for (const auto& point : rec->points) {
      violations += point["aggregate"]["stability_violations"].get<std::size_t>();
      trials += point["trials"].size();
    }
  report(4, violations == 0,
         "zero violations of ||Mhat-M||_F <= 4*sqrt((2+p)*n/p)*delta + 2*delta",
         std::to_string(violations) + " violations across " + std::to_string(trials) +
             " noisy trials");
}

// Criterion 5: oracle least-squares error matches its stochastic prediction.
void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.n1 = cfg.n2 = 200;
  cfg.rank = 2;
  cfg.fraction = 0.3;
  cfg.noise_std = 1.0;
  cfg.base_seed = 5;
  double sum = 0.0;
  for (std::size_t i = 0; i < 20; ++i) sum += run_trial(cfg, i, true).oracle_rms;
  const double mean = sum / 20.0;
  const double predicted = oracle_rms_estimate(200, 200, 2, cfg.effective_m(), 1.0);
  const double rel = std::fabs(mean - predicted) / predicted;
  report(5, rel <= 0.15,
         "mean oracle RMS within 15% of sigma*sqrt(df/m) (n=200, r=2, p=0.3)",
         "mean " + fmt(mean) + " vs predicted " + fmt(predicted) + ", rel dev " +
             fmt(rel) + ", " + fmt(elapsed_s(t0)) + "s");
}

// Criterion 6: the thresholding step is the exact proximal operator.
void criterion_6() {
  bool perturbations_ok = true;
  auto objective = [](const DenseMatrix& z, const DenseMatrix& x, double tau) {
    DenseMatrix d = z;
    d -= x;
    const double f = frobenius_norm(d);
    return 0.5 * f * f + tau * nuclear_norm(z);
  };
  for (std::uint64_t s = 0; s < 20 && perturbations_ok; ++s) {
    const DenseMatrix x = mc::test::gaussian_matrix(5, 5, {600 + s, 0});
    const double tau = 0.3 + 0.1 * static_cast<double>(s % 7);
    const DenseMatrix z = svt(x, tau);
    const double fz = objective(z, x, tau);
    CounterRng rng({700 + s, 0});
    for (int k = 0; k < 1000; ++k) {
      DenseMatrix w = z;
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) w(i, j) += 1e-3 * rng.next_gaussian();
      if (objective(w, x, tau) < fz - 1e-12) {
        perturbations_ok = false;
        break;
      }
    }
  }

  const std::vector<double> d{3.0, 1.0};
  const DenseMatrix out = svt(DenseMatrix::diagonal(d), 2.0);
  const bool exact = out(0, 0) == 1.0 && out(0, 1) == 0.0 && out(1, 0) == 0.0 &&
                     out(1, 1) == 0.0;
  report(6, perturbations_ok && exact,
         "svt beats 1000 random 1e-3 perturbations on 20 inputs; svt(diag(3,1),2)=diag(1,0)",
         std::string("perturbations ") + (perturbations_ok ? "ok" : "beaten") +
             ", diagonal case " + (exact ? "exact" : "inexact"));
}

// Criterion 7: tangent-space geometry and sampling-isometry bounds.
void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();

  bool geometry_ok = true;
  CounterRng dims({7070, 0});
  for (std::uint64_t s = 0; s < 100 && geometry_ok; ++s) {
    const std::size_t n1 = 5 + dims.next_below(21);
    const std::size_t n2 = 5 + dims.next_below(21);
    const std::size_t r = 1 + dims.next_below(std::min({n1, n2, std::size_t{3}}));
    const DenseMatrix m = mc::test::random_low_rank(n1, n2, r, {800 + s, 0});
    const TangentSpace t = TangentSpace::from_matrix(m);
    const DenseMatrix x = mc::test::gaussian_matrix(n1, n2, {900 + s, 0});
    const DenseMatrix y = mc::test::gaussian_matrix(n1, n2, {900 + s, 1});
    const DenseMatrix px = t.project(x);
    const double scale = std::max(1.0, frobenius_norm(x));
    if (frobenius_norm(px + t.project_perp(x) - x) > 1e-10 * scale) geometry_ok = false;
    if (frobenius_norm(t.project(px) - px) > 1e-10 * scale) geometry_ok = false;
    if (std::fabs(inner_product(px, y) - inner_product(x, t.project(y))) >
        1e-10 * scale * std::max(1.0, frobenius_norm(y)))
      geometry_ok = false;
  }

  // The [p/2, 3p/2] concentration needs the sampling-richness regime
  // m >= 3 n log^2 n (p >= 0.42 at n = 200); below it the extreme
  // eigenvalues genuinely leave the band, so the check runs at p = 0.5.
  int in_band = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const std::uint64_t stream = derive_stream(777, s);
    const DenseMatrix m = mc::test::random_low_rank(200, 200, 2, {stream, 0});
    const TangentSpace t = TangentSpace::from_matrix(m);
    const auto omega = sample_uniform(200, 200, 20000, {stream, 1});  // p = 0.5
    const auto b = isometry_bounds(t, omega);
    if (b.lambda_min >= 0.25 && b.lambda_max <= 0.75) ++in_band;
  }

  bool oracle_match = true;
  double worst_dev = 0.0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const std::size_t n1 = (s == 3) ? 50 : 60;
    const std::size_t n2 = (s == 3) ? 70 : 60;  // n1 + n2 <= 200 throughout
    const DenseMatrix m = mc::test::random_low_rank(n1, n2, 2, {1000 + s, 0});
    const TangentSpace t = TangentSpace::from_matrix(m);
    const auto omega = sample_uniform(n1, n2, (n1 * n2) * 2 / 5, {1000 + s, 1});
    const auto b = isometry_bounds(t, omega);
    const auto spectrum = mc::test::explicit_isometry_spectrum(t, omega);
    const double dev = std::max(std::fabs(b.lambda_max - spectrum.back()),
                                std::fabs(b.lambda_min - spectrum.front()));
    worst_dev = std::max(worst_dev, dev);
    if (dev > 1e-5) oracle_match = false;
  }

  report(7, geometry_ok && in_band >= 18 && oracle_match,
         "projection identities to 1e-10; isometry in [p/2,3p/2] >= 90%; matches dense "
         "eigensolver to 1e-5",
         std::string("identities ") + (geometry_ok ? "ok" : "violated") + ", band " +
             std::to_string(in_band) + "/20, eigensolver dev " + fmt(worst_dev) + ", " +
             fmt(elapsed_s(t0)) + "s");
}

// Criterion 8: dual certificates exist and certify optimality.
void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  int certified = 0;
  double worst_norm = 0.0;
  for (std::uint64_t s = 21; s <= 40; ++s) {
    const std::uint64_t stream = derive_stream(888, s);
    const DenseMatrix m = mc::test::random_low_rank(100, 100, 1, {stream, 0});
    const TangentSpace t = TangentSpace::from_matrix(m);
    const auto omega = sample_uniform(100, 100, 5000, {stream, 1});  // p = 0.5
    const DenseMatrix lambda = build_certificate_candidate(t, omega, t.sign_matrix());
    const auto rep = verify_certificate(lambda, t, omega, t.sign_matrix());
    worst_norm = std::max(worst_norm, rep.ptperp_norm);
    if (rep.supported_on_omega && rep.pt_residual <= 1e-6 * frobenius_norm(t.sign_matrix()) &&
        rep.satisfies_half)
      ++certified;
  }

  bool slack_ok = true;
  double worst_slack = 0.0;
  {
    const std::uint64_t stream = derive_stream(888, 1);
    const DenseMatrix m = mc::test::random_low_rank(100, 100, 1, {stream, 0});
    const TangentSpace t = TangentSpace::from_matrix(m);
    const auto omega = sample_uniform(100, 100, 5000, {stream, 1});
    const DenseMatrix lambda = build_certificate_candidate(t, omega, t.sign_matrix());
    for (std::uint64_t s = 0; s < 100; ++s) {
      DenseMatrix h = mc::test::random_omega_null(omega, {1100 + s, 0});
      h *= frobenius_norm(m) / (10.0 * std::max(frobenius_norm(h), 1e-300));
      const double gap = lemma2_gap(m, t, lambda, h, omega);
      worst_slack = std::min(worst_slack, gap);
      if (gap < -1e-8) slack_ok = false;
    }
  }

  report(8, certified >= 19 && slack_ok,
         "certificate with ||P_Tperp(L)|| <= 1/2 in >= 19/20 seeds; lower-bound slack >= "
         "-1e-8 on 100 perturbations",
         std::to_string(certified) + "/20 certified (worst norm " + fmt(worst_norm) +
             "), worst slack " + fmt(worst_slack) + ", " + fmt(elapsed_s(t0)) + "s");
}

// Criterion 9: entry sampling annihilates unobserved rank-one matrices.
void criterion_9() {
  const ObservationSet omega(6, 6, {{0, 0}, {1, 3}, {4, 2}});
  bool ok = true;
  for (std::size_t i = 0; i < 6 && ok; ++i)
    for (std::size_t j = 0; j < 6 && ok; ++j) {
      if (omega.contains(i, j)) continue;
      DenseMatrix e(6, 6);
      e(i, j) = 1.0;
      if (frobenius_norm(project_omega(e, omega)) != 0.0) ok = false;
    }
  report(9, ok, "P_Omega(e_i e_j^T) = 0 for every unobserved (i,j)",
         ok ? "all 33 unobserved rank-one matrices annihilated" : "nonzero image found");
}

// Criterion 10: identical configuration and seed give byte-identical records.
void criterion_10() {
  const auto a = run_table1(10, {50}, 3);
  const auto b = run_table1(10, {50}, 3);
  ExperimentConfig cfg;
  cfg.n1 = cfg.n2 = 50;
  cfg.fraction = 0.4;
  cfg.trials = 2;
  cfg.base_seed = 10;
  cfg.grid = {1, 2};
  const auto c = run_figure2_sweep(SweepAxis::R, cfg);
  const auto d = run_figure2_sweep(SweepAxis::R, cfg);
  const bool ok = a.to_json().dump() == b.to_json().dump() &&
                  c.to_json().dump() == d.to_json().dump();
  report(10, ok, "repeated runs with the same config and seed are byte-identical",
         ok ? "table and sweep records match exactly" : "records differ");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentRecord table = criterion_1();
  criterion_2();
  const ExperimentRecord sweep = criterion_3();
  criterion_4(table, sweep);
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d/10 criteria passed in %.1fs\n", 10 - g_failures, elapsed_s(t0));
  return g_failures == 0 ? 0 : 1;
}
