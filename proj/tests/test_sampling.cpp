#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mc/errors.hpp"
#include "mc/sampling.hpp"
#include "test_support.hpp"

using namespace mc;
using mc::test::gaussian_matrix;

TEST_CASE("observation set validates its indices") {
  CHECK_THROWS_AS(ObservationSet(0, 3, {}), ParameterError);
  CHECK_THROWS_AS(ObservationSet(2, 2, {{2, 0}}), ParameterError);
  CHECK_THROWS_AS(ObservationSet(2, 2, {{0, 2}}), ParameterError);
  CHECK_THROWS_AS(ObservationSet(2, 2, {{0, 0}, {0, 0}}), ParameterError);

  const ObservationSet omega(2, 3, {{1, 2}, {0, 0}});
  CHECK(omega.count() == 2);
  CHECK(omega.fraction() == doctest::Approx(2.0 / 6.0));
  CHECK(omega.contains(0, 0));
  CHECK(omega.contains(1, 2));
  CHECK(!omega.contains(0, 1));
  // Sorted iteration order regardless of input order.
  CHECK(omega.indices()[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(omega.indices()[1] == std::pair<std::size_t, std::size_t>{1, 2});
}

TEST_CASE("uniform sampling: exact count, distinct, deterministic") {
  const auto a = sample_uniform(30, 40, 250, {5, 1});
  CHECK(a.count() == 250);  // the constructor would reject duplicates
  const auto b = sample_uniform(30, 40, 250, {5, 1});
  CHECK(a.indices() == b.indices());
  const auto c = sample_uniform(30, 40, 250, {6, 1});
  CHECK(a.indices() != c.indices());

  CHECK_THROWS_AS(sample_uniform(3, 3, 10, {0, 0}), ParameterError);
  CHECK(sample_uniform(3, 3, 9, {0, 0}).count() == 9);
}

TEST_CASE("uniform sampling covers each cell at a uniform rate") {
  // With m = n1*n2/2, every cell is included with probability 1/2; check a
  // fixed cell's inclusion frequency over independent streams.
  int hits = 0;
  const int reps = 400;
  for (int s = 0; s < reps; ++s)
    if (sample_uniform(10, 10, 50, {77, static_cast<std::uint64_t>(s)}).contains(3, 7))
      ++hits;
  // Binomial(400, 0.5): 5 sigma is 50.
  CHECK(std::abs(hits - 200) <= 50);
}

TEST_CASE("bernoulli sampling count concentrates around p*n1*n2") {
  const auto omega = sample_bernoulli(200, 200, 0.3, {9, 0});
  const double expected = 0.3 * 40000;
  const double sigma = std::sqrt(40000 * 0.3 * 0.7);
  CHECK(std::fabs(static_cast<double>(omega.count()) - expected) <= 5 * sigma);
  CHECK_THROWS_AS(sample_bernoulli(5, 5, 1.5, {0, 0}), ParameterError);
  CHECK(sample_bernoulli(5, 5, 0.0, {0, 0}).count() == 0);
  CHECK(sample_bernoulli(5, 5, 1.0, {0, 0}).count() == 25);
}

TEST_CASE("projection onto the observed set") {
  const DenseMatrix x = gaussian_matrix(8, 6, {1, 0});
  const auto omega = sample_uniform(8, 6, 20, {1, 1});
  const DenseMatrix px = project_omega(x, omega);

  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      if (omega.contains(i, j))
        CHECK(px(i, j) == x(i, j));
      else
        CHECK(px(i, j) == 0.0);
    }

  // Idempotent, contractive, and complementary to the complement projector.
  CHECK(frobenius_norm(project_omega(px, omega) - px) == 0.0);
  CHECK(frobenius_norm(px) <= frobenius_norm(x));
  const DenseMatrix rest = project_omega(x, omega.complement());
  CHECK(frobenius_norm(px + rest - x) == 0.0);
  CHECK(omega.count() + omega.complement().count() == 48);

  CHECK_THROWS_AS(project_omega(gaussian_matrix(3, 3, {0, 0}), omega), DimensionError);
}

TEST_CASE("entry sampling kills unobserved rank-one matrices") {
  // P_Omega(e_i e_j^T) = 0 whenever (i,j) is unobserved: no restricted
  // isometry over all low-rank matrices is possible for this operator.
  const ObservationSet omega(4, 4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  DenseMatrix e01(4, 4);
  e01(0, 1) = 1.0;
  CHECK(frobenius_norm(project_omega(e01, omega)) == 0.0);
  CHECK(frobenius_norm(e01) == 1.0);
}

TEST_CASE("unsampled line detection") {
  ObservationSet miss_row(3, 3, {{0, 0}, {0, 1}, {0, 2}, {2, 0}, {2, 1}, {2, 2}});
  CHECK(miss_row.has_unsampled_line());
  ObservationSet diag(3, 3, {{0, 0}, {1, 1}, {2, 2}});
  CHECK(!diag.has_unsampled_line());
  ObservationSet miss_col(2, 2, {{0, 0}, {1, 0}});
  CHECK(miss_col.has_unsampled_line());
}
