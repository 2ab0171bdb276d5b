#include <doctest.h>

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "smallnoise/sde.hpp"
#include "smallnoise/tv.hpp"

using namespace smallnoise;

namespace {

GaussianMeasure g1(double m, double var) {
  GaussianMeasure g;
  g.mean = VectorXd::Constant(1, m);
  g.cov = MatrixXd::Constant(1, 1, var);
  return g;
}

std::vector<double> draws(double m, double var, int n, std::uint64_t seed) {
  const MatrixXd x = sample_gaussian(VectorXd::Constant(1, m),
                                     MatrixXd::Constant(1, 1, var), n, seed);
  return {x.col(0).data(), x.col(0).data() + n};
}

}  // namespace

TEST_SUITE_BEGIN("tv");

TEST_CASE("matching distributions score near zero") {
  const auto x = draws(0.0, 1.0, 100000, 2);
  const TvEstimate tv = tv_estimate_1d(g1(0.0, 1.0), x);
  CHECK(tv.value >= 0.0);
  CHECK(tv.value < 0.05);
  CHECK(tv.bins == 200);
  CHECK(tv.n_samples == 100000);
  // The error bar covers its own histogram noise floor.
  CHECK(tv.stat_error > 0.5 * tv.value);
  CHECK(tv.stat_error < 0.1);
}

TEST_CASE("disjoint supports score near one") {
  const auto x = draws(20.0, 1.0, 20000, 5);
  const TvEstimate tv = tv_estimate_1d(g1(0.0, 1.0), x);
  CHECK(tv.value > 0.999);
  CHECK(tv.value <= 1.0);
}

// TV between unit-variance Gaussians a shift m apart is 2 Phi(m/2) - 1;
// at m = 0.5 that is about 0.1974. The histogram statistic is a lower bound
// that gets close from below at this bin count.
TEST_CASE("mean shift lands near the closed-form distance") {
  const auto x = draws(0.5, 1.0, 200000, 8);
  const TvEstimate tv = tv_estimate_1d(g1(0.0, 1.0), x);
  const double exact = 2.0 * normal_cdf(0.25) - 1.0;
  CHECK(tv.value > exact - 0.02);
  CHECK(tv.value < exact + 0.03);
}

TEST_CASE("estimates are deterministic in the sample") {
  const auto x = draws(0.3, 1.2, 50000, 9);
  const TvEstimate a = tv_estimate_1d(g1(0.0, 1.0), x);
  const TvEstimate b = tv_estimate_1d(g1(0.0, 1.0), x);
  CHECK(a.value == b.value);
  CHECK(a.stat_error == b.stat_error);
}

TEST_CASE("inputs are validated") {
  const auto x = draws(0.0, 1.0, 10000, 2);

  GaussianMeasure g2;
  g2.mean = VectorXd::Zero(2);
  g2.cov = MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(tv_estimate_1d(g2, x), UsageError);

  CHECK_THROWS_AS(tv_estimate_1d(g1(0.0, 0.0), x), UsageError);
  CHECK_THROWS_AS(tv_estimate_1d(g1(0.0, 1.0), x, 1), UsageError);

  const std::vector<double> few(100, 0.0);
  CHECK_THROWS_AS(tv_estimate_1d(g1(0.0, 1.0), few), UsageError);
}

TEST_SUITE_END();
