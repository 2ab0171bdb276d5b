#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "smallnoise/experiments.hpp"

using namespace smallnoise;

namespace {

SweepConfig base_config() {
  SweepConfig cfg;
  cfg.drift = make_double_well();
  cfg.sigma = MatrixXd::Identity(1, 1);
  cfg.init = InitialCondition::dirac(VectorXd::Constant(1, 0.5));
  cfg.horizon = 1.0;
  cfg.estimator.method = SpaceMethod::gauss_hermite;
  cfg.estimator.gh_order = 20;
  cfg.ref_max_step = 1e-3;
  cfg.steps = 100;
  cfg.seed = 19;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("log-log fit recovers an exact power law") {
  std::vector<double> x{8.0, 4.0, 2.0, 1.0, 0.5};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.5 * std::pow(xi, 1.25));
  const SlopeFit fit = fit_loglog(x, y);
  CHECK(fit.slope == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.5)).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(fit.residuals.size() == 5);
  for (double r : fit.residuals) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("log-log fit rejects bad inputs") {
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0}), UsageError);
  CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), UsageError);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, 0.0}), UsageError);
  CHECK_THROWS_AS(fit_loglog({1.0, -2.0}, {1.0, 1.0}), UsageError);
}

TEST_CASE("noise sweep recovers the first-order rate") {
  SweepConfig cfg = base_config();
  cfg.values = {1e-2, 3e-3, 1e-3, 3e-4};
  const EpsSweepResult result = sweep_epsilon(cfg);

  REQUIRE(result.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(result.rows[i].epsilon == cfg.values[i]);
    CHECK(result.rows[i].continuous.total > 0.0);
    CHECK(result.rows[i].discrete.total > 0.0);
    CHECK(!result.rows[i].tv.has_value());
  }
  CHECK(result.fit_continuous.slope > 0.9);
  CHECK(result.fit_continuous.slope < 1.1);
  CHECK(result.fit_continuous.r2 > 0.99);
  CHECK(result.fit_discrete.slope > 0.9);
  CHECK(result.fit_discrete.slope < 1.1);
}

// A linear drift zeroes every divergence in the sweep; the fit must flag the
// degenerate all-zero column instead of failing on log(0).
TEST_CASE("noise sweep handles the exactly-zero column") {
  SweepConfig cfg = base_config();
  cfg.drift = make_linear(-MatrixXd::Identity(1, 1), VectorXd::Zero(1));
  cfg.values = {1e-2, 3e-3, 1e-3, 3e-4};
  const EpsSweepResult result = sweep_epsilon(cfg);
  CHECK(result.fit_continuous.degenerate_zero);
  CHECK(result.fit_discrete.degenerate_zero);
  for (const auto& row : result.rows) CHECK(row.continuous.total == 0.0);
}

TEST_CASE("step sweep recovers the second-order rate") {
  SweepConfig cfg = base_config();
  cfg.epsilon = 1e-3;
  cfg.values = {0.2, 0.1, 0.05, 0.025};
  const DtSweepResult result = sweep_dt(cfg);

  REQUIRE(result.rows.size() == 4);
  CHECK(result.kl_ref.total > 0.0);
  for (const auto& row : result.rows) {
    CHECK(row.excess > 0.0);
    CHECK(row.kl.total > result.kl_ref.total);
    CHECK(row.ratio == doctest::Approx(row.kl.total * cfg.epsilon /
                                       (row.dt * row.dt)));
  }
  CHECK(result.fit.slope > 1.6);
  CHECK(result.fit.slope < 2.4);
}

TEST_CASE("wrong mean separates and the control does not") {
  SweepConfig cfg = base_config();
  cfg.values = {1e-2, 3e-3, 1e-3, 3e-4};
  cfg.dt_sim = 0.01;
  cfg.tv_paths = 10000;

  const WrongMeanResult shifted =
      wrong_mean_tv(cfg, VectorXd::Constant(1, 0.3));
  CHECK(shifted.monotone);
  CHECK(shifted.tv_at_smallest > 0.9);
  REQUIRE(shifted.rows.size() == 4);
  CHECK(shifted.rows.back().epsilon == 3e-4);
  CHECK(shifted.rows.back().tv.value == shifted.tv_at_smallest);

  const WrongMeanResult control = wrong_mean_tv(cfg, VectorXd::Zero(1));
  CHECK(control.tv_at_smallest < 0.1);
}

TEST_CASE("sweep inputs are validated") {
  SweepConfig cfg = base_config();

  cfg.values = {1e-3, 3e-3, 1e-2, 3e-2};  // ascending
  CHECK_THROWS_AS(sweep_epsilon(cfg), UsageError);
  cfg.values = {1e-2, 3e-3, 1e-3};  // too short
  CHECK_THROWS_AS(sweep_epsilon(cfg), UsageError);
  cfg.values = {1e-2, 3e-3, 1e-3, -1e-4};  // not positive
  CHECK_THROWS_AS(sweep_epsilon(cfg), UsageError);

  cfg.values = {0.2, 0.1, 0.07, 0.025};  // 0.07 does not divide 1.0
  CHECK_THROWS_AS(sweep_dt(cfg), UsageError);

  cfg = base_config();
  cfg.drift = make_lorenz63();
  cfg.sigma = MatrixXd::Identity(3, 3);
  cfg.init = InitialCondition::dirac(VectorXd::Ones(3));
  cfg.values = {1e-2, 3e-3, 1e-3, 3e-4};
  CHECK_THROWS_AS(wrong_mean_tv(cfg, VectorXd::Zero(3)), UsageError);
}

TEST_SUITE_END();
