#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "smallnoise/moments.hpp"
#include "smallnoise/sde.hpp"

using namespace smallnoise;

namespace {

DriftModel ou() {
  return make_linear(-MatrixXd::Identity(1, 1), VectorXd::Zero(1));
}

VectorXd scalar(double v) {
  VectorXd u(1);
  u << v;
  return u;
}

const MatrixXd kId1 = MatrixXd::Identity(1, 1);

}  // namespace

TEST_SUITE_BEGIN("sde");

TEST_CASE("zero noise degenerates to the deterministic euler mean") {
  const SdeSpec spec(make_double_well(), kId1, 0.0,
                     InitialCondition::dirac(scalar(0.5)));
  const TimeGrid grid(1.0, 50);
  const PathEnsemble ens = simulate_nonlinear(spec, grid, 3, 9);
  const auto means = solve_mean_euler(spec.drift, grid, scalar(0.5));
  for (int p = 0; p < 3; ++p)
    for (int k = 0; k <= grid.steps; ++k)
      CHECK(ens.state(p, k)(0) == means[k](0));
}

// For a linear drift the tangent chain is the original chain. The two
// evaluation orders, f(v) versus f(m_k) + A (v - m_k), differ only in
// roundoff, so with shared noise streams the paths agree to machine
// precision.
TEST_CASE("linear drift makes both simulators coincide") {
  MatrixXd a(2, 2);
  a << -1.0, 0.5, -0.5, -1.0;
  const DriftModel model = make_linear(a, VectorXd::Ones(2));
  const MatrixXd sigma = (MatrixXd(2, 2) << 1.0, 0.2, 0.2, 0.5).finished();
  const TimeGrid grid(1.0, 40);
  VectorXd m0(2);
  m0 << 0.3, -0.3;
  const SdeSpec spec(model, sigma, 0.05, InitialCondition::dirac(m0));
  const MomentTrajectory traj = solve_moments(model, sigma, grid, m0,
                                              MatrixXd::Zero(2, 2),
                                              Scheme::factored);

  const PathEnsemble direct = simulate_nonlinear(spec, grid, 25, 31);
  const PathEnsemble tangent = simulate_linearized(spec, traj, 25, 31);
  REQUIRE(direct.data.size() == tangent.data.size());
  for (std::size_t i = 0; i < direct.data.size(); ++i)
    CHECK(std::abs(direct.data[i] - tangent.data[i]) <
          1e-12 * (1.0 + std::abs(direct.data[i])));
  CHECK(tangent.law == PathLaw::linearized);
}

// The Euler-Maruyama chain of a linear SDE has mean equal to the euler mean
// recursion and variance equal to eps times the factored covariance
// recursion, exactly; only sampling error remains.
TEST_CASE("ensemble moments match the exact chain moments") {
  const double eps = 0.1;
  const TimeGrid grid(1.0, 1000);
  const SdeSpec spec(ou(), kId1, eps, InitialCondition::dirac(scalar(1.0)));
  const int n = 20000;
  const MatrixXd term = terminal_samples(spec, grid, n, 5);

  const auto means = solve_mean_euler(ou(), grid, scalar(1.0));
  const auto traj = solve_moments(ou(), kId1, grid, scalar(1.0),
                                  MatrixXd::Zero(1, 1), Scheme::factored);
  const double exact_mean = means.back()(0);
  const double exact_var = eps * traj.cov.back()(0, 0);

  const double sample_mean = term.col(0).mean();
  const double sample_var =
      (term.col(0).array() - sample_mean).square().sum() / (n - 1);
  CHECK(std::abs(sample_mean - exact_mean) <
        5.0 * std::sqrt(exact_var / n));
  CHECK(std::abs(sample_var - exact_var) <
        5.0 * exact_var * std::sqrt(2.0 / n));
}

TEST_CASE("terminal samples equal the stored ensemble's last node") {
  const SdeSpec spec(make_double_well(), kId1, 0.01,
                     InitialCondition::dirac(scalar(0.5)));
  const TimeGrid grid(1.0, 100);
  const PathEnsemble ens = simulate_nonlinear(spec, grid, 50, 77);
  const MatrixXd term = terminal_samples(spec, grid, 50, 77);
  for (int p = 0; p < 50; ++p)
    CHECK(term(p, 0) == ens.state(p, grid.steps)(0));
}

TEST_CASE("serial and parallel execution agree bit for bit") {
  const SdeSpec spec(make_double_well(), kId1, 0.01,
                     InitialCondition::gaussian(scalar(0.5), kId1));
  const TimeGrid grid(1.0, 200);

  set_thread_count(8);
  const MatrixXd par = terminal_samples(spec, grid, 500, 13, Exec::parallel);
  set_thread_count(1);
  const MatrixXd par1 = terminal_samples(spec, grid, 500, 13, Exec::parallel);
  set_thread_count(hardware_threads());
  const MatrixXd ser = terminal_samples(spec, grid, 500, 13, Exec::serial);

  CHECK(par == ser);
  CHECK(par1 == ser);
}

TEST_CASE("gaussian sampler hits its target moments") {
  VectorXd mean(2);
  mean << 1.0, -2.0;
  MatrixXd cov(2, 2);
  cov << 1.0, 0.6, 0.6, 0.9;
  const int n = 50000;
  const MatrixXd x = sample_gaussian(mean, cov, n, 3);
  REQUIRE(x.rows() == n);

  const VectorXd sm = x.colwise().mean();
  CHECK((sm - mean).cwiseAbs().maxCoeff() < 5.0 * std::sqrt(1.0 / n));
  const MatrixXd centered = x.rowwise() - sm.transpose();
  const MatrixXd sc = centered.transpose() * centered / double(n - 1);
  CHECK((sc - cov).cwiseAbs().maxCoeff() < 5.0 * std::sqrt(2.0 / n));

  // Identical coordinates reproduce the draw; a singular target is fine.
  const MatrixXd again = sample_gaussian(mean, cov, n, 3);
  CHECK(x == again);
  MatrixXd rank1(2, 2);
  rank1 << 1.0, 1.0, 1.0, 1.0;
  const MatrixXd y = sample_gaussian(mean, rank1, 100, 3);
  for (int p = 0; p < 100; ++p)
    CHECK(y(p, 0) - 1.0 == doctest::Approx(y(p, 1) + 2.0).epsilon(1e-12));
}

TEST_CASE("initial divergence covers the supported pairs") {
  const auto d0 = InitialCondition::dirac(scalar(0.5));
  const auto d1 = InitialCondition::dirac(scalar(0.7));
  CHECK(initial_kl(d0, d0, 0.1) == 0.0);
  CHECK(initial_kl(d0, d1, 0.1) == kl_infinite);

  // Unit-scale covariances scale with eps, so at eps = 0.5 the pair
  // N(1, 0.5) vs N(0, 0.5) gives |shift|^2 / (2 * 0.5) = 1.
  const auto g0 = InitialCondition::gaussian(scalar(1.0), kId1);
  const auto g1 = InitialCondition::gaussian(scalar(0.0), kId1);
  CHECK(initial_kl(g0, g1, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(initial_kl(d0, g1, 0.1), UsageError);
}

TEST_CASE("spec construction is validated") {
  const auto init = InitialCondition::dirac(scalar(0.0));
  MatrixXd asym(1, 1);
  CHECK_THROWS_AS(SdeSpec(ou(), MatrixXd::Zero(1, 1), 0.1, init), UsageError);
  CHECK_THROWS_AS(SdeSpec(ou(), -kId1, 0.1, init), UsageError);
  CHECK_THROWS_AS(SdeSpec(ou(), kId1, -0.1, init), UsageError);
  CHECK_THROWS_AS(SdeSpec(ou(), MatrixXd::Identity(2, 2), 0.1, init),
                  UsageError);
  MatrixXd notsym(2, 2);
  notsym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(SdeSpec(make_lorenz63(), notsym, 0.1, init), UsageError);
}

TEST_CASE("oversized ensembles are rejected up front") {
  const SdeSpec spec(ou(), kId1, 0.1, InitialCondition::dirac(scalar(0.0)));
  const TimeGrid grid(1.0, 100000);
  bool caught = false;
  try {
    simulate_nonlinear(spec, grid, 1000000, 0);
  } catch (const UsageError& e) {
    caught = true;
    CHECK(std::string(e.what()).find("terminal_samples") != std::string::npos);
  }
  CHECK(caught);
}

TEST_CASE("linearized simulation rejects a foreign trajectory") {
  const TimeGrid grid(1.0, 10);
  const SdeSpec spec(ou(), kId1, 0.1, InitialCondition::dirac(scalar(1.0)));
  const auto other_drift = solve_moments(make_cubic(), kId1, grid, scalar(1.0),
                                         MatrixXd::Zero(1, 1),
                                         Scheme::factored);
  CHECK_THROWS_AS(simulate_linearized(spec, other_drift, 10, 0), UsageError);
}

TEST_SUITE_END();
