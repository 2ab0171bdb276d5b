#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "smallnoise/exec.hpp"
#include "smallnoise/moments.hpp"
#include "smallnoise/sde.hpp"

namespace smallnoise {

enum class SpaceMethod { monte_carlo, gauss_hermite, exact_zero };

const char* method_name(SpaceMethod m);
SpaceMethod method_from_name(const std::string& name);

/// How Gaussian-expectation integrals are evaluated. Monte Carlo reports a
/// standard error; tensorized Gauss-Hermite (dim <= 3) is deterministic.
struct EstimatorOptions {
  SpaceMethod method = SpaceMethod::monte_carlo;
  long n_samples = 100000;
  int gh_order = 20;
  std::uint64_t seed = 0;
};

EstimatorOptions default_estimator(int dim, std::uint64_t seed = 0);

struct KlEstimate {
  double total = 0.0;
  double initial_term = 0.0;
  double residual_term = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  SpaceMethod method = SpaceMethod::exact_zero;
  std::uint64_t seed = 0;
};

struct ResidualEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Squared Sigma-weighted norm of the tangent-approximation error at u,
/// linearized around m: |f(u) - f(m) - J(m)(u - m)|^2 in the Sigma^-1 norm.
double linearization_residual(const DriftModel& model, const MatrixXd& sigma,
                              const VectorXd& u, const VectorXd& m);

/// Expectation of linearization_residual(., m) under N(m, cov), cov in actual
/// scale. Linear drifts short-circuit to an exact zero.
ResidualEstimate expected_residual(const DriftModel& model,
                                   const MatrixXd& sigma, const VectorXd& m,
                                   const MatrixXd& cov,
                                   const EstimatorOptions& opts,
                                   std::uint32_t stream = 0,
                                   Exec exec = Exec::parallel);

/// KL divergence between the Gaussian process with marginals
/// N(m(t), eps C(t)) read off `traj` and the diffusion law of `spec`:
///   kl0 + (1/2 eps) * integral of E |f(v) - g_t(v)|^2_Sigma dt,
/// time integral by composite trapezoid on the trajectory grid.
/// For a reference trajectory g_t is the tangent drift at m(t); for an euler
/// trajectory g_t is linearized at the left grid node while the offset moves
/// along the segment interpolant, matching the discretized approximation.
/// A factored trajectory is rejected (use kl_discrete).
KlEstimate kl_continuous(const MomentTrajectory& traj, const SdeSpec& spec,
                         double kl0, const EstimatorOptions& opts,
                         Exec exec = Exec::parallel);

/// KL divergence between the length-k discrete-time chains (both stepped with
/// the trajectory grid): kl0 + (dt/2 eps) * sum over the first k nodes of
/// E |f - g_j|^2_Sigma under N(m_j, eps C_j). Requires a factored trajectory.
KlEstimate kl_discrete(const MomentTrajectory& traj, const SdeSpec& spec,
                       double kl0, int upto_k, const EstimatorOptions& opts,
                       Exec exec = Exec::parallel);

struct JointKlEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

/// Direct joint-density estimate of the discrete KL: simulates the tangent
/// chain and averages the log ratio of the two transition-density products.
/// Both chains share the initial law of `spec`, so the time-zero term
/// vanishes pathwise. Cost guard: k <= 25 and dim <= 2.
JointKlEstimate kl_bruteforce_joint(const SdeSpec& spec,
                                    const MomentTrajectory& traj, int k,
                                    long n, std::uint64_t seed,
                                    Exec exec = Exec::parallel);

/// Large-deviation action of a piecewise-linear path on the grid:
/// (1/2) * integral |phi' - f(phi)|^2_Sigma dt by the composite midpoint
/// rule. Returns the infinite sentinel when path[0] != v0.
double rate_functional(const DriftModel& model, const MatrixXd& sigma,
                       const TimeGrid& grid, const std::vector<VectorXd>& path,
                       const VectorXd& v0);

}  // namespace smallnoise
