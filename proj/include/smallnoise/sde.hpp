#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "smallnoise/drift.hpp"
#include "smallnoise/exec.hpp"
#include "smallnoise/gaussian.hpp"
#include "smallnoise/grid.hpp"
#include "smallnoise/moments.hpp"

namespace smallnoise {

enum class InitKind { dirac, gaussian };

/// Initial law. Covariance is stored in unit scale: the actual law is
/// Dirac(point) or N(point, eps * cov).
struct InitialCondition {
  InitKind kind = InitKind::dirac;
  VectorXd point;
  MatrixXd cov;

  static InitialCondition dirac(VectorXd v0);
  static InitialCondition gaussian(VectorXd m0, MatrixXd c0);
};

/// dv = f(v) dt + sqrt(eps * Sigma) dW on [0, T]. eps = 0 is accepted by the
/// simulators (zero-noise degeneration); every KL operation requires eps > 0.
struct SdeSpec {
  DriftModel drift;
  MatrixXd sigma;
  MatrixXd sigma_chol;  // lower factor L with L L^T = sigma
  double epsilon = 0.0;
  InitialCondition init;

  SdeSpec(DriftModel drift_, MatrixXd sigma_, double epsilon_,
          InitialCondition init_);
};

enum class PathLaw { nonlinear, linearized };

const char* path_law_name(PathLaw law);

/// Euler-Maruyama sample paths, stored densely: state i of path p at node k
/// sits at data[(p * (K + 1) + k) * dim + i].
struct PathEnsemble {
  TimeGrid grid;
  int n_paths = 0;
  int dim = 0;
  PathLaw law = PathLaw::nonlinear;
  std::uint64_t seed = 0;
  std::vector<double> data;

  [[nodiscard]] Eigen::Map<const VectorXd> state(int path, int node) const {
    return {data.data() + (std::size_t(path) * (grid.steps + 1) + node) * dim,
            dim};
  }
  double* mutable_state(int path, int node) {
    return data.data() + (std::size_t(path) * (grid.steps + 1) + node) * dim;
  }
};

PathEnsemble simulate_nonlinear(const SdeSpec& spec, const TimeGrid& grid,
                                int n_paths, std::uint64_t seed,
                                Exec exec = Exec::parallel);

/// Chain driven by the tangent drift g_k(u) = f(m_k) + J(m_k)(u - m_k) built
/// from `traj`, stepped on the trajectory's own grid. Its node-k marginal is
/// exactly N(m_k, eps * C_k) when traj carries the factored covariance
/// recursion. Noise streams match simulate_nonlinear, so for a linear drift
/// the two simulators produce the same paths up to roundoff.
PathEnsemble simulate_linearized(const SdeSpec& spec,
                                 const MomentTrajectory& traj, int n_paths,
                                 std::uint64_t seed, Exec exec = Exec::parallel);

/// Terminal states only (n_paths x dim), streamed without storing paths.
/// Row p equals the final node of path p from simulate_nonlinear.
MatrixXd terminal_samples(const SdeSpec& spec, const TimeGrid& grid,
                          int n_paths, std::uint64_t seed,
                          Exec exec = Exec::parallel);

/// n i.i.d. draws (rows) from N(mean, cov); cov may be singular PSD.
MatrixXd sample_gaussian(const VectorXd& mean, const MatrixXd& cov, int n,
                         std::uint64_t seed, Exec exec = Exec::parallel);

/// KL divergence of the time-zero laws. Supported pairs: Dirac vs Dirac
/// (0 at the same atom, infinite otherwise) and Gaussian vs Gaussian.
double initial_kl(const InitialCondition& nu0, const InitialCondition& mu0,
                  double epsilon);

}  // namespace smallnoise
