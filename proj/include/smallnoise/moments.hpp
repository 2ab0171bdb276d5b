#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "smallnoise/drift.hpp"
#include "smallnoise/grid.hpp"

namespace smallnoise {

/// How a mean/covariance trajectory was produced.
///  - euler:     forward Euler for the mean, direct Euler step of the
///               covariance ODE (may lose positive semidefiniteness for
///               large steps; the most negative eigenvalue seen is recorded).
///  - factored:  forward Euler for the mean, product-form covariance update
///               (I + J dt) C (I + J dt)^T + Sigma dt, PSD by construction.
///  - reference: classical RK4 on the coupled mean/covariance ODEs with a
///               fine step, used as ground truth.
enum class Scheme { euler, factored, reference };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Covariances are stored in unit scale: the Gaussian marginal at node k is
/// N(mean[k], eps * cov[k]).
struct MomentTrajectory {
  DriftModel drift;
  MatrixXd sigma;
  TimeGrid grid;
  Scheme scheme = Scheme::reference;
  std::vector<VectorXd> mean;
  std::vector<MatrixXd> cov;
  double min_cov_eigenvalue = 0.0;
};

std::vector<VectorXd> solve_mean_euler(const DriftModel& model,
                                       const TimeGrid& grid,
                                       const VectorXd& m0);

std::vector<MatrixXd> solve_cov_euler(const DriftModel& model,
                                      const TimeGrid& grid,
                                      const std::vector<VectorXd>& means,
                                      const MatrixXd& c0, const MatrixXd& sigma,
                                      double* min_eigenvalue = nullptr);

std::vector<MatrixXd> solve_cov_factored(const DriftModel& model,
                                         const TimeGrid& grid,
                                         const std::vector<VectorXd>& means,
                                         const MatrixXd& c0,
                                         const MatrixXd& sigma,
                                         double* min_eigenvalue = nullptr);

/// Convenience wrapper running the mean solve plus the requested covariance
/// scheme (euler or factored).
MomentTrajectory solve_moments(const DriftModel& model, const MatrixXd& sigma,
                               const TimeGrid& grid, const VectorXd& m0,
                               const MatrixXd& c0, Scheme scheme);

/// RK4 on dm/dt = f(m), dC/dt = J(m) C + C J(m)^T + Sigma, stored on its own
/// dense grid. max_step defaults to 1e-4 * T.
MomentTrajectory solve_reference(const DriftModel& model, const MatrixXd& sigma,
                                 double horizon, const VectorXd& m0,
                                 const MatrixXd& c0, double max_step = -1.0);

struct Moments {
  VectorXd mean;
  MatrixXd cov;
};

/// Piecewise-linear interpolant between grid nodes:
///   m(t) = m_k + (t - t_k) f(m_k)
///   C(t) = C_k + (t - t_k) (J(m_k) C_k + C_k J(m_k)^T + Sigma)
/// At grid nodes the stored values are returned. For the euler scheme the
/// segment formula is continuous across nodes; for the factored scheme the
/// right limit differs from the stored node by O(dt^2).
Moments interpolate_moments(const MomentTrajectory& traj, double t);

}  // namespace smallnoise
