#include "smallnoise/moments.hpp"

#include <cmath>

namespace smallnoise {

namespace {

void require_symmetric(const MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw UsageError(std::string(what) + " must be square");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw UsageError(std::string(what) + " must be symmetric");
}

void check_finite(const MatrixXd& c, int step) {
  if (!c.allFinite())
    throw NumericError("covariance recursion diverged at step " +
                       std::to_string(step));
}

void check_symmetry(const MatrixXd& c, int step) {
  const double scale = 1.0 + c.norm();
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NumericError("covariance lost symmetry at step " +
                       std::to_string(step));
}

double min_eig(const MatrixXd& c) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::euler: return "euler";
    case Scheme::factored: return "factored";
    case Scheme::reference: return "reference";
  }
  return "unknown";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "euler") return Scheme::euler;
  if (name == "factored") return Scheme::factored;
  if (name == "reference") return Scheme::reference;
  throw UsageError("unknown scheme '" + name + "'");
}

std::vector<VectorXd> solve_mean_euler(const DriftModel& model,
                                       const TimeGrid& grid,
                                       const VectorXd& m0) {
  if (m0.size() != model.dim) throw UsageError("initial mean has wrong dimension");
  const double dt = grid.dt();
  std::vector<VectorXd> means(grid.steps + 1);
  means[0] = m0;
  VectorXd f(model.dim);
  for (int k = 0; k < grid.steps; ++k) {
    model.drift(means[k], f);
    means[k + 1] = means[k] + dt * f;
    if (!means[k + 1].allFinite())
      throw NumericError("mean recursion diverged at step " +
                         std::to_string(k + 1));
  }
  return means;
}

std::vector<MatrixXd> solve_cov_euler(const DriftModel& model,
                                      const TimeGrid& grid,
                                      const std::vector<VectorXd>& means,
                                      const MatrixXd& c0, const MatrixXd& sigma,
                                      double* min_eigenvalue) {
  if (int(means.size()) != grid.steps + 1)
    throw UsageError("mean sequence does not match the grid");
  require_symmetric(c0, "initial covariance");
  require_symmetric(sigma, "diffusion matrix");
  const double dt = grid.dt();
  const int d = model.dim;
  std::vector<MatrixXd> cov(grid.steps + 1);
  cov[0] = MatrixXd(0.5 * (c0 + c0.transpose()));
  double lowest = min_eig(cov[0]);
  MatrixXd jac(d, d), half(d, d);
  for (int k = 0; k < grid.steps; ++k) {
    model.jacobian(means[k], jac);
    half.noalias() = jac * cov[k];
    // half + half^T is symmetric bit for bit, so the update preserves exact
    // symmetry of the stored iterates.
    cov[k + 1] = cov[k] + dt * (half + half.transpose() + sigma);
    check_finite(cov[k + 1], k + 1);
    check_symmetry(cov[k + 1], k + 1);
    lowest = std::min(lowest, min_eig(cov[k + 1]));
  }
  if (min_eigenvalue) *min_eigenvalue = lowest;
  return cov;
}

std::vector<MatrixXd> solve_cov_factored(const DriftModel& model,
                                         const TimeGrid& grid,
                                         const std::vector<VectorXd>& means,
                                         const MatrixXd& c0,
                                         const MatrixXd& sigma,
                                         double* min_eigenvalue) {
  if (int(means.size()) != grid.steps + 1)
    throw UsageError("mean sequence does not match the grid");
  require_symmetric(c0, "initial covariance");
  require_symmetric(sigma, "diffusion matrix");
  const double dt = grid.dt();
  const int d = model.dim;
  std::vector<MatrixXd> cov(grid.steps + 1);
  cov[0] = MatrixXd(0.5 * (c0 + c0.transpose()));
  double lowest = min_eig(cov[0]);
  MatrixXd jac(d, d), prop(d, d), tmp(d, d), next(d, d);
  for (int k = 0; k < grid.steps; ++k) {
    model.jacobian(means[k], jac);
    prop = MatrixXd::Identity(d, d) + dt * jac;
    tmp.noalias() = prop * cov[k];
    next.noalias() = tmp * prop.transpose();
    next += dt * sigma;
    cov[k + 1] = 0.5 * (next + next.transpose());
    check_finite(cov[k + 1], k + 1);
    check_symmetry(cov[k + 1], k + 1);
    lowest = std::min(lowest, min_eig(cov[k + 1]));
  }
  if (min_eigenvalue) *min_eigenvalue = lowest;
  return cov;
}

MomentTrajectory solve_moments(const DriftModel& model, const MatrixXd& sigma,
                               const TimeGrid& grid, const VectorXd& m0,
                               const MatrixXd& c0, Scheme scheme) {
  if (scheme == Scheme::reference)
    throw UsageError("use solve_reference for the reference scheme");
  MomentTrajectory traj;
  traj.drift = model;
  traj.sigma = sigma;
  traj.grid = grid;
  traj.scheme = scheme;
  traj.mean = solve_mean_euler(model, grid, m0);
  traj.cov = scheme == Scheme::euler
                 ? solve_cov_euler(model, grid, traj.mean, c0, sigma,
                                   &traj.min_cov_eigenvalue)
                 : solve_cov_factored(model, grid, traj.mean, c0, sigma,
                                      &traj.min_cov_eigenvalue);
  return traj;
}

MomentTrajectory solve_reference(const DriftModel& model, const MatrixXd& sigma,
                                 double horizon, const VectorXd& m0,
                                 const MatrixXd& c0, double max_step) {
  if (m0.size() != model.dim) throw UsageError("initial mean has wrong dimension");
  require_symmetric(c0, "initial covariance");
  require_symmetric(sigma, "diffusion matrix");
  if (!(horizon > 0.0)) throw UsageError("horizon must be positive");
  if (max_step <= 0.0) max_step = 1e-4 * horizon;
  const int n = std::max(1, int(std::ceil(horizon / max_step - 1e-12)));
  const TimeGrid grid(horizon, n);
  const double h = grid.dt();
  const int d = model.dim;

  MomentTrajectory traj;
  traj.drift = model;
  traj.sigma = sigma;
  traj.grid = grid;
  traj.scheme = Scheme::reference;
  traj.mean.resize(n + 1);
  traj.cov.resize(n + 1);
  traj.mean[0] = m0;
  traj.cov[0] = MatrixXd(0.5 * (c0 + c0.transpose()));

  MatrixXd jac(d, d), half(d, d);
  auto deriv = [&](const VectorXd& m, const MatrixXd& c, VectorXd& dm,
                   MatrixXd& dc) {
    model.drift(m, dm);
    model.jacobian(m, jac);
    half.noalias() = jac * c;
    dc = half + half.transpose() + sigma;
  };

  VectorXd k1m(d), k2m(d), k3m(d), k4m(d), mtmp(d);
  MatrixXd k1c(d, d), k2c(d, d), k3c(d, d), k4c(d, d), ctmp(d, d);
  double lowest = min_eig(traj.cov[0]);
  for (int k = 0; k < n; ++k) {
    const VectorXd& m = traj.mean[k];
    const MatrixXd& c = traj.cov[k];
    deriv(m, c, k1m, k1c);
    mtmp = m + 0.5 * h * k1m;
    ctmp = c + 0.5 * h * k1c;
    deriv(mtmp, ctmp, k2m, k2c);
    mtmp = m + 0.5 * h * k2m;
    ctmp = c + 0.5 * h * k2c;
    deriv(mtmp, ctmp, k3m, k3c);
    mtmp = m + h * k3m;
    ctmp = c + h * k3c;
    deriv(mtmp, ctmp, k4m, k4c);
    traj.mean[k + 1] = m + (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    MatrixXd cn = c + (h / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
    traj.cov[k + 1] = 0.5 * (cn + cn.transpose());
    if (!traj.mean[k + 1].allFinite())
      throw NumericError("reference mean diverged at step " + std::to_string(k + 1));
    check_finite(traj.cov[k + 1], k + 1);
    lowest = std::min(lowest, min_eig(traj.cov[k + 1]));
  }
  traj.min_cov_eigenvalue = lowest;
  return traj;
}

Moments interpolate_moments(const MomentTrajectory& traj, double t) {
  const TimeGrid& g = traj.grid;
  if (t < 0.0 || t > g.horizon)
    throw UsageError("interpolation time outside [0, T]");
  const double dt = g.dt();
  int k = std::min(int(t / dt), g.steps - 1);
  if (t >= g.node(k + 1)) ++k;  // guards against floor roundoff
  if (k >= g.steps) k = g.steps;
  if (t == g.node(k)) return {traj.mean[k], traj.cov[k]};
  if (t == g.node(k + 1)) return {traj.mean[k + 1], traj.cov[k + 1]};

  const double s = t - g.node(k);
  const int d = traj.drift.dim;
  VectorXd f(d);
  MatrixXd jac(d, d);
  traj.drift.drift(traj.mean[k], f);
  traj.drift.jacobian(traj.mean[k], jac);
  Moments out;
  out.mean = traj.mean[k] + s * f;
  MatrixXd half = jac * traj.cov[k];
  out.cov = traj.cov[k] + s * (half + half.transpose() + traj.sigma);
  return out;
}

}  // namespace smallnoise
