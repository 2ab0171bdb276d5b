#include "smallnoise/gaussian.hpp"

#include <cmath>

namespace smallnoise {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require_symmetric(const MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw UsageError(std::string(what) + " must be square");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw UsageError(std::string(what) + " must be symmetric");
}

}  // namespace

double gaussian_kl(const GaussianMeasure& nu, const GaussianMeasure& mu) {
  const auto d = nu.mean.size();
  if (mu.mean.size() != d || nu.cov.rows() != d || mu.cov.rows() != d)
    throw UsageError("gaussian_kl: dimension mismatch");
  require_symmetric(nu.cov, "nu covariance");
  require_symmetric(mu.cov, "mu covariance");

  Eigen::LLT<MatrixXd> llt(mu.cov);
  if (llt.info() != Eigen::Success)
    throw UsageError("gaussian_kl: mu covariance must be positive definite");

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(nu.cov, Eigen::EigenvaluesOnly);
  const VectorXd eigs = es.eigenvalues();
  const double scale = std::max(1.0, eigs.cwiseAbs().maxCoeff());
  if (eigs.minCoeff() < -1e-12 * scale)
    throw UsageError("gaussian_kl: nu covariance is indefinite");
  if (eigs.minCoeff() <= 0.0) return kl_infinite;  // singular: no density w.r.t. mu

  double logdet_nu = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) logdet_nu += std::log(eigs[i]);
  double logdet_mu = 0.0;
  const MatrixXd& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < d; ++i) logdet_mu += 2.0 * std::log(l(i, i));

  const double trace_term = llt.solve(nu.cov).trace();
  const VectorXd diff = mu.mean - nu.mean;
  const double quad = diff.dot(llt.solve(diff));
  const double kl =
      0.5 * (trace_term - double(d) + quad + logdet_mu - logdet_nu);
  if (!std::isfinite(kl)) throw NumericError("gaussian_kl: non-finite result");
  return std::max(kl, 0.0);
}

MatrixXd psd_factor(const MatrixXd& cov, double tol) {
  require_symmetric(cov, "covariance");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw NumericError("psd_factor: eigendecomposition failed");
  VectorXd eigs = es.eigenvalues();
  const double scale = std::max(1.0, eigs.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] < -tol * scale)
      throw UsageError("psd_factor: matrix is not positive semidefinite");
    if (eigs[i] < 0.0) eigs[i] = 0.0;
  }
  return es.eigenvectors() * eigs.cwiseSqrt().asDiagonal();
}

double gaussian_log_density(const VectorXd& x, const GaussianMeasure& g) {
  const auto d = g.mean.size();
  if (x.size() != d) throw UsageError("gaussian_log_density: dimension mismatch");
  Eigen::LLT<MatrixXd> llt(g.cov);
  if (llt.info() != Eigen::Success)
    throw UsageError("gaussian_log_density: covariance must be positive definite");
  double logdet = 0.0;
  const MatrixXd& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < d; ++i) logdet += 2.0 * std::log(l(i, i));
  const VectorXd diff = x - g.mean;
  const double quad = diff.dot(llt.solve(diff));
  return -0.5 * (double(d) * kLog2Pi + logdet + quad);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

HermiteRule hermite_rule(int order) {
  if (order < 1) throw UsageError("hermite_rule: order must be positive");
  MatrixXd jacobi = MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    const double b = std::sqrt(0.5 * i);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success)
    throw NumericError("hermite_rule: eigendecomposition failed");
  HermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(order);
  const double sqrt_pi = std::sqrt(3.14159265358979323846264338327950288);
  for (int i = 0; i < order; ++i) {
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = sqrt_pi * v * v;
  }
  return rule;
}

}  // namespace smallnoise
