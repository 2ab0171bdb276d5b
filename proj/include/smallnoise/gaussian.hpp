#pragma once

#include <Eigen/Dense>
#include <limits>

#include "smallnoise/errors.hpp"

namespace smallnoise {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Divergences that are genuinely infinite (mass outside the support of the
/// reference measure) return this sentinel. No finite computation in the
/// toolkit overflows to it; a non-finite intermediate raises NumericError
/// instead.
inline constexpr double kl_infinite = std::numeric_limits<double>::infinity();

struct GaussianMeasure {
  VectorXd mean;
  MatrixXd cov;  // actual scale, symmetric positive semidefinite
};

/// KL divergence KL(nu || mu) between Gaussians. mu.cov must be positive
/// definite; a singular nu.cov yields the infinite sentinel, an indefinite
/// input is a usage error.
double gaussian_kl(const GaussianMeasure& nu, const GaussianMeasure& mu);

/// Lower-triangular-ish factor A with A A^T = cov, from an eigendecomposition.
/// Eigenvalues in [-tol, 0) are clipped to zero; anything below -tol (scaled
/// by the matrix norm) is rejected.
MatrixXd psd_factor(const MatrixXd& cov, double tol = 1e-10);

double gaussian_log_density(const VectorXd& x, const GaussianMeasure& g);

double normal_cdf(double z);

struct HermiteRule {
  VectorXd nodes;    // abscissae for weight exp(-x^2)
  VectorXd weights;  // sum equals sqrt(pi)
};

/// Gauss-Hermite rule of the given order via the Golub-Welsch eigenproblem.
HermiteRule hermite_rule(int order);

}  // namespace smallnoise
