#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "smallnoise/errors.hpp"

namespace smallnoise {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using DriftFn =
    std::function<void(Eigen::Ref<const VectorXd>, Eigen::Ref<VectorXd>)>;
using JacobianFn =
    std::function<void(Eigen::Ref<const VectorXd>, Eigen::Ref<MatrixXd>)>;

/// A drift field together with its analytic Jacobian. Instances are immutable
/// after construction and safe to share across threads. `growth_exponent` is
/// the smallest s with second derivatives bounded by c(1+|u|)^s; it is carried
/// as metadata for error-scaling diagnostics.
struct DriftModel {
  std::string name;
  int dim = 0;
  int growth_exponent = 0;
  bool linear = false;
  DriftFn drift;
  JacobianFn jacobian;

  [[nodiscard]] VectorXd eval_drift(const VectorXd& u) const;
  [[nodiscard]] MatrixXd eval_jacobian(const VectorXd& u) const;
};

DriftModel make_linear(const MatrixXd& a, const VectorXd& b);
DriftModel make_double_well();
DriftModel make_cubic();
DriftModel make_lorenz63(double sigma = 10.0, double rho = 28.0,
                         double beta = 8.0 / 3.0);

struct JacobianCheck {
  double max_rel_error = 0.0;
  bool pass = false;
};

/// Central-difference validation of the analytic Jacobian at the given points.
JacobianCheck check_jacobian(const DriftModel& model,
                             const std::vector<VectorXd>& points,
                             double tol = 1e-5);

}  // namespace smallnoise
