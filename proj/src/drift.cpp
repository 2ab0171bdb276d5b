#include "smallnoise/drift.hpp"

#include <cmath>
#include <utility>

namespace smallnoise {

VectorXd DriftModel::eval_drift(const VectorXd& u) const {
  if (u.size() != dim) throw UsageError("drift input has wrong dimension");
  VectorXd out(dim);
  drift(u, out);
  return out;
}

MatrixXd DriftModel::eval_jacobian(const VectorXd& u) const {
  if (u.size() != dim) throw UsageError("jacobian input has wrong dimension");
  MatrixXd out(dim, dim);
  jacobian(u, out);
  return out;
}

DriftModel make_linear(const MatrixXd& a, const VectorXd& b) {
  if (a.rows() != a.cols()) throw UsageError("linear drift matrix must be square");
  if (b.size() != a.rows()) throw UsageError("linear drift offset has wrong size");
  DriftModel m;
  m.name = "linear";
  m.dim = int(a.rows());
  m.growth_exponent = 0;
  m.linear = true;
  m.drift = [a, b](Eigen::Ref<const VectorXd> u, Eigen::Ref<VectorXd> out) {
    out.noalias() = a * u;
    out += b;
  };
  m.jacobian = [a](Eigen::Ref<const VectorXd>, Eigen::Ref<MatrixXd> out) {
    out = a;
  };
  return m;
}

DriftModel make_double_well() {
  DriftModel m;
  m.name = "double-well";
  m.dim = 1;
  m.growth_exponent = 1;
  m.drift = [](Eigen::Ref<const VectorXd> u, Eigen::Ref<VectorXd> out) {
    const double x = u[0];
    out[0] = x - x * x * x;
  };
  m.jacobian = [](Eigen::Ref<const VectorXd> u, Eigen::Ref<MatrixXd> out) {
    out(0, 0) = 1.0 - 3.0 * u[0] * u[0];
  };
  return m;
}

DriftModel make_cubic() {
  DriftModel m;
  m.name = "cubic";
  m.dim = 1;
  m.growth_exponent = 1;
  m.drift = [](Eigen::Ref<const VectorXd> u, Eigen::Ref<VectorXd> out) {
    const double x = u[0];
    out[0] = -x * x * x;
  };
  m.jacobian = [](Eigen::Ref<const VectorXd> u, Eigen::Ref<MatrixXd> out) {
    out(0, 0) = -3.0 * u[0] * u[0];
  };
  return m;
}

DriftModel make_lorenz63(double sigma, double rho, double beta) {
  DriftModel m;
  m.name = "lorenz63";
  m.dim = 3;
  m.growth_exponent = 0;  // all second derivatives are constants
  m.drift = [sigma, rho, beta](Eigen::Ref<const VectorXd> u,
                               Eigen::Ref<VectorXd> out) {
    out[0] = sigma * (u[1] - u[0]);
    out[1] = u[0] * (rho - u[2]) - u[1];
    out[2] = u[0] * u[1] - beta * u[2];
  };
  m.jacobian = [sigma, rho, beta](Eigen::Ref<const VectorXd> u,
                                  Eigen::Ref<MatrixXd> out) {
    out(0, 0) = -sigma;
    out(0, 1) = sigma;
    out(0, 2) = 0.0;
    out(1, 0) = rho - u[2];
    out(1, 1) = -1.0;
    out(1, 2) = -u[0];
    out(2, 0) = u[1];
    out(2, 1) = u[0];
    out(2, 2) = -beta;
  };
  return m;
}

JacobianCheck check_jacobian(const DriftModel& model,
                             const std::vector<VectorXd>& points, double tol) {
  if (points.empty()) throw UsageError("check_jacobian needs at least one point");
  JacobianCheck result;
  const int d = model.dim;
  VectorXd fplus(d), fminus(d), shifted(d);
  for (const auto& u : points) {
    if (u.size() != d) throw UsageError("check_jacobian point has wrong dimension");
    const MatrixXd analytic = model.eval_jacobian(u);
    const double h = 1e-6 * (1.0 + u.norm());
    for (int j = 0; j < d; ++j) {
      shifted = u;
      shifted[j] = u[j] + h;
      model.drift(shifted, fplus);
      shifted[j] = u[j] - h;
      model.drift(shifted, fminus);
      for (int i = 0; i < d; ++i) {
        const double fd = (fplus[i] - fminus[i]) / (2.0 * h);
        const double rel =
            std::abs(fd - analytic(i, j)) / (1.0 + std::abs(analytic(i, j)));
        if (rel > result.max_rel_error) result.max_rel_error = rel;
      }
    }
  }
  result.pass = result.max_rel_error <= tol;
  return result;
}

}  // namespace smallnoise
