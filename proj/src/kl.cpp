#include "smallnoise/kl.hpp"

#include <cmath>

#include "smallnoise/gaussian.hpp"
#include "smallnoise/rng.hpp"

namespace smallnoise {

const char* method_name(SpaceMethod m) {
  switch (m) {
    case SpaceMethod::monte_carlo: return "monte-carlo";
    case SpaceMethod::gauss_hermite: return "gauss-hermite";
    case SpaceMethod::exact_zero: return "exact-zero";
  }
  return "unknown";
}

SpaceMethod method_from_name(const std::string& name) {
  if (name == "monte-carlo") return SpaceMethod::monte_carlo;
  if (name == "gauss-hermite") return SpaceMethod::gauss_hermite;
  if (name == "exact-zero") return SpaceMethod::exact_zero;
  throw UsageError("unknown estimator method '" + name + "'");
}

EstimatorOptions default_estimator(int dim, std::uint64_t seed) {
  EstimatorOptions opts;
  opts.seed = seed;
  if (dim <= 3) {
    opts.method = SpaceMethod::gauss_hermite;
  }
  return opts;
}

namespace {

MatrixXd inverse_of_spd(const MatrixXd& sigma, const char* what) {
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw UsageError(std::string(what) + ": matrix must be positive definite");
  return llt.solve(MatrixXd::Identity(sigma.rows(), sigma.cols()));
}

/// Expectation of |f(v) - f(base) - J(base)(v - offset)|^2_Sigma under
/// N(mean, cov). The offset equals the base except on the interior of euler
/// interpolant segments, where the tangent is anchored at the left node but
/// recentred on the moving interpolated mean.
ResidualEstimate residual_expectation(const DriftModel& model,
                                      const MatrixXd& sigma_inv,
                                      const VectorXd& base,
                                      const VectorXd& offset,
                                      const VectorXd& mean, const MatrixXd& cov,
                                      const EstimatorOptions& opts,
                                      std::uint32_t stream, Exec exec) {
  const int d = model.dim;
  if (model.linear && base == offset) return {0.0, 0.0};

  VectorXd f_base(d);
  MatrixXd jac_base(d, d);
  model.drift(base, f_base);
  model.jacobian(base, jac_base);

  auto quad_at = [&](const VectorXd& v, VectorXd& r, VectorXd& work) {
    model.drift(v, r);
    r -= f_base;
    work = v - offset;
    r.noalias() -= jac_base * work;
    work.noalias() = sigma_inv * r;
    return r.dot(work);
  };

  const MatrixXd factor = psd_factor(cov);

  if (opts.method == SpaceMethod::gauss_hermite) {
    if (d > 3) throw UsageError("gauss-hermite quadrature is limited to dim <= 3");
    const HermiteRule rule = hermite_rule(opts.gh_order);
    const int q = opts.gh_order;
    const double sqrt2 = std::sqrt(2.0);
    long count = 1;
    for (int i = 0; i < d; ++i) count *= q;
    VectorXd x(d), u(d), r(d), work(d);
    double sum = 0.0;
    for (long idx = 0; idx < count; ++idx) {
      long rem = idx;
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        const int node = int(rem % q);
        rem /= q;
        x[i] = rule.nodes[node];
        w *= rule.weights[node];
      }
      u = mean + sqrt2 * (factor * x);
      sum += w * quad_at(u, r, work);
    }
    const double norm = std::pow(3.14159265358979323846264338327950288, 0.5 * d);
    const double value = sum / norm;
    if (!std::isfinite(value))
      throw NumericError("residual quadrature produced a non-finite value");
    return {value, 0.0};
  }

  if (opts.method != SpaceMethod::monte_carlo)
    throw UsageError("expected_residual: method must be monte-carlo or gauss-hermite");
  const long n = opts.n_samples;
  if (n < 2) throw UsageError("monte-carlo needs at least two samples");
  std::vector<double> vals(n);
  parallel_for(n, exec, [&](std::int64_t i) {
    VectorXd xi(d), u(d), r(d), work(d);
    rng::fill_normals(opts.seed, rng::Stream::residual_mc, std::uint64_t(i),
                      stream, xi.data(), d);
    u = mean;
    u.noalias() += factor * xi;
    vals[i] = quad_at(u, r, work);
  });
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += vals[i];
  const double avg = acc / double(n);
  double ss = 0.0;
  for (long i = 0; i < n; ++i) {
    const double dlt = vals[i] - avg;
    ss += dlt * dlt;
  }
  const double stderr_mean = std::sqrt(ss / (double(n) * double(n - 1)));
  if (!std::isfinite(avg))
    throw NumericError("residual Monte Carlo produced a non-finite value");
  return {avg, stderr_mean};
}

void check_spec_matches(const MomentTrajectory& traj, const SdeSpec& spec,
                        const char* who) {
  if (traj.drift.name != spec.drift.name || traj.drift.dim != spec.drift.dim)
    throw UsageError(std::string(who) + ": trajectory drift does not match the SDE");
  if ((traj.sigma - spec.sigma).cwiseAbs().maxCoeff() >
      1e-12 * (1.0 + spec.sigma.cwiseAbs().maxCoeff()))
    throw UsageError(std::string(who) + ": trajectory diffusion does not match the SDE");
  if (!(spec.epsilon > 0.0))
    throw UsageError(std::string(who) + ": eps must be positive");
}

}  // namespace

double linearization_residual(const DriftModel& model, const MatrixXd& sigma,
                              const VectorXd& u, const VectorXd& m) {
  if (u.size() != model.dim || m.size() != model.dim)
    throw UsageError("linearization_residual: dimension mismatch");
  const MatrixXd sigma_inv = inverse_of_spd(sigma, "linearization_residual");
  VectorXd r = model.eval_drift(u) - model.eval_drift(m);
  r.noalias() -= model.eval_jacobian(m) * (u - m);
  return r.dot(sigma_inv * r);
}

ResidualEstimate expected_residual(const DriftModel& model,
                                   const MatrixXd& sigma, const VectorXd& m,
                                   const MatrixXd& cov,
                                   const EstimatorOptions& opts,
                                   std::uint32_t stream, Exec exec) {
  if (m.size() != model.dim) throw UsageError("expected_residual: dimension mismatch");
  const MatrixXd sigma_inv = inverse_of_spd(sigma, "expected_residual");
  return residual_expectation(model, sigma_inv, m, m, m, cov, opts, stream,
                              exec);
}

KlEstimate kl_continuous(const MomentTrajectory& traj, const SdeSpec& spec,
                         double kl0, const EstimatorOptions& opts, Exec exec) {
  if (traj.scheme == Scheme::factored)
    throw UsageError("kl_continuous: needs a reference or euler trajectory (got factored)");
  check_spec_matches(traj, spec, "kl_continuous");

  KlEstimate out;
  out.initial_term = kl0;
  out.seed = opts.seed;
  out.method = opts.method;
  out.n_samples = opts.method == SpaceMethod::gauss_hermite ? opts.gh_order
                                                            : opts.n_samples;

  // With an exact mean path the tangent drift of a linear field reproduces f,
  // so the residual vanishes identically. The euler interpolant does not get
  // this shortcut: its tangent is anchored at the left node.
  if (spec.drift.linear && traj.scheme == Scheme::reference) {
    out.method = SpaceMethod::exact_zero;
    out.n_samples = 0;
    out.total = kl0;
    return out;
  }

  const MatrixXd sigma_inv = inverse_of_spd(spec.sigma, "kl_continuous");
  const double eps = spec.epsilon;
  const double dt = traj.grid.dt();
  const int k_steps = traj.grid.steps;

  double residual = 0.0;
  double var = 0.0;
  if (traj.scheme == Scheme::reference) {
    std::vector<ResidualEstimate> node(k_steps + 1);
    parallel_for(k_steps + 1, exec, [&](std::int64_t i) {
      const MatrixXd cov_eps = eps * traj.cov[i];
      node[i] = residual_expectation(spec.drift, sigma_inv, traj.mean[i],
                                     traj.mean[i], traj.mean[i], cov_eps, opts,
                                     std::uint32_t(i), Exec::serial);
    });
    for (int i = 0; i <= k_steps; ++i) {
      const double w = (i == 0 || i == k_steps) ? 0.5 * dt : dt;
      residual += w * node[i].value;
      var += w * w * node[i].std_error * node[i].std_error;
    }
  } else {
    // Each segment contributes a trapezoid with its own tangent anchor; the
    // integrand jumps at nodes because the anchor index changes there.
    std::vector<ResidualEstimate> edge(2 * k_steps);
    parallel_for(2 * k_steps, exec, [&](std::int64_t e) {
      const int k = int(e / 2);
      const bool right = e % 2 != 0;
      const int node_idx = right ? k + 1 : k;
      const MatrixXd cov_eps = eps * traj.cov[node_idx];
      edge[e] = residual_expectation(spec.drift, sigma_inv, traj.mean[k],
                                     traj.mean[node_idx], traj.mean[node_idx],
                                     cov_eps, opts, std::uint32_t(e),
                                     Exec::serial);
    });
    for (int e = 0; e < 2 * k_steps; ++e) {
      const double w = 0.5 * dt;
      residual += w * edge[e].value;
      var += w * w * edge[e].std_error * edge[e].std_error;
    }
  }
  out.residual_term = residual / (2.0 * eps);
  out.std_error = std::sqrt(var) / (2.0 * eps);
  out.total = kl0 + out.residual_term;
  return out;
}

KlEstimate kl_discrete(const MomentTrajectory& traj, const SdeSpec& spec,
                       double kl0, int upto_k, const EstimatorOptions& opts,
                       Exec exec) {
  if (traj.scheme != Scheme::factored)
    throw UsageError("kl_discrete: needs a factored trajectory (got " +
                     std::string(scheme_name(traj.scheme)) + ")");
  check_spec_matches(traj, spec, "kl_discrete");
  if (upto_k < 1 || upto_k > traj.grid.steps)
    throw UsageError("kl_discrete: step count outside [1, K]");

  KlEstimate out;
  out.initial_term = kl0;
  out.seed = opts.seed;
  out.method = opts.method;
  out.n_samples = opts.method == SpaceMethod::gauss_hermite ? opts.gh_order
                                                            : opts.n_samples;
  if (spec.drift.linear) {
    out.method = SpaceMethod::exact_zero;
    out.n_samples = 0;
    out.total = kl0;
    return out;
  }

  const MatrixXd sigma_inv = inverse_of_spd(spec.sigma, "kl_discrete");
  const double eps = spec.epsilon;
  const double dt = traj.grid.dt();

  std::vector<ResidualEstimate> node(upto_k);
  parallel_for(upto_k, exec, [&](std::int64_t j) {
    const MatrixXd cov_eps = eps * traj.cov[j];
    node[j] = residual_expectation(spec.drift, sigma_inv, traj.mean[j],
                                   traj.mean[j], traj.mean[j], cov_eps, opts,
                                   std::uint32_t(j), Exec::serial);
  });
  double residual = 0.0;
  double var = 0.0;
  for (int j = 0; j < upto_k; ++j) {
    residual += node[j].value;
    var += node[j].std_error * node[j].std_error;
  }
  out.residual_term = residual * dt / (2.0 * eps);
  out.std_error = std::sqrt(var) * dt / (2.0 * eps);
  out.total = kl0 + out.residual_term;
  return out;
}

JointKlEstimate kl_bruteforce_joint(const SdeSpec& spec,
                                    const MomentTrajectory& traj, int k, long n,
                                    std::uint64_t seed, Exec exec) {
  if (traj.scheme != Scheme::factored)
    throw UsageError("kl_bruteforce_joint: needs a factored trajectory");
  check_spec_matches(traj, spec, "kl_bruteforce_joint");
  if (k < 1 || k > traj.grid.steps)
    throw UsageError("kl_bruteforce_joint: step count outside [1, K]");
  if (k > 25 || spec.drift.dim > 2)
    throw UsageError("kl_bruteforce_joint: cost guard k <= 25, dim <= 2");
  if (n < 2) throw UsageError("kl_bruteforce_joint: needs at least two chains");

  const int d = spec.drift.dim;
  const double dt = traj.grid.dt();
  const double eps = spec.epsilon;
  const double noise_scale = std::sqrt(eps * dt);
  const double mart_scale = std::sqrt(dt / eps);

  std::vector<VectorXd> node_drift(k);
  std::vector<MatrixXd> node_jac(k);
  for (int j = 0; j < k; ++j) {
    node_drift[j] = traj.drift.eval_drift(traj.mean[j]);
    node_jac[j] = traj.drift.eval_jacobian(traj.mean[j]);
  }
  const auto chol = spec.sigma_chol.triangularView<Eigen::Lower>();
  const MatrixXd init_factor =
      spec.init.kind == InitKind::gaussian
          ? MatrixXd(std::sqrt(eps) * psd_factor(spec.init.cov))
          : MatrixXd();

  std::vector<double> logratio(n);
  parallel_for(n, exec, [&](std::int64_t p) {
    VectorXd l(d), xi(d), g(d), diff(d), y(d);
    l = spec.init.point;
    if (spec.init.kind == InitKind::gaussian) {
      rng::fill_normals(seed, rng::Stream::initial_draw, std::uint64_t(p), 0,
                        xi.data(), d);
      l.noalias() += init_factor * xi;
    }
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      g = node_drift[j];
      g.noalias() += node_jac[j] * (l - traj.mean[j]);
      spec.drift.drift(l, diff);
      diff = g - diff;  // tangent minus true drift
      y = chol.solve(diff);
      rng::fill_normals(seed, rng::Stream::transition, std::uint64_t(p),
                        std::uint32_t(j), xi.data(), d);
      acc += (dt / (2.0 * eps)) * y.squaredNorm() + mart_scale * xi.dot(y);
      l += dt * g;
      l.noalias() += noise_scale * (spec.sigma_chol * xi);
    }
    logratio[p] = acc;
  });

  double sum = 0.0;
  for (long p = 0; p < n; ++p) sum += logratio[p];
  const double avg = sum / double(n);
  double ss = 0.0;
  for (long p = 0; p < n; ++p) {
    const double dlt = logratio[p] - avg;
    ss += dlt * dlt;
  }
  if (!std::isfinite(avg))
    throw NumericError("kl_bruteforce_joint: non-finite log ratio");
  JointKlEstimate out;
  out.value = avg;
  out.std_error = std::sqrt(ss / (double(n) * double(n - 1)));
  out.n_samples = n;
  out.seed = seed;
  return out;
}

double rate_functional(const DriftModel& model, const MatrixXd& sigma,
                       const TimeGrid& grid, const std::vector<VectorXd>& path,
                       const VectorXd& v0) {
  if (int(path.size()) != grid.steps + 1)
    throw UsageError("rate_functional: path does not match the grid");
  if (v0.size() != model.dim)
    throw UsageError("rate_functional: starting point has wrong dimension");
  for (const auto& p : path)
    if (p.size() != model.dim)
      throw UsageError("rate_functional: path node has wrong dimension");
  if (path[0] != v0) return kl_infinite;

  const MatrixXd sigma_inv = inverse_of_spd(sigma, "rate_functional");
  const double dt = grid.dt();
  const int d = model.dim;
  VectorXd slope(d), mid(d), f(d), r(d);
  double acc = 0.0;
  for (int j = 0; j < grid.steps; ++j) {
    slope = (path[j + 1] - path[j]) / dt;
    mid = 0.5 * (path[j] + path[j + 1]);
    model.drift(mid, f);
    r = slope - f;
    acc += dt * r.dot(sigma_inv * r);
  }
  if (!std::isfinite(acc))
    throw NumericError("rate_functional: non-finite action");
  return 0.5 * acc;
}

}  // namespace smallnoise
