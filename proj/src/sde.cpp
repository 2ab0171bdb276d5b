#include "smallnoise/sde.hpp"

#include <cmath>
#include <string>

#include "smallnoise/rng.hpp"

namespace smallnoise {

namespace {

constexpr std::size_t kEnsembleByteCap = std::size_t(2) << 30;

void throw_first_failure(const std::vector<std::int32_t>& failed_step) {
  for (std::size_t p = 0; p < failed_step.size(); ++p) {
    if (failed_step[p] >= 0)
      throw NumericError("simulation diverged at path " + std::to_string(p) +
                         ", step " + std::to_string(failed_step[p]));
  }
}

}  // namespace

InitialCondition InitialCondition::dirac(VectorXd v0) {
  InitialCondition ic;
  ic.kind = InitKind::dirac;
  ic.cov = MatrixXd::Zero(v0.size(), v0.size());
  ic.point = std::move(v0);
  return ic;
}

InitialCondition InitialCondition::gaussian(VectorXd m0, MatrixXd c0) {
  if (c0.rows() != m0.size() || c0.cols() != m0.size())
    throw UsageError("initial covariance has wrong shape");
  InitialCondition ic;
  ic.kind = InitKind::gaussian;
  ic.point = std::move(m0);
  ic.cov = std::move(c0);
  return ic;
}

SdeSpec::SdeSpec(DriftModel drift_, MatrixXd sigma_, double epsilon_,
                 InitialCondition init_)
    : drift(std::move(drift_)),
      sigma(std::move(sigma_)),
      epsilon(epsilon_),
      init(std::move(init_)) {
  if (sigma.rows() != drift.dim || sigma.cols() != drift.dim)
    throw UsageError("diffusion matrix has wrong shape");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * (1.0 + sigma.cwiseAbs().maxCoeff()))
    throw UsageError("diffusion matrix must be symmetric");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw UsageError("noise scale must be a finite non-negative number");
  if (init.point.size() != drift.dim)
    throw UsageError("initial condition has wrong dimension");
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw UsageError("diffusion matrix must be positive definite");
  sigma_chol = llt.matrixL();
}

const char* path_law_name(PathLaw law) {
  return law == PathLaw::nonlinear ? "nonlinear" : "linearized";
}

namespace {

// Shared Euler-Maruyama driver. `tangent` selects the linearized drift built
// from precomputed node quantities; both laws consume identical noise.
struct StepContext {
  const SdeSpec& spec;
  const TimeGrid& grid;
  std::uint64_t seed;
  const MomentTrajectory* traj = nullptr;  // linearized runs only
  std::vector<VectorXd> node_drift;        // f(m_k)
  std::vector<MatrixXd> node_jac;          // J(m_k)
};

void prepare_tangent(StepContext& ctx) {
  const auto& traj = *ctx.traj;
  const int d = ctx.spec.drift.dim;
  ctx.node_drift.resize(ctx.grid.steps);
  ctx.node_jac.resize(ctx.grid.steps);
  VectorXd f(d);
  MatrixXd j(d, d);
  for (int k = 0; k < ctx.grid.steps; ++k) {
    ctx.spec.drift.drift(traj.mean[k], f);
    ctx.spec.drift.jacobian(traj.mean[k], j);
    ctx.node_drift[k] = f;
    ctx.node_jac[k] = j;
  }
}

template <bool Tangent, class Sink>
void run_path(const StepContext& ctx, const MatrixXd& init_factor,
              std::int64_t p, std::int32_t* failed_step, Sink&& sink) {
  const int d = ctx.spec.drift.dim;
  const int steps = ctx.grid.steps;
  const double dt = ctx.grid.dt();
  const double noise_scale = std::sqrt(ctx.spec.epsilon * dt);

  VectorXd v(d), xi(d), f(d), incr(d);
  v = ctx.spec.init.point;
  if (ctx.spec.init.kind == InitKind::gaussian) {
    rng::fill_normals(ctx.seed, rng::Stream::initial_draw, std::uint64_t(p), 0,
                      xi.data(), d);
    v.noalias() += init_factor * xi;
  }
  sink(0, v);
  for (int k = 0; k < steps; ++k) {
    if constexpr (Tangent) {
      f = ctx.node_drift[k];
      f.noalias() += ctx.node_jac[k] * (v - ctx.traj->mean[k]);
    } else {
      ctx.spec.drift.drift(v, f);
    }
    rng::fill_normals(ctx.seed, rng::Stream::transition, std::uint64_t(p),
                      std::uint32_t(k), xi.data(), d);
    incr.noalias() = ctx.spec.sigma_chol * xi;
    v += dt * f + noise_scale * incr;
    if (!v.allFinite()) {
      *failed_step = k + 1;
      return;
    }
    sink(k + 1, v);
  }
}

template <bool Tangent>
PathEnsemble simulate_impl(const SdeSpec& spec, const TimeGrid& grid,
                           const MomentTrajectory* traj, int n_paths,
                           std::uint64_t seed, Exec exec) {
  if (n_paths < 1) throw UsageError("path count must be positive");
  const std::size_t bytes =
      std::size_t(n_paths) * (grid.steps + 1) * spec.drift.dim * sizeof(double);
  if (bytes > kEnsembleByteCap)
    throw UsageError("ensemble too large to store; use terminal_samples");

  StepContext ctx{spec, grid, seed, traj};
  if constexpr (Tangent) {
    if (traj->drift.name != spec.drift.name || traj->drift.dim != spec.drift.dim)
      throw UsageError("linearized simulation requires the same drift");
    prepare_tangent(ctx);
  }
  const MatrixXd init_factor =
      spec.init.kind == InitKind::gaussian
          ? MatrixXd(std::sqrt(spec.epsilon) * psd_factor(spec.init.cov))
          : MatrixXd();

  PathEnsemble ens;
  ens.grid = grid;
  ens.n_paths = n_paths;
  ens.dim = spec.drift.dim;
  ens.law = Tangent ? PathLaw::linearized : PathLaw::nonlinear;
  ens.seed = seed;
  ens.data.resize(std::size_t(n_paths) * (grid.steps + 1) * spec.drift.dim);

  std::vector<std::int32_t> failed(n_paths, -1);
  parallel_for(n_paths, exec, [&](std::int64_t p) {
    run_path<Tangent>(ctx, init_factor, p, &failed[p],
                      [&](int k, const VectorXd& v) {
                        double* dst = ens.mutable_state(int(p), k);
                        for (int i = 0; i < ens.dim; ++i) dst[i] = v[i];
                      });
  });
  throw_first_failure(failed);
  return ens;
}

}  // namespace

PathEnsemble simulate_nonlinear(const SdeSpec& spec, const TimeGrid& grid,
                                int n_paths, std::uint64_t seed, Exec exec) {
  return simulate_impl<false>(spec, grid, nullptr, n_paths, seed, exec);
}

PathEnsemble simulate_linearized(const SdeSpec& spec,
                                 const MomentTrajectory& traj, int n_paths,
                                 std::uint64_t seed, Exec exec) {
  return simulate_impl<true>(spec, traj.grid, &traj, n_paths, seed, exec);
}

MatrixXd terminal_samples(const SdeSpec& spec, const TimeGrid& grid,
                          int n_paths, std::uint64_t seed, Exec exec) {
  if (n_paths < 1) throw UsageError("path count must be positive");
  StepContext ctx{spec, grid, seed, nullptr};
  const MatrixXd init_factor =
      spec.init.kind == InitKind::gaussian
          ? MatrixXd(std::sqrt(spec.epsilon) * psd_factor(spec.init.cov))
          : MatrixXd();
  MatrixXd out(n_paths, spec.drift.dim);
  std::vector<std::int32_t> failed(n_paths, -1);
  parallel_for(n_paths, exec, [&](std::int64_t p) {
    run_path<false>(ctx, init_factor, p, &failed[p],
                    [&](int k, const VectorXd& v) {
                      if (k == grid.steps) out.row(p) = v.transpose();
                    });
  });
  throw_first_failure(failed);
  return out;
}

MatrixXd sample_gaussian(const VectorXd& mean, const MatrixXd& cov, int n,
                         std::uint64_t seed, Exec exec) {
  if (n < 1) throw UsageError("sample count must be positive");
  const int d = int(mean.size());
  const MatrixXd factor = psd_factor(cov);
  MatrixXd out(n, d);
  parallel_for(n, exec, [&](std::int64_t p) {
    VectorXd xi(d);
    rng::fill_normals(seed, rng::Stream::gaussian_sample, std::uint64_t(p), 0,
                      xi.data(), d);
    out.row(p) = (mean + factor * xi).transpose();
  });
  if (!out.allFinite()) throw NumericError("gaussian sampling produced non-finite values");
  return out;
}

double initial_kl(const InitialCondition& nu0, const InitialCondition& mu0,
                  double epsilon) {
  if (nu0.point.size() != mu0.point.size())
    throw UsageError("initial_kl: dimension mismatch");
  if (nu0.kind == InitKind::dirac && mu0.kind == InitKind::dirac)
    return nu0.point == mu0.point ? 0.0 : kl_infinite;
  if (nu0.kind == InitKind::gaussian && mu0.kind == InitKind::gaussian) {
    if (!(epsilon > 0.0)) throw UsageError("initial_kl: eps must be positive");
    return gaussian_kl({nu0.point, MatrixXd(epsilon * nu0.cov)},
                       {mu0.point, MatrixXd(epsilon * mu0.cov)});
  }
  throw UsageError("initial_kl: only Dirac/Dirac and Gaussian/Gaussian pairs are supported");
}

}  // namespace smallnoise
