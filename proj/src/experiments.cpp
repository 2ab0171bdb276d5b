#include "smallnoise/experiments.hpp"

#include <cmath>

namespace smallnoise {

namespace {

void check_sweep_values(const std::vector<double>& values) {
  if (values.size() < 4)
    throw UsageError("sweep needs at least four values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw UsageError("sweep values must be positive");
    if (i > 0 && values[i] >= values[i - 1])
      throw UsageError("sweep values must be strictly descending");
  }
}

TimeGrid simulation_grid(double horizon, double dt_sim) {
  const int k = std::max(1, int(std::lround(horizon / dt_sim)));
  return TimeGrid(horizon, k);
}

TvEstimate terminal_tv(const SweepConfig& cfg, const SdeSpec& spec,
                       const GaussianMeasure& gauss, Exec exec) {
  if (cfg.drift.dim != 1)
    throw UsageError("TV companion estimates need a one-dimensional model");
  const TimeGrid grid = simulation_grid(cfg.horizon, cfg.dt_sim);
  const MatrixXd samples =
      terminal_samples(spec, grid, int(cfg.tv_paths), cfg.seed, exec);
  return tv_estimate_1d(gauss,
                        std::span<const double>(samples.col(0).data(),
                                                std::size_t(samples.rows())),
                        cfg.tv_bins);
}

SlopeFit fit_or_degenerate(const std::vector<double>& x,
                           const std::vector<double>& y) {
  for (const double v : y) {
    if (!(v > 0.0)) {
      SlopeFit fit;
      fit.degenerate_zero = true;
      return fit;
    }
  }
  return fit_loglog(x, y);
}

}  // namespace

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw UsageError("fit_loglog: size mismatch");
  if (x.size() < 2) throw UsageError("fit_loglog: need at least two points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw UsageError("fit_loglog: data must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw UsageError("fit_loglog: abscissae are all equal");

  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.resize(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += fit.residuals[i] * fit.residuals[i];
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

EpsSweepResult sweep_epsilon(const SweepConfig& cfg, Exec exec) {
  check_sweep_values(cfg.values);
  const MomentTrajectory ref =
      solve_reference(cfg.drift, cfg.sigma, cfg.horizon, cfg.init.point,
                      cfg.init.cov, cfg.ref_max_step);
  const MomentTrajectory chain =
      solve_moments(cfg.drift, cfg.sigma, TimeGrid(cfg.horizon, cfg.steps),
                    cfg.init.point, cfg.init.cov, Scheme::factored);

  EpsSweepResult out;
  std::vector<double> cont_totals, disc_totals;
  for (const double eps : cfg.values) {
    const SdeSpec spec(cfg.drift, cfg.sigma, eps, cfg.init);
    EpsSweepRow row;
    row.epsilon = eps;
    row.continuous = kl_continuous(ref, spec, 0.0, cfg.estimator, exec);
    row.discrete = kl_discrete(chain, spec, 0.0, cfg.steps, cfg.estimator, exec);
    if (cfg.with_tv) {
      const GaussianMeasure gauss{ref.mean.back(),
                                  MatrixXd(eps * ref.cov.back())};
      row.tv = terminal_tv(cfg, spec, gauss, exec);
    }
    cont_totals.push_back(row.continuous.total);
    disc_totals.push_back(row.discrete.total);
    out.rows.push_back(std::move(row));
  }
  std::vector<double> eps_list(cfg.values);
  out.fit_continuous = fit_or_degenerate(eps_list, cont_totals);
  out.fit_discrete = fit_or_degenerate(eps_list, disc_totals);
  return out;
}

DtSweepResult sweep_dt(const SweepConfig& cfg, Exec exec) {
  check_sweep_values(cfg.values);
  std::vector<int> step_counts;
  for (const double dt : cfg.values) {
    const double ratio = cfg.horizon / dt;
    const int k = int(std::lround(ratio));
    if (k < 1 || std::abs(k * dt - cfg.horizon) > 1e-9 * std::max(1.0, cfg.horizon))
      throw UsageError("sweep step does not divide the horizon evenly");
    step_counts.push_back(k);
  }

  const SdeSpec spec(cfg.drift, cfg.sigma, cfg.epsilon, cfg.init);
  const MomentTrajectory ref =
      solve_reference(cfg.drift, cfg.sigma, cfg.horizon, cfg.init.point,
                      cfg.init.cov, cfg.ref_max_step);

  DtSweepResult out;
  out.kl_ref = kl_continuous(ref, spec, 0.0, cfg.estimator, exec);

  std::optional<MatrixXd> tv_samples;
  if (cfg.with_tv) {
    if (cfg.drift.dim != 1)
      throw UsageError("TV companion estimates need a one-dimensional model");
    const TimeGrid grid = simulation_grid(cfg.horizon, cfg.dt_sim);
    tv_samples = terminal_samples(spec, grid, int(cfg.tv_paths), cfg.seed, exec);
  }

  std::vector<double> dts, excesses;
  for (std::size_t i = 0; i < cfg.values.size(); ++i) {
    const double dt = cfg.values[i];
    const MomentTrajectory interp =
        solve_moments(cfg.drift, cfg.sigma, TimeGrid(cfg.horizon, step_counts[i]),
                      cfg.init.point, cfg.init.cov, Scheme::euler);
    DtSweepRow row;
    row.dt = dt;
    row.kl = kl_continuous(interp, spec, 0.0, cfg.estimator, exec);
    row.excess = row.kl.total - out.kl_ref.total;
    row.ratio = row.kl.total * cfg.epsilon / (dt * dt);
    if (tv_samples) {
      const GaussianMeasure gauss{interp.mean.back(),
                                  MatrixXd(cfg.epsilon * interp.cov.back())};
      row.tv = tv_estimate_1d(
          gauss,
          std::span<const double>(tv_samples->col(0).data(),
                                  std::size_t(tv_samples->rows())),
          cfg.tv_bins);
    }
    dts.push_back(dt);
    excesses.push_back(row.excess);
    out.rows.push_back(std::move(row));
  }
  out.fit = fit_or_degenerate(dts, excesses);
  return out;
}

WrongMeanResult wrong_mean_tv(const SweepConfig& cfg, const VectorXd& offset,
                              Exec exec) {
  check_sweep_values(cfg.values);
  if (cfg.drift.dim != 1 || offset.size() != 1)
    throw UsageError("wrong_mean_tv: needs a one-dimensional model and offset");
  const MomentTrajectory ref =
      solve_reference(cfg.drift, cfg.sigma, cfg.horizon, cfg.init.point,
                      cfg.init.cov, cfg.ref_max_step);
  const VectorXd shifted_mean = ref.mean.back() + offset;

  WrongMeanResult out;
  for (const double eps : cfg.values) {
    const SdeSpec spec(cfg.drift, cfg.sigma, eps, cfg.init);
    const GaussianMeasure gauss{shifted_mean, MatrixXd(eps * ref.cov.back())};
    WrongMeanRow row;
    row.epsilon = eps;
    row.tv = terminal_tv(cfg, spec, gauss, exec);
    out.rows.push_back(row);
  }
  out.monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    const double slack =
        3.0 * (out.rows[i - 1].tv.stat_error + out.rows[i].tv.stat_error);
    if (out.rows[i].tv.value < out.rows[i - 1].tv.value - slack)
      out.monotone = false;
  }
  out.tv_at_smallest = out.rows.back().tv.value;
  return out;
}

}  // namespace smallnoise
