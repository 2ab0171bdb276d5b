#pragma once

#include <optional>
#include <vector>

#include "smallnoise/kl.hpp"
#include "smallnoise/tv.hpp"

namespace smallnoise {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  std::vector<double> residuals;
  bool degenerate_zero = false;  // set by sweeps when values cannot be logged
};

/// Ordinary least squares of log(y) against log(x). Rejects non-positive data.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepConfig {
  DriftModel drift;
  MatrixXd sigma;
  InitialCondition init;
  double horizon = 1.0;
  std::vector<double> values;  // sweep variable, strictly descending, >= 4 entries
  double epsilon = 1e-3;       // fixed noise scale for the step-size sweep
  int steps = 1000;            // discrete-chain step count for the eps sweep
  double dt_sim = 1e-3;        // Euler-Maruyama step for TV sampling
  long tv_paths = 100000;
  int tv_bins = 200;
  bool with_tv = false;
  EstimatorOptions estimator;
  double ref_max_step = -1.0;
  std::uint64_t seed = 0;
};

struct EpsSweepRow {
  double epsilon = 0.0;
  KlEstimate continuous;
  KlEstimate discrete;
  std::optional<TvEstimate> tv;
};

struct EpsSweepResult {
  std::vector<EpsSweepRow> rows;
  SlopeFit fit_continuous;
  SlopeFit fit_discrete;
};

/// KL against the true law as the noise scale shrinks: the continuous-time
/// estimate uses the reference trajectory, the discrete-time one the factored
/// chain at cfg.steps. Optional companion TV between N(m(T), eps C(T)) and
/// simulated terminal states (scalar models only).
EpsSweepResult sweep_epsilon(const SweepConfig& cfg, Exec exec = Exec::parallel);

struct DtSweepRow {
  double dt = 0.0;
  KlEstimate kl;
  double excess = 0.0;  // kl.total minus the reference-trajectory KL
  double ratio = 0.0;   // kl.total * eps / dt^2
  std::optional<TvEstimate> tv;
};

struct DtSweepResult {
  std::vector<DtSweepRow> rows;
  KlEstimate kl_ref;
  SlopeFit fit;  // log(excess) against log(dt)
};

/// KL of the euler-interpolant Gaussian process against the true law as the
/// moment step shrinks, with the reference-trajectory KL subtracted to
/// isolate the discretization contribution. Every dt must divide the horizon.
DtSweepResult sweep_dt(const SweepConfig& cfg, Exec exec = Exec::parallel);

struct WrongMeanRow {
  double epsilon = 0.0;
  TvEstimate tv;
};

struct WrongMeanResult {
  std::vector<WrongMeanRow> rows;
  bool monotone = false;    // non-decreasing as eps shrinks, within 3x errors
  double tv_at_smallest = 0.0;
};

/// TV between N(m(T) + offset, eps C(T)) and simulated terminal states for a
/// descending list of noise scales. offset = 0 is the correct-mean control.
WrongMeanResult wrong_mean_tv(const SweepConfig& cfg, const VectorXd& offset,
                              Exec exec = Exec::parallel);

}  // namespace smallnoise
