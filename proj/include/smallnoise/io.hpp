#pragma once

#include <nlohmann/json_fwd.hpp>
#include <ostream>
#include <string>

#include "smallnoise/experiments.hpp"
#include "smallnoise/moments.hpp"
#include "smallnoise/sde.hpp"

namespace smallnoise {

/// Round-trip-safe decimal form, stable across runs.
std::string format_double(double v);

/// Header comment with the scheme tag, then one row per node:
/// t, mean components, lower-triangular covariance entries column by column.
void write_trajectory_csv(std::ostream& os, const MomentTrajectory& traj);

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens);

/// Non-finite values serialize as the strings "inf", "-inf", "nan".
nlohmann::json json_number(double v);
nlohmann::json kl_to_json(const KlEstimate& kl);
nlohmann::json tv_to_json(const TvEstimate& tv);
nlohmann::json fit_to_json(const SlopeFit& fit);

/// Sweep tables share one column layout; cells that do not apply stay empty.
/// Columns: sweep_value, kl_total, kl_initial, kl_residual, stderr, tv, tv_err.
void write_eps_sweep_csv(std::ostream& os, const EpsSweepResult& result,
                         bool discrete);
void write_dt_sweep_csv(std::ostream& os, const DtSweepResult& result);
void write_wrong_mean_csv(std::ostream& os, const WrongMeanResult& result);

}  // namespace smallnoise
