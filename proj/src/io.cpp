#include "smallnoise/io.hpp"

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

namespace smallnoise {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const MomentTrajectory& traj) {
  const int d = traj.drift.dim;
  os << "# scheme: " << scheme_name(traj.scheme) << "\n";
  os << "t";
  for (int i = 0; i < d; ++i) os << ",m" << (i + 1);
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) os << ",c" << (i + 1) << (j + 1);
  os << "\n";
  for (int k = 0; k <= traj.grid.steps; ++k) {
    os << format_double(traj.grid.node(k));
    for (int i = 0; i < d; ++i) os << "," << format_double(traj.mean[k][i]);
    for (int j = 0; j < d; ++j)
      for (int i = j; i < d; ++i)
        os << "," << format_double(traj.cov[k](i, j));
    os << "\n";
  }
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens) {
  os << "# law: " << path_law_name(ens.law) << "\n";
  os << "# seed: " << ens.seed << "\n";
  os << "path,node,t";
  for (int i = 0; i < ens.dim; ++i) os << ",v" << (i + 1);
  os << "\n";
  for (int p = 0; p < ens.n_paths; ++p) {
    for (int k = 0; k <= ens.grid.steps; ++k) {
      os << p << "," << k << "," << format_double(ens.grid.node(k));
      const auto v = ens.state(p, k);
      for (int i = 0; i < ens.dim; ++i) os << "," << format_double(v[i]);
      os << "\n";
    }
  }
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

nlohmann::json kl_to_json(const KlEstimate& kl) {
  return {{"value", json_number(kl.total)},
          {"initial_term", json_number(kl.initial_term)},
          {"residual_term", json_number(kl.residual_term)},
          {"stderr", json_number(kl.std_error)},
          {"method", method_name(kl.method)},
          {"n_samples", kl.n_samples},
          {"seed", kl.seed}};
}

nlohmann::json tv_to_json(const TvEstimate& tv) {
  return {{"value", json_number(tv.value)},
          {"stat_error", json_number(tv.stat_error)},
          {"bins", tv.bins},
          {"n_samples", tv.n_samples}};
}

nlohmann::json fit_to_json(const SlopeFit& fit) {
  nlohmann::json j{{"slope", json_number(fit.slope)},
                   {"intercept", json_number(fit.intercept)},
                   {"r2", json_number(fit.r2)},
                   {"degenerate_zero", fit.degenerate_zero}};
  j["residuals"] = nlohmann::json::array();
  for (const double r : fit.residuals) j["residuals"].push_back(json_number(r));
  return j;
}

namespace {

const char* kSweepHeader =
    "sweep_value,kl_total,kl_initial,kl_residual,stderr,tv,tv_err\n";

void write_sweep_row(std::ostream& os, double value, const KlEstimate* kl,
                     const TvEstimate* tv) {
  os << format_double(value) << ",";
  if (kl)
    os << format_double(kl->total) << "," << format_double(kl->initial_term)
       << "," << format_double(kl->residual_term) << ","
       << format_double(kl->std_error);
  else
    os << ",,,";
  os << ",";
  if (tv)
    os << format_double(tv->value) << "," << format_double(tv->stat_error);
  else
    os << ",";
  os << "\n";
}

}  // namespace

void write_eps_sweep_csv(std::ostream& os, const EpsSweepResult& result,
                         bool discrete) {
  os << kSweepHeader;
  for (const auto& row : result.rows) {
    const KlEstimate& kl = discrete ? row.discrete : row.continuous;
    const TvEstimate* tv =
        (!discrete && row.tv.has_value()) ? &row.tv.value() : nullptr;
    write_sweep_row(os, row.epsilon, &kl, tv);
  }
}

void write_dt_sweep_csv(std::ostream& os, const DtSweepResult& result) {
  os << kSweepHeader;
  for (const auto& row : result.rows)
    write_sweep_row(os, row.dt, &row.kl,
                    row.tv.has_value() ? &row.tv.value() : nullptr);
}

void write_wrong_mean_csv(std::ostream& os, const WrongMeanResult& result) {
  os << kSweepHeader;
  for (const auto& row : result.rows)
    write_sweep_row(os, row.epsilon, nullptr, &row.tv);
}

}  // namespace smallnoise
