#include "smallnoise/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "smallnoise/io.hpp"

namespace smallnoise {

using nlohmann::json;

bool pinsker_holds(const KlEstimate& kl, const TvEstimate& tv) {
  const double klv = std::max(kl.total, 0.0);
  double combined = tv.stat_error;
  if (kl.std_error > 0.0)
    combined += 0.5 * kl.std_error / std::sqrt(std::max(klv, kl.std_error));
  return tv.value <= std::sqrt(klv) + 3.0 * combined;
}

namespace {

namespace fs = std::filesystem;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) ok = true;
    if (!ok) throw UsageError("unknown key '" + item.key() + "' in " + where);
  }
}

double require_number(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number()) throw UsageError(std::string(key) + " must be a number");
  return cfg[key].get<double>();
}

long require_integer(const json& cfg, const char* key, long fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number_integer())
    throw UsageError(std::string(key) + " must be an integer");
  return cfg[key].get<long>();
}

VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw UsageError(std::string(what) + " must be a non-empty array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw UsageError(std::string(what) + " must hold numbers");
    v[Eigen::Index(i)] = j[i].get<double>();
  }
  return v;
}

MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw UsageError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw UsageError(std::string(what) + " rows must be arrays");
  const std::size_t cols = j[0].size();
  MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw UsageError(std::string(what) + " must be rectangular");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw UsageError(std::string(what) + " must hold numbers");
      m(Eigen::Index(r), Eigen::Index(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

DriftModel drift_from_json(const json& j) {
  if (!j.contains("name")) throw UsageError("drift.name is required");
  const std::string name = j["name"].get<std::string>();
  if (name == "linear") {
    require_keys(j, "drift", {"name", "a", "b"});
    if (!j.contains("a") || !j.contains("b"))
      throw UsageError("linear drift needs 'a' and 'b'");
    return make_linear(matrix_from_json(j["a"], "drift.a"),
                       vector_from_json(j["b"], "drift.b"));
  }
  if (name == "double-well") {
    require_keys(j, "drift", {"name"});
    return make_double_well();
  }
  if (name == "cubic") {
    require_keys(j, "drift", {"name"});
    return make_cubic();
  }
  if (name == "lorenz63") {
    require_keys(j, "drift", {"name", "sigma", "rho", "beta"});
    return make_lorenz63(require_number(j, "sigma", 10.0),
                         require_number(j, "rho", 28.0),
                         require_number(j, "beta", 8.0 / 3.0));
  }
  throw UsageError("unknown drift '" + name + "'");
}

InitialCondition init_from_json(const json& j, int dim) {
  require_keys(j, "init", {"kind", "point", "cov"});
  if (!j.contains("kind")) throw UsageError("init.kind is required");
  const std::string kind = j["kind"].get<std::string>();
  if (!j.contains("point")) throw UsageError("init.point is required");
  VectorXd point = vector_from_json(j["point"], "init.point");
  if (point.size() != dim) throw UsageError("init.point has wrong dimension");
  if (kind == "dirac") {
    if (j.contains("cov")) throw UsageError("init.cov is not valid for a Dirac law");
    return InitialCondition::dirac(std::move(point));
  }
  if (kind == "gaussian") {
    if (!j.contains("cov")) throw UsageError("init.cov is required for a Gaussian law");
    return InitialCondition::gaussian(std::move(point),
                                      matrix_from_json(j["cov"], "init.cov"));
  }
  throw UsageError("init.kind must be 'dirac' or 'gaussian'");
}

EstimatorOptions estimator_from_json(const json& cfg, int dim,
                                     std::uint64_t seed) {
  EstimatorOptions opts = default_estimator(dim, seed);
  if (!cfg.contains("estimator")) return opts;
  const json& j = cfg["estimator"];
  require_keys(j, "estimator", {"method", "samples", "order"});
  if (j.contains("method"))
    opts.method = method_from_name(j["method"].get<std::string>());
  opts.n_samples = require_integer(j, "samples", opts.n_samples);
  opts.gh_order = int(require_integer(j, "order", opts.gh_order));
  if (opts.n_samples < 2) throw UsageError("estimator.samples must be at least 2");
  if (opts.gh_order < 1) throw UsageError("estimator.order must be positive");
  return opts;
}

/// Everything a command needs, resolved from the config with defaults filled.
struct RunPlan {
  std::string command;
  DriftModel drift;
  MatrixXd sigma;
  InitialCondition init;
  double horizon = 1.0;
  int steps = 1000;
  double epsilon = 1e-3;
  double kl0 = 0.0;
  std::uint64_t seed = 0;
  EstimatorOptions estimator;
  double ref_max_step = -1.0;
  std::string out_dir = "out";
  json raw;
};

RunPlan plan_from_json(const json& cfg) {
  require_keys(cfg, "config",
               {"command", "drift", "sigma", "epsilon", "horizon", "steps",
                "init", "estimator", "seed", "scheme", "upto", "paths", "law",
                "dump_paths", "kl0", "ref_max_step", "out", "sweep", "rate"});
  RunPlan plan;
  plan.raw = cfg;
  if (!cfg.contains("command")) throw UsageError("command is required");
  plan.command = cfg["command"].get<std::string>();
  if (!cfg.contains("drift")) throw UsageError("drift is required");
  plan.drift = drift_from_json(cfg["drift"]);
  plan.sigma = cfg.contains("sigma")
                   ? matrix_from_json(cfg["sigma"], "sigma")
                   : MatrixXd(MatrixXd::Identity(plan.drift.dim, plan.drift.dim));
  if (!cfg.contains("init")) throw UsageError("init is required");
  plan.init = init_from_json(cfg["init"], plan.drift.dim);
  plan.horizon = require_number(cfg, "horizon", 1.0);
  plan.steps = int(require_integer(cfg, "steps", 1000));
  plan.epsilon = require_number(cfg, "epsilon", 1e-3);
  plan.kl0 = require_number(cfg, "kl0", 0.0);
  plan.seed = std::uint64_t(require_integer(cfg, "seed", 0));
  plan.estimator = estimator_from_json(cfg, plan.drift.dim, plan.seed);
  plan.ref_max_step = require_number(cfg, "ref_max_step", -1.0);
  if (cfg.contains("out")) plan.out_dir = cfg["out"].get<std::string>();
  if (!(plan.horizon > 0.0)) throw UsageError("horizon must be positive");
  if (plan.steps < 1) throw UsageError("steps must be at least 1");
  return plan;
}

SweepConfig sweep_from_plan(const RunPlan& plan) {
  SweepConfig cfg;
  cfg.drift = plan.drift;
  cfg.sigma = plan.sigma;
  cfg.init = plan.init;
  cfg.horizon = plan.horizon;
  cfg.epsilon = plan.epsilon;
  cfg.steps = plan.steps;
  cfg.estimator = plan.estimator;
  cfg.ref_max_step = plan.ref_max_step;
  cfg.seed = plan.seed;
  if (!plan.raw.contains("sweep")) throw UsageError("sweep section is required");
  const json& j = plan.raw["sweep"];
  require_keys(j, "sweep",
               {"values", "dt_sim", "with_tv", "tv_paths", "tv_bins", "offset"});
  if (!j.contains("values")) throw UsageError("sweep.values is required");
  const VectorXd vals = vector_from_json(j["values"], "sweep.values");
  cfg.values.assign(vals.data(), vals.data() + vals.size());
  cfg.dt_sim = require_number(j, "dt_sim", 1e-3);
  cfg.tv_paths = require_integer(j, "tv_paths", 100000);
  cfg.tv_bins = int(require_integer(j, "tv_bins", 200));
  if (j.contains("with_tv")) {
    if (!j["with_tv"].is_boolean()) throw UsageError("sweep.with_tv must be a boolean");
    cfg.with_tv = j["with_tv"].get<bool>();
  }
  if (!(cfg.dt_sim > 0.0)) throw UsageError("sweep.dt_sim must be positive");
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open output file " + path.string());
  os << text;
}

struct CommandResult {
  json summary;
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  bool checks_pass = true;
};

json sample_moments_json(const MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  const VectorXd mean = samples.colwise().mean();
  MatrixXd centered = samples.rowwise() - mean.transpose();
  const MatrixXd cov = centered.transpose() * centered / double(n - 1);
  json jm = json::array(), jc = json::array();
  for (Eigen::Index i = 0; i < mean.size(); ++i) jm.push_back(json_number(mean[i]));
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < cov.cols(); ++k) row.push_back(json_number(cov(i, k)));
    jc.push_back(row);
  }
  return {{"mean", jm}, {"cov", jc}};
}

CommandResult cmd_simulate(const RunPlan& plan) {
  const int n_paths = int(require_integer(plan.raw, "paths", 1000));
  if (n_paths < 1) throw UsageError("paths must be positive");
  std::string law = "nonlinear";
  if (plan.raw.contains("law")) law = plan.raw["law"].get<std::string>();
  bool dump = false;
  if (plan.raw.contains("dump_paths")) dump = plan.raw["dump_paths"].get<bool>();

  const SdeSpec spec(plan.drift, plan.sigma, plan.epsilon, plan.init);
  const TimeGrid grid(plan.horizon, plan.steps);
  PathEnsemble ens;
  if (law == "nonlinear") {
    ens = simulate_nonlinear(spec, grid, n_paths, plan.seed);
  } else if (law == "linearized") {
    const MomentTrajectory traj =
        solve_moments(plan.drift, plan.sigma, grid, plan.init.point,
                      plan.init.cov, Scheme::factored);
    ens = simulate_linearized(spec, traj, n_paths, plan.seed);
  } else {
    throw UsageError("law must be 'nonlinear' or 'linearized'");
  }

  MatrixXd terminal(n_paths, plan.drift.dim);
  for (int p = 0; p < n_paths; ++p)
    terminal.row(p) = ens.state(p, grid.steps).transpose();

  CommandResult result;
  result.summary = {{"command", "simulate"},
                    {"law", law},
                    {"paths", n_paths},
                    {"steps", plan.steps},
                    {"epsilon", json_number(plan.epsilon)},
                    {"seed", plan.seed},
                    {"terminal", sample_moments_json(terminal)}};
  if (dump) {
    std::ostringstream os;
    write_ensemble_csv(os, ens);
    result.files.emplace_back("ensemble.csv", os.str());
  }
  return result;
}

CommandResult cmd_moments(const RunPlan& plan, bool checking) {
  if (!plan.raw.contains("scheme")) throw UsageError("moments needs a scheme");
  const Scheme scheme = scheme_from_name(plan.raw["scheme"].get<std::string>());
  MomentTrajectory traj;
  if (scheme == Scheme::reference) {
    traj = solve_reference(plan.drift, plan.sigma, plan.horizon,
                           plan.init.point, plan.init.cov, plan.ref_max_step);
  } else {
    traj = solve_moments(plan.drift, plan.sigma, TimeGrid(plan.horizon, plan.steps),
                         plan.init.point, plan.init.cov, scheme);
  }
  const bool psd_ok = traj.min_cov_eigenvalue >= -1e-12;
  if (!psd_ok)
    std::cerr << "warning: covariance lost positive semidefiniteness, "
              << "min eigenvalue " << traj.min_cov_eigenvalue << "\n";

  CommandResult result;
  json jm = json::array();
  for (Eigen::Index i = 0; i < traj.mean.back().size(); ++i)
    jm.push_back(json_number(traj.mean.back()[i]));
  result.summary = {{"command", "moments"},
                    {"scheme", scheme_name(scheme)},
                    {"nodes", traj.grid.steps + 1},
                    {"final_mean", jm},
                    {"min_cov_eigenvalue", json_number(traj.min_cov_eigenvalue)},
                    {"psd_ok", psd_ok}};
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  result.files.emplace_back("trajectory.csv", os.str());
  if (checking && scheme == Scheme::factored) result.checks_pass = psd_ok;
  return result;
}

CommandResult cmd_kl_continuous(const RunPlan& plan) {
  std::string scheme = "reference";
  if (plan.raw.contains("scheme")) scheme = plan.raw["scheme"].get<std::string>();
  const SdeSpec spec(plan.drift, plan.sigma, plan.epsilon, plan.init);
  MomentTrajectory traj;
  if (scheme == "reference") {
    traj = solve_reference(plan.drift, plan.sigma, plan.horizon,
                           plan.init.point, plan.init.cov, plan.ref_max_step);
  } else if (scheme == "euler") {
    traj = solve_moments(plan.drift, plan.sigma, TimeGrid(plan.horizon, plan.steps),
                         plan.init.point, plan.init.cov, Scheme::euler);
  } else {
    throw UsageError("kl-continuous scheme must be 'reference' or 'euler'");
  }
  const KlEstimate kl = kl_continuous(traj, spec, plan.kl0, plan.estimator);
  CommandResult result;
  result.summary = kl_to_json(kl);
  result.summary["command"] = "kl-continuous";
  result.summary["scheme"] = scheme;
  result.files.emplace_back("kl.json", result.summary.dump(2) + "\n");
  return result;
}

CommandResult cmd_kl_discrete(const RunPlan& plan) {
  const SdeSpec spec(plan.drift, plan.sigma, plan.epsilon, plan.init);
  const MomentTrajectory traj =
      solve_moments(plan.drift, plan.sigma, TimeGrid(plan.horizon, plan.steps),
                    plan.init.point, plan.init.cov, Scheme::factored);
  const int upto = int(require_integer(plan.raw, "upto", plan.steps));
  const KlEstimate kl = kl_discrete(traj, spec, plan.kl0, upto, plan.estimator);
  CommandResult result;
  result.summary = kl_to_json(kl);
  result.summary["command"] = "kl-discrete";
  result.summary["upto"] = upto;
  result.files.emplace_back("kl.json", result.summary.dump(2) + "\n");
  return result;
}

json pinsker_report(const KlEstimate& kl, const TvEstimate& tv) {
  return {{"tv", json_number(tv.value)},
          {"sqrt_kl", json_number(std::sqrt(std::max(kl.total, 0.0)))},
          {"holds", pinsker_holds(kl, tv)}};
}

CommandResult cmd_sweep_eps(const RunPlan& plan, bool checking) {
  const SweepConfig cfg = sweep_from_plan(plan);
  const EpsSweepResult result = sweep_epsilon(cfg);

  bool pinsker_all = true;
  json rows = json::array();
  for (const auto& row : result.rows) {
    json jr{{"epsilon", json_number(row.epsilon)},
            {"kl_continuous", kl_to_json(row.continuous)},
            {"kl_discrete", kl_to_json(row.discrete)}};
    if (row.tv) {
      jr["tv"] = tv_to_json(*row.tv);
      jr["pinsker"] = pinsker_report(row.continuous, *row.tv);
      pinsker_all = pinsker_all && pinsker_holds(row.continuous, *row.tv);
    }
    rows.push_back(jr);
  }
  const bool slope_ok = !result.fit_continuous.degenerate_zero &&
                        !result.fit_discrete.degenerate_zero &&
                        result.fit_continuous.slope >= 0.85 &&
                        result.fit_continuous.slope <= 1.15 &&
                        result.fit_continuous.r2 >= 0.98 &&
                        result.fit_discrete.slope >= 0.85 &&
                        result.fit_discrete.slope <= 1.15 &&
                        result.fit_discrete.r2 >= 0.98;
  const bool degenerate = result.fit_continuous.degenerate_zero &&
                          result.fit_discrete.degenerate_zero;

  CommandResult out;
  out.summary = {{"command", "sweep-eps"},
                 {"seed", plan.seed},
                 {"fit_continuous", fit_to_json(result.fit_continuous)},
                 {"fit_discrete", fit_to_json(result.fit_discrete)},
                 {"rows", rows},
                 {"slope_in_band", slope_ok},
                 {"pinsker_all", pinsker_all}};
  std::ostringstream osc, osd;
  write_eps_sweep_csv(osc, result, false);
  write_eps_sweep_csv(osd, result, true);
  out.files.emplace_back("sweep_eps_continuous.csv", osc.str());
  out.files.emplace_back("sweep_eps_discrete.csv", osd.str());
  if (checking) out.checks_pass = (slope_ok || degenerate) && pinsker_all;
  return out;
}

CommandResult cmd_sweep_dt(const RunPlan& plan, bool checking) {
  const SweepConfig cfg = sweep_from_plan(plan);
  const DtSweepResult result = sweep_dt(cfg);

  bool pinsker_all = true;
  json rows = json::array();
  for (const auto& row : result.rows) {
    json jr{{"dt", json_number(row.dt)},
            {"kl", kl_to_json(row.kl)},
            {"excess", json_number(row.excess)},
            {"ratio_kl_eps_dt2", json_number(row.ratio)}};
    if (row.tv) {
      jr["tv"] = tv_to_json(*row.tv);
      jr["pinsker"] = pinsker_report(row.kl, *row.tv);
      pinsker_all = pinsker_all && pinsker_holds(row.kl, *row.tv);
    }
    rows.push_back(jr);
  }
  const bool slope_ok = !result.fit.degenerate_zero && result.fit.slope >= 1.7 &&
                        result.fit.slope <= 2.3;

  CommandResult out;
  out.summary = {{"command", "sweep-dt"},
                 {"seed", plan.seed},
                 {"epsilon", json_number(plan.epsilon)},
                 {"kl_reference", kl_to_json(result.kl_ref)},
                 {"fit_excess", fit_to_json(result.fit)},
                 {"rows", rows},
                 {"slope_in_band", slope_ok},
                 {"pinsker_all", pinsker_all}};
  std::ostringstream os;
  write_dt_sweep_csv(os, result);
  out.files.emplace_back("sweep_dt.csv", os.str());
  if (checking) out.checks_pass = slope_ok && pinsker_all;
  return out;
}

CommandResult cmd_wrong_mean(const RunPlan& plan, bool checking) {
  const SweepConfig cfg = sweep_from_plan(plan);
  if (!plan.raw["sweep"].contains("offset"))
    throw UsageError("wrong-mean-tv needs sweep.offset");
  const VectorXd offset =
      vector_from_json(plan.raw["sweep"]["offset"], "sweep.offset");
  const WrongMeanResult result = wrong_mean_tv(cfg, offset);

  json rows = json::array();
  for (const auto& row : result.rows)
    rows.push_back(
        {{"epsilon", json_number(row.epsilon)}, {"tv", tv_to_json(row.tv)}});
  const bool zero_offset = offset.isZero(0.0);
  const bool separation_ok = zero_offset ? result.tv_at_smallest <= 0.1
                                         : result.tv_at_smallest >= 0.99;

  CommandResult out;
  out.summary = {{"command", "wrong-mean-tv"},
                 {"seed", plan.seed},
                 {"offset", json_number(offset[0])},
                 {"monotone", result.monotone},
                 {"tv_at_smallest", json_number(result.tv_at_smallest)},
                 {"separation_ok", separation_ok},
                 {"rows", rows}};
  std::ostringstream os;
  write_wrong_mean_csv(os, result);
  out.files.emplace_back("wrong_mean_tv.csv", os.str());
  if (checking)
    out.checks_pass = separation_ok && (zero_offset || result.monotone);
  return out;
}

CommandResult cmd_rate(const RunPlan& plan) {
  if (!plan.raw.contains("rate")) throw UsageError("rate section is required");
  const json& j = plan.raw["rate"];
  require_keys(j, "rate", {"kind", "value", "file"});
  if (!j.contains("kind")) throw UsageError("rate.kind is required");
  const std::string kind = j["kind"].get<std::string>();

  TimeGrid grid(plan.horizon, plan.steps);
  std::vector<VectorXd> path;
  if (kind == "ode") {
    const MomentTrajectory ref =
        solve_reference(plan.drift, plan.sigma, plan.horizon, plan.init.point,
                        plan.init.cov, plan.ref_max_step);
    grid = ref.grid;
    path = ref.mean;
  } else if (kind == "constant") {
    if (!j.contains("value")) throw UsageError("rate.value is required");
    const VectorXd value = vector_from_json(j["value"], "rate.value");
    path.assign(grid.steps + 1, value);
  } else if (kind == "csv") {
    if (!j.contains("file")) throw UsageError("rate.file is required");
    std::ifstream is(j["file"].get<std::string>());
    if (!is) throw UsageError("cannot open rate path file");
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#' || std::isalpha(line[0])) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<double> row;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      if (int(row.size()) != plan.drift.dim + 1)
        throw UsageError("rate path rows must hold t plus one value per dimension");
      VectorXd v(plan.drift.dim);
      for (int i = 0; i < plan.drift.dim; ++i) v[i] = row[i + 1];
      path.push_back(v);
    }
    if (int(path.size()) != grid.steps + 1)
      throw UsageError("rate path must have steps + 1 rows");
  } else {
    throw UsageError("rate.kind must be 'ode', 'constant' or 'csv'");
  }

  const double value =
      rate_functional(plan.drift, plan.sigma, grid, path, plan.init.point);
  CommandResult result;
  result.summary = {{"command", "rate"},
                    {"kind", kind},
                    {"value", json_number(value)}};
  result.files.emplace_back("rate.json", result.summary.dump(2) + "\n");
  return result;
}

json apply_overrides(json cfg, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto pos = item.find('=');
    if (pos == std::string::npos || pos == 0)
      throw UsageError("override must look like key=value: " + item);
    std::string key = item.substr(0, pos);
    const std::string raw = item.substr(pos + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // bare strings are allowed

    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) throw UsageError("bad override key: " + key);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return cfg;
}

}  // namespace

int run_cli(const CliOptions& opts) {
  try {
    if (opts.config_path.empty()) throw UsageError("--config is required");
    std::ifstream is(opts.config_path);
    if (!is) throw UsageError("cannot open config " + opts.config_path);
    json cfg;
    try {
      cfg = json::parse(is);
    } catch (const json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = apply_overrides(cfg, opts.overrides);

    RunPlan plan;
    try {
      plan = plan_from_json(cfg);
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad config value: ") + e.what());
    }
    if (!opts.out_dir.empty()) plan.out_dir = opts.out_dir;
    set_thread_count(opts.threads);

    if (opts.dry_run) {
      json summary = {{"dry_run", true},
                      {"command", plan.command},
                      {"out", plan.out_dir},
                      {"seed", plan.seed},
                      {"config", cfg}};
      std::cout << summary.dump() << std::endl;
      return kExitOk;
    }

    CommandResult result;
    try {
      if (plan.command == "simulate")
        result = cmd_simulate(plan);
      else if (plan.command == "moments")
        result = cmd_moments(plan, opts.check);
      else if (plan.command == "kl-continuous")
        result = cmd_kl_continuous(plan);
      else if (plan.command == "kl-discrete")
        result = cmd_kl_discrete(plan);
      else if (plan.command == "sweep-eps")
        result = cmd_sweep_eps(plan, opts.check);
      else if (plan.command == "sweep-dt")
        result = cmd_sweep_dt(plan, opts.check);
      else if (plan.command == "wrong-mean-tv")
        result = cmd_wrong_mean(plan, opts.check);
      else if (plan.command == "rate")
        result = cmd_rate(plan);
      else
        throw UsageError("unknown command '" + plan.command + "'");
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad config value: ") + e.what());
    }

    result.summary["out"] = plan.out_dir;
    fs::create_directories(plan.out_dir);
    for (const auto& [name, content] : result.files)
      write_text(fs::path(plan.out_dir) / name, content);
    write_text(fs::path(plan.out_dir) / "summary.json",
               result.summary.dump(2) + "\n");
    std::cout << result.summary.dump() << std::endl;

    if (opts.check && !result.checks_pass) {
      std::cerr << "check failed for command " << plan.command << "\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace smallnoise
