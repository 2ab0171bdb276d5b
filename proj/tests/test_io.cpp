#include <doctest.h>

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "smallnoise/io.hpp"

using namespace smallnoise;
using nlohmann::json;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> cells_of(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("doubles survive the round trip through text") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e17, 1e-300, 0.0, -1.75}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("trajectory table carries its scheme and layout") {
  const DriftModel lin =
      make_linear((MatrixXd(2, 2) << -1.0, 0.0, 0.0, -2.0).finished(),
                  VectorXd::Zero(2));
  const auto traj = solve_moments(lin, MatrixXd::Identity(2, 2),
                                  TimeGrid(1.0, 2), VectorXd::Ones(2),
                                  MatrixXd::Zero(2, 2), Scheme::euler);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  const auto lines = lines_of(os.str());

  REQUIRE(lines.size() == 5);  // comment, header, three nodes
  CHECK(lines[0] == "# scheme: euler");
  CHECK(lines[1] == "t,m1,m2,c11,c21,c22");
  const auto first = cells_of(lines[2]);
  REQUIRE(first.size() == 6);
  CHECK(std::stod(first[0]) == 0.0);
  CHECK(std::stod(first[1]) == 1.0);
  const auto last = cells_of(lines[4]);
  CHECK(std::stod(last[0]) == 1.0);
  CHECK(std::stod(last[1]) == traj.mean[2](0));
  CHECK(std::stod(last[4]) == traj.cov[2](1, 0));
}

TEST_CASE("ensemble table lists every node of every path") {
  const SdeSpec spec(make_double_well(), MatrixXd::Identity(1, 1), 0.01,
                     InitialCondition::dirac(VectorXd::Constant(1, 0.5)));
  const PathEnsemble ens = simulate_nonlinear(spec, TimeGrid(1.0, 3), 2, 7);
  std::ostringstream os;
  write_ensemble_csv(os, ens);
  const auto lines = lines_of(os.str());

  REQUIRE(lines.size() == 3 + 2 * 4);
  CHECK(lines[0] == "# law: nonlinear");
  CHECK(lines[1] == "# seed: 7");
  CHECK(lines[2] == "path,node,t,v1");
  const auto row = cells_of(lines[3]);
  REQUIRE(row.size() == 4);
  CHECK(row[0] == "0");
  CHECK(row[1] == "0");
  CHECK(std::stod(row[3]) == 0.5);
}

TEST_CASE("non-finite numbers serialize as strings") {
  CHECK(json_number(1.5) == json(1.5));
  CHECK(json_number(std::numeric_limits<double>::infinity()) == json("inf"));
  CHECK(json_number(-std::numeric_limits<double>::infinity()) == json("-inf"));
  CHECK(json_number(std::nan("")) == json("nan"));
}

TEST_CASE("estimate serializers keep their keys") {
  KlEstimate kl;
  kl.total = 0.5;
  kl.initial_term = 0.1;
  kl.residual_term = 0.4;
  kl.method = SpaceMethod::gauss_hermite;
  const json jk = kl_to_json(kl);
  CHECK(jk["value"] == 0.5);
  CHECK(jk["initial_term"] == 0.1);
  CHECK(jk["method"] == "gauss-hermite");

  TvEstimate tv;
  tv.value = 0.3;
  tv.stat_error = 0.01;
  tv.bins = 200;
  tv.n_samples = 1000;
  const json jt = tv_to_json(tv);
  CHECK(jt["value"] == 0.3);
  CHECK(jt["bins"] == 200);

  SlopeFit fit;
  fit.slope = 1.0;
  fit.residuals = {0.1, -0.1};
  const json jf = fit_to_json(fit);
  CHECK(jf["residuals"].size() == 2);
  CHECK(jf["degenerate_zero"] == false);
}

TEST_CASE("sweep tables share one column layout") {
  EpsSweepResult eps;
  EpsSweepRow row;
  row.epsilon = 0.01;
  row.continuous.total = 0.5;
  row.continuous.residual_term = 0.5;
  row.discrete.total = 0.25;
  TvEstimate tv;
  tv.value = 0.3;
  tv.stat_error = 0.02;
  row.tv = tv;
  eps.rows.push_back(row);
  row.epsilon = 0.001;
  row.tv.reset();
  eps.rows.push_back(row);

  std::ostringstream cont;
  write_eps_sweep_csv(cont, eps, false);
  const auto cl = lines_of(cont.str());
  REQUIRE(cl.size() == 3);
  CHECK(cl[0] == "sweep_value,kl_total,kl_initial,kl_residual,stderr,tv,tv_err");
  const auto full = cells_of(cl[1]);
  REQUIRE(full.size() == 7);
  CHECK(std::stod(full[1]) == 0.5);
  CHECK(std::stod(full[5]) == 0.3);
  const auto no_tv = cells_of(cl[2]);
  REQUIRE(no_tv.size() == 7);
  CHECK(no_tv[5].empty());
  CHECK(no_tv[6].empty());

  // The discrete table reads the other divergence column and never carries TV.
  std::ostringstream disc;
  write_eps_sweep_csv(disc, eps, true);
  const auto dl = lines_of(disc.str());
  const auto drow = cells_of(dl[1]);
  CHECK(std::stod(drow[1]) == 0.25);
  CHECK(drow[5].empty());

  WrongMeanResult wm;
  wm.rows.push_back({0.01, tv});
  std::ostringstream wos;
  write_wrong_mean_csv(wos, wm);
  const auto wrow = cells_of(lines_of(wos.str())[1]);
  REQUIRE(wrow.size() == 7);
  CHECK(wrow[1].empty());
  CHECK(wrow[4].empty());
  CHECK(std::stod(wrow[5]) == 0.3);
}

TEST_SUITE_END();
