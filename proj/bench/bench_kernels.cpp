// Times the OpenMP kernels against their serial reference loops. The two
// must produce identical numbers; this target reports how long each takes.

#include <chrono>
#include <cstdio>

#include "smallnoise/exec.hpp"
#include "smallnoise/kl.hpp"
#include "smallnoise/sde.hpp"

using namespace smallnoise;

namespace {

double seconds(void (*body)(Exec), Exec exec, int reps) {
  // One warmup, then the best of `reps` to damp scheduling noise.
  body(exec);
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body(exec);
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start;
    best = std::min(best, dt.count());
  }
  return best;
}

SdeSpec double_well_spec() {
  return {make_double_well(), MatrixXd::Identity(1, 1), 1e-2,
          InitialCondition::dirac(VectorXd::Constant(1, 0.5))};
}

void sample_paths(Exec exec) {
  terminal_samples(double_well_spec(), TimeGrid(1.0, 1000), 20000, 7, exec);
}

void residual_mc(Exec exec) {
  EstimatorOptions opts;
  opts.method = SpaceMethod::monte_carlo;
  opts.n_samples = 2000000;
  opts.seed = 7;
  expected_residual(make_double_well(), MatrixXd::Identity(1, 1),
                    VectorXd::Constant(1, 0.7),
                    0.02 * MatrixXd::Identity(1, 1), opts, 0, exec);
}

void joint_chain(Exec exec) {
  const DriftModel dw = make_double_well();
  const MatrixXd id = MatrixXd::Identity(1, 1);
  const auto traj =
      solve_moments(dw, id, TimeGrid(1.0, 20), VectorXd::Constant(1, 0.5),
                    MatrixXd::Zero(1, 1), Scheme::factored);
  kl_bruteforce_joint(double_well_spec(), traj, 20, 200000, 7, exec);
}

void row(const char* name, void (*body)(Exec), int reps) {
  const double serial = seconds(body, Exec::serial, reps);
  const double parallel = seconds(body, Exec::parallel, reps);
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3,
              parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", hardware_threads());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel",
              "speedup");
  row("terminal_samples 2e7 steps", sample_paths, 3);
  row("residual monte carlo 2e6", residual_mc, 3);
  row("joint log-ratio 4e6 steps", joint_chain, 3);
  std::printf("\nnumbers are best-of-3; identical output is asserted in the "
              "test suite, not here\n");
  return 0;
}
