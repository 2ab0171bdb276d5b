#include "smallnoise/tv.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace smallnoise {

namespace {

// Half L1 distance between empirical cell frequencies and exact Gaussian cell
// masses. Cells: `bins` equal intervals on [lo, hi] plus the two tails.
double histogram_tv(std::span<const double> xs, double lo, double hi, int bins,
                    const std::vector<double>& cell_mass) {
  std::vector<long> counts(bins + 2, 0);
  const double width = (hi - lo) / bins;
  for (const double x : xs) {
    int cell;
    if (x < lo)
      cell = bins;  // lower tail
    else if (x >= hi)
      cell = bins + 1;  // upper tail
    else
      cell = std::min(int((x - lo) / width), bins - 1);
    ++counts[cell];
  }
  const double n = double(xs.size());
  double acc = 0.0;
  for (int c = 0; c < bins + 2; ++c)
    acc += std::abs(double(counts[c]) / n - cell_mass[c]);
  return 0.5 * acc;
}

}  // namespace

TvEstimate tv_estimate_1d(const GaussianMeasure& gauss,
                          std::span<const double> samples, int bins) {
  if (gauss.mean.size() != 1 || gauss.cov.rows() != 1)
    throw UsageError("tv_estimate_1d: Gaussian must be one-dimensional");
  if (bins < 2) throw UsageError("tv_estimate_1d: need at least two bins");
  if (samples.size() < 10000)
    throw UsageError("tv_estimate_1d: need at least 1e4 samples");
  const double var = gauss.cov(0, 0);
  if (!(var > 0.0)) throw UsageError("tv_estimate_1d: Gaussian variance must be positive");

  const double m = gauss.mean[0];
  const double sd = std::sqrt(var);
  const double lo = m - 8.0 * sd;
  const double hi = m + 8.0 * sd;
  const double width = (hi - lo) / bins;

  std::vector<double> cell_mass(bins + 2);
  for (int b = 0; b < bins; ++b) {
    const double a = (lo + b * width - m) / sd;
    const double z = (lo + (b + 1) * width - m) / sd;
    cell_mass[b] = normal_cdf(z) - normal_cdf(a);
  }
  cell_mass[bins] = normal_cdf(-8.0);
  cell_mass[bins + 1] = normal_cdf(-8.0);

  TvEstimate out;
  out.bins = bins;
  out.n_samples = long(samples.size());
  out.value = histogram_tv(samples, lo, hi, bins, cell_mass);

  const std::size_t half = samples.size() / 2;
  const double tv_a = histogram_tv(samples.first(half), lo, hi, bins, cell_mass);
  const double tv_b = histogram_tv(samples.subspan(half), lo, hi, bins, cell_mass);

  // Expected |phat - q| for a multinomial cell, capped by the small-count
  // regime where the frequency is almost surely zero.
  const double n = double(samples.size());
  double bias = 0.0;
  for (int c = 0; c < bins + 2; ++c) {
    const double q = cell_mass[c];
    bias += std::min(std::sqrt(2.0 * q * (1.0 - q) / (3.141592653589793 * n)),
                     2.0 * q);
  }
  out.stat_error = 0.5 * bias + 0.5 * std::abs(tv_a - tv_b) + 2.0 * normal_cdf(-8.0);
  return out;
}

}  // namespace smallnoise
