#pragma once

#include <span>

#include "smallnoise/gaussian.hpp"

namespace smallnoise {

struct TvEstimate {
  double value = 0.0;       // in [0, 1]
  double stat_error = 0.0;  // sampling bias proxy + half-sample discrepancy
  int bins = 0;
  long n_samples = 0;
};

/// Histogram total-variation distance between a scalar Gaussian and an
/// empirical sample. The partition is 200 equal bins spanning mean +- 8 sigma
/// plus two unbounded tail cells, so disjoint supports score close to 1. The
/// statistic is a lower bound on the true TV distance. The reported error
/// adds a multinomial sampling-bias proxy, the discrepancy between the two
/// half-sample estimates, and the Gaussian mass beyond the binned range.
TvEstimate tv_estimate_1d(const GaussianMeasure& gauss,
                          std::span<const double> samples, int bins = 200);

}  // namespace smallnoise
