#pragma once

#include <cmath>

#include "smallnoise/errors.hpp"

namespace smallnoise {

/// Uniform grid of K steps on [0, T]. node(K) returns T exactly.
struct TimeGrid {
  double horizon = 0.0;
  int steps = 0;

  TimeGrid() = default;
  TimeGrid(double T, int K) : horizon(T), steps(K) {
    if (!(T > 0.0) || !std::isfinite(T)) throw UsageError("horizon must be positive and finite");
    if (K < 1) throw UsageError("step count must be at least 1");
  }

  [[nodiscard]] double dt() const { return horizon / steps; }
  [[nodiscard]] double node(int k) const {
    return k == steps ? horizon : k * dt();
  }
  [[nodiscard]] bool same_as(const TimeGrid& other) const {
    return horizon == other.horizon && steps == other.steps;
  }
};

}  // namespace smallnoise
