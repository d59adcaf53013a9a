#pragma once

// Approach of orbits to the singular set: violations of the slow-recurrence
// bound d(x_{-k}, S) >= exp(-k delta) along backward windows, and the tail sums
// sum_n mu(B(S, exp(-n delta))).

#include <cstddef>
#include <vector>

#include "replab/maps.hpp"
#include "replab/orbits.hpp"

namespace replab {

struct RecurrenceProfile {
  double delta = 0.0;
  std::vector<std::size_t> violations;  // ascending k with x_{-k} in B(S, e^{-k delta})
  std::size_t last_violation = 0;       // 0 when there is none
  // Per-k rows for export, k = 1..depth.
  std::vector<double> distances;
  std::vector<double> thresholds;
};

RecurrenceProfile slow_recurrence_profile(const MapSystem& map, const BackwardOrbit& bw, double delta);

struct TailSumEstimate {
  double delta = 0.0;
  std::vector<double> tail_sums;  // [n-1] = fraction of orbit in B(S, e^{-n delta})
  double total = 0.0;
  // -(1/delta) * (1/N) * sum over orbit points in B(S, e^{-delta}) of log d(x,S).
  double integral_bound = 0.0;
  double ball_fraction = 0.0;  // fraction of orbit in B(S, e^{-delta})
};

TailSumEstimate tail_sum_estimate(const MapSystem& map, const Orbit& orbit, double delta, std::size_t n_max);

}  // namespace replab
