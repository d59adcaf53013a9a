#include "replab/recurrence.hpp"

#include <cmath>

#include "replab/error.hpp"
#include "replab/numeric.hpp"

namespace replab {

RecurrenceProfile slow_recurrence_profile(const MapSystem& map, const BackwardOrbit& bw, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::bad_parameter, "delta must be positive");
  RecurrenceProfile prof;
  prof.delta = delta;
  const bool empty_s = map.singular_set().empty();
  for (std::size_t k = 1; k <= bw.depth(); ++k) {
    const double d = map.singular_distance(bw.at(k));
    const double threshold = std::exp(-static_cast<double>(k) * delta);
    prof.distances.push_back(d);
    prof.thresholds.push_back(threshold);
    if (!empty_s && d < threshold) {
      prof.violations.push_back(k);
      prof.last_violation = k;
    }
  }
  return prof;
}

TailSumEstimate tail_sum_estimate(const MapSystem& map, const Orbit& orbit, double delta, std::size_t n_max) {
  if (!(delta > 0.0)) throw Error(ErrorKind::bad_parameter, "delta must be positive");
  if (n_max < 1) throw Error(ErrorKind::bad_parameter, "n_max must be >= 1");
  TailSumEstimate est;
  est.delta = delta;
  est.tail_sums.assign(n_max, 0.0);
  if (map.singular_set().empty() || orbit.size() == 0) return est;

  // Each point lies in B(S, e^{-n delta}) for n < -log d / delta.
  std::vector<std::size_t> counts(n_max, 0);
  CompensatedSum log_in_ball;
  std::size_t in_ball = 0;
  for (double x : orbit.points) {
    const double d = map.singular_distance(x);
    const double depth = -std::log(d) / delta;
    if (depth <= 1.0) continue;
    ++in_ball;
    log_in_ball.add(std::log(d));
    for (std::size_t n = 1; n <= n_max && static_cast<double>(n) < depth; ++n) ++counts[n - 1];
  }
  const double total_points = static_cast<double>(orbit.size());
  CompensatedSum total;
  for (std::size_t n = 0; n < n_max; ++n) {
    est.tail_sums[n] = static_cast<double>(counts[n]) / total_points;
    total.add(est.tail_sums[n]);
  }
  est.total = total.value();
  est.integral_bound = -log_in_ball.value() / total_points / delta;
  est.ball_fraction = static_cast<double>(in_ball) / total_points;
  return est;
}

}  // namespace replab
