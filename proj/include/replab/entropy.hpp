#pragma once

// Bowen-metric separated sets and the Katok entropy estimate built on them.

#include <cstddef>
#include <span>
#include <vector>

#include "replab/kernels.hpp"
#include "replab/maps.hpp"

namespace replab {

// max_{0<=k<n} d(f^k x, f^k y)
double bowen_distance(const MapSystem& map, double x, double y, std::size_t n);

struct SeparatedSet {
  std::vector<double> points;
  std::vector<std::size_t> pool_indices;  // greedy acceptance order
  std::size_t n = 0;
  double eps_tilde = 0.0;
  std::size_t source_pool_size = 0;
  std::size_t dropped = 0;  // pool points whose n-step orbit hit the singular guard
};

// First-fit in pool order: a pool point joins unless some member lies at
// Bowen distance < eps_tilde. Candidate members are looked up through a grid
// on (x, f^{n-1} x).
SeparatedSet greedy_separated(const MapSystem& map, std::span<const double> pool, std::size_t n, double eps_tilde,
                              Execution mode = Execution::parallel);

// Same first-fit rule, comparing against every member via bowen_distance.
SeparatedSet greedy_separated_reference(const MapSystem& map, std::span<const double> pool, std::size_t n,
                                        double eps_tilde);

struct SeparationCertificate {
  bool separated = true;
  bool spanning = true;
  double min_pair_distance = 0.0;  // +inf for fewer than two points
  std::size_t pair_violations = 0;
  std::size_t uncovered = 0;       // pool points with no member within eps_tilde
};

// Recomputes every pairwise Bowen distance and the covering of the pool
// directly from bowen_distance.
SeparationCertificate certify_separated(const MapSystem& map, const SeparatedSet& set, std::span<const double> pool,
                                        Execution mode = Execution::parallel);

struct EntropyCell {
  std::size_t n = 0;
  double eps_tilde = 0.0;
  std::size_t card = 0;
  double rate = 0.0;       // (1/n) log card
  double increment = 0.0;  // log card(n) - log card(n_prev), NaN without a predecessor
  bool saturated = false;  // pool < 10 card
};

struct EntropyEstimate {
  double h = 0.0;
  double delta = 0.05;
  std::vector<EntropyCell> grid;  // eps-major, both axes ascending
  std::size_t chosen_n = 0;
  double chosen_eps = 0.0;
  bool flat = false;
  std::size_t pool_size = 0;
  std::size_t eps_monotonicity_violations = 0;  // card dropped as eps shrank
  std::size_t n_monotonicity_violations = 0;    // card dropped as n grew
};

// h is read from log-cardinality increments at the largest unsaturated n,
// scanning eps from smallest to largest for the first flat pair.
// Throws PoolTooSmall if no cell leaves room for an increment.
EntropyEstimate katok_entropy(const MapSystem& map, std::span<const double> pool, double delta,
                              std::span<const std::size_t> n_grid, std::span<const double> eps_grid,
                              Execution mode = Execution::parallel);

inline constexpr double kPlateauTolerance = 0.02;
inline constexpr std::size_t kPoolPerPoint = 10;

}  // namespace replab
