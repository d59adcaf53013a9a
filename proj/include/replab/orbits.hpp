#pragma once

// Forward orbits, Birkhoff averages, Lyapunov estimates and natural-extension
// windows read off long typical orbits.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "replab/maps.hpp"
#include "replab/potential.hpp"

namespace replab {

struct RestartRecord {
  std::size_t step;  // index of the point that landed within the singular guard
  int attempt;
  double new_x0;
};

struct Orbit {
  std::vector<double> points;
  std::string map_name;
  std::uint64_t seed = 0;
  double x0 = 0.0;  // starting point actually used, after restarts
  std::size_t burn_in = 0;
  std::vector<RestartRecord> restarts;

  std::size_t size() const { return points.size(); }
  double operator[](std::size_t i) const { return points[i]; }
};

inline constexpr std::size_t kDefaultBurnIn = 1000;
inline constexpr int kMaxRestarts = 100;
inline constexpr double kRestartPerturbation = 1e-9;

// Orbit of length n starting at x0. A hit on the singular guard restarts the
// orbit from a perturbed x0; lattice-prone maps get low-order dithering.
Orbit iterate(const MapSystem& map, double x0, std::size_t n, std::uint64_t seed);

// Orbit from a seeded random start with the first `burn_in` iterates dropped.
Orbit typical_orbit(const MapSystem& map, std::size_t n, std::uint64_t seed,
                    std::size_t burn_in = kDefaultBurnIn);

double birkhoff_average(const MapSystem& map, const Orbit& orbit, const Potential& phi);

// Running Birkhoff means sampled every `stride` iterates (CSV export rows).
struct RunningMeans {
  std::vector<std::size_t> index;
  std::vector<std::vector<double>> means;  // [potential][row]
};
RunningMeans running_means(const MapSystem& map, const Orbit& orbit, std::span<const Potential> potentials,
                           std::size_t stride);

struct ObservableStat {
  std::string name;
  bool applicable = true;
  double mean = 0.0;
  double half_mean = 0.0;   // mean over the first half of the orbit
  double drift = 0.0;       // |mean - half_mean|
  double std_error = 0.0;   // batch-means standard error
  bool stable = true;
};

struct ErgodicEstimates {
  double chi_lower = 0.0;       // chi(mu)
  double lambda_forward = 0.0;  // upper Lyapunov exponent
  double half_orbit_chi = 0.0;
  double convergence_drift = 0.0;
  std::vector<std::pair<std::string, double>> birkhoff_means;
  std::vector<ObservableStat> integrability;
  std::string note;
};

ErgodicEstimates lyapunov_estimates(const MapSystem& map, const Orbit& orbit);

// Finite means and drift flags for log+|f'|, log+|1/f'|, log d(.,S), log G, log H.
std::vector<ObservableStat> integrability_diagnostics(const MapSystem& map, const Orbit& orbit,
                                                      double drift_threshold = 0.05);

// (x_{-N}, ..., x_{-1}, x_0) stored oldest first.
struct BackwardOrbit {
  std::vector<double> points;
  std::size_t end_index = 0;

  std::size_t depth() const { return points.size() - 1; }
  // x_{-k}
  double at(std::size_t k) const { return points[points.size() - 1 - k]; }
  double head() const { return points.back(); }
};

BackwardOrbit backward_window(const Orbit& orbit, std::size_t end_index, std::size_t depth);

}  // namespace replab
