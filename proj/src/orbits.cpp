#include "replab/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "replab/error.hpp"
#include "replab/numeric.hpp"

namespace replab {

namespace {

// Low-order noise for lattice-prone maps: ~1.4e-14 of the domain diameter,
// two orders below the orbit consistency tolerance.
constexpr double kDitherScale = 0x1.0p-46;

bool near_singular(const MapSystem& map, double x) {
  return !map.singular_set().empty() && map.singular_distance(x) < map.guard();
}

ObservableStat summarize(std::string name, std::span<const double> values, double drift_threshold) {
  ObservableStat stat;
  stat.name = std::move(name);
  stat.mean = compensated_mean(values);
  stat.half_mean = compensated_mean(values.first(std::max<std::size_t>(1, values.size() / 2)));
  stat.drift = std::abs(stat.mean - stat.half_mean);
  constexpr std::size_t batches = 32;
  if (values.size() >= 2 * batches) {
    const std::size_t len = values.size() / batches;
    std::vector<double> bm;
    for (std::size_t b = 0; b < batches; ++b) bm.push_back(compensated_mean(values.subspan(b * len, len)));
    const double m = compensated_mean(bm);
    double ss = 0.0;
    for (double v : bm) ss += (v - m) * (v - m);
    stat.std_error = std::sqrt(ss / (batches - 1) / batches);
  }
  stat.stable = std::isfinite(stat.mean) && stat.drift <= drift_threshold;
  return stat;
}

}  // namespace

Orbit iterate(const MapSystem& map, double x0, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::bad_parameter, "orbit length must be >= 1");
  if (!map.in_domain(x0)) throw Error(ErrorKind::out_of_domain, fmt::format("x0 = {} outside domain", x0));
  std::mt19937_64 rng(seed);
  Orbit orbit;
  orbit.map_name = map.name();
  orbit.seed = seed;
  orbit.points.reserve(n);
  const bool dither = map.lattice_prone();
  const double dither_amp = kDitherScale * map.diameter();

  double start = map.is_circle() ? map.reduce(x0) : x0;
  for (int attempt = 0; attempt <= kMaxRestarts; ++attempt) {
    orbit.points.clear();
    std::size_t hit = n;
    if (near_singular(map, start)) {
      hit = 0;
    } else {
      orbit.points.push_back(start);
      double x = start;
      for (std::size_t k = 1; k < n; ++k) {
        double y = map.eval(x);
        if (dither) y = map.reduce(y + dither_amp * unit_uniform(rng));
        if (near_singular(map, y)) {
          hit = k;
          break;
        }
        orbit.points.push_back(y);
        x = y;
      }
    }
    if (hit == n) {
      orbit.x0 = start;
      return orbit;
    }
    if (attempt == kMaxRestarts) break;
    start = map.reduce(x0 + kRestartPerturbation * (2.0 * unit_uniform(rng) - 1.0));
    orbit.restarts.push_back({hit, attempt + 1, start});
  }
  throw Error(ErrorKind::persistent_singular_hit,
              fmt::format("orbit from {} kept hitting the singular set after {} restarts", x0, kMaxRestarts));
}

Orbit typical_orbit(const MapSystem& map, std::size_t n, std::uint64_t seed, std::size_t burn_in) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  double x0 = map.lo() + map.diameter() * unit_uniform(rng);
  while (near_singular(map, x0) || (!map.is_circle() && (x0 <= map.lo() || x0 >= map.hi())))
    x0 = map.lo() + map.diameter() * unit_uniform(rng);
  Orbit orbit = iterate(map, x0, n + burn_in, seed);
  orbit.points.erase(orbit.points.begin(), orbit.points.begin() + static_cast<std::ptrdiff_t>(burn_in));
  orbit.burn_in = burn_in;
  return orbit;
}

double birkhoff_average(const MapSystem& map, const Orbit& orbit, const Potential& phi) {
  if (orbit.size() == 0) throw Error(ErrorKind::bad_parameter, "empty orbit");
  CompensatedSum s;
  for (double x : orbit.points) s.add(phi(map, x));
  return s.value() / static_cast<double>(orbit.size());
}

RunningMeans running_means(const MapSystem& map, const Orbit& orbit, std::span<const Potential> potentials,
                           std::size_t stride) {
  RunningMeans out;
  stride = std::max<std::size_t>(stride, 1);
  std::vector<CompensatedSum> sums(potentials.size());
  out.means.resize(potentials.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    for (std::size_t p = 0; p < potentials.size(); ++p) sums[p].add(potentials[p](map, orbit[i]));
    if ((i + 1) % stride == 0 || i + 1 == orbit.size()) {
      out.index.push_back(i + 1);
      for (std::size_t p = 0; p < potentials.size(); ++p)
        out.means[p].push_back(sums[p].value() / static_cast<double>(i + 1));
    }
  }
  return out;
}

ErgodicEstimates lyapunov_estimates(const MapSystem& map, const Orbit& orbit) {
  if (orbit.size() == 0) throw Error(ErrorKind::bad_parameter, "empty orbit");
  std::vector<double> logs(orbit.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const double d = std::abs(map.derivative(orbit[i]));
    if (!(d > 0.0) || !std::isfinite(d))
      throw Error(ErrorKind::non_finite_log, fmt::format("|f'| = {} at orbit index {}", d, i));
    logs[i] = std::log(d);
  }
  ErgodicEstimates est;
  est.chi_lower = compensated_mean(logs);
  est.lambda_forward = est.chi_lower;
  est.half_orbit_chi = compensated_mean(std::span<const double>(logs).first(std::max<std::size_t>(1, logs.size() / 2)));
  est.convergence_drift = std::abs(est.chi_lower - est.half_orbit_chi);
  est.birkhoff_means.emplace_back("logdf", est.chi_lower);
  est.integrability = integrability_diagnostics(map, orbit);
  est.note = "one-dimensional: lower and upper Lyapunov estimates are the same Birkhoff mean of log|f'|";
  return est;
}

std::vector<ObservableStat> integrability_diagnostics(const MapSystem& map, const Orbit& orbit,
                                                      double drift_threshold) {
  const std::size_t n = orbit.size();
  std::vector<double> lp(n), lm(n), ld(n), lg(n), lh(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = orbit[i];
    const double logd = std::log(std::abs(map.derivative(x)));
    lp[i] = std::max(logd, 0.0);
    lm[i] = std::max(-logd, 0.0);
    ld[i] = std::log(map.singular_distance(x));
    lg[i] = std::log(map.holder_radius(x));
    lh[i] = std::log(map.holder_bound(x));
  }
  std::vector<ObservableStat> out;
  out.push_back(summarize("log+|df|", lp, drift_threshold));
  out.push_back(summarize("log+|df^-1|", lm, drift_threshold));
  ObservableStat dist = summarize("log d(.,S)", ld, drift_threshold);
  if (map.singular_set().empty()) {
    dist = ObservableStat{};
    dist.name = "log d(.,S)";
    dist.applicable = false;
  }
  out.push_back(dist);
  out.push_back(summarize("log G", lg, drift_threshold));
  out.push_back(summarize("log H", lh, drift_threshold));
  return out;
}

BackwardOrbit backward_window(const Orbit& orbit, std::size_t end_index, std::size_t depth) {
  if (end_index >= orbit.size())
    throw Error(ErrorKind::depth_exceeds_history, fmt::format("end index {} beyond orbit of length {}", end_index, orbit.size()));
  if (end_index < depth)
    throw Error(ErrorKind::depth_exceeds_history, fmt::format("depth {} exceeds history {}", depth, end_index));
  BackwardOrbit bw;
  bw.end_index = end_index;
  bw.points.assign(orbit.points.begin() + static_cast<std::ptrdiff_t>(end_index - depth),
                   orbit.points.begin() + static_cast<std::ptrdiff_t>(end_index + 1));
  return bw;
}

}  // namespace replab
