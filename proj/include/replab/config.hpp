#pragma once

// Run configuration: flat `key = value` text with [section] headers.
//
//   [run]        seed, workers, out
//   [map]        name, param, max_branches; custom maps add lo, hi, metric,
//                singular, beta, holder_scale, holder_alpha and
//                branch0 = lo hi affine a b [closure]
//                branch1 = lo hi power a b center exponent [closure]
//   [orbit]      length, burn_in
//   [analysis]   chi, drift_threshold, recurrence_delta, recurrence_windows,
//                recurrence_depth, tail_n_max, stride
//   [entropy]    samples, delta, n_grid, eps_grid
//   [repeller]   eps, delta, n, depth, windows, birkhoff_horizon, rho_quantile
//   [potentials] list
//   [verify]     max_word_length, pressure_k, word_cap, subsample

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "replab/maps.hpp"

namespace replab {

class KvWriter;

struct PipelineConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "out";

  MapSpec map;

  std::size_t orbit_length = 200000;
  std::size_t burn_in = 1000;

  double chi = 0.0;  // 0: estimate from the orbit
  double drift_threshold = 0.05;
  double recurrence_delta = 0.0;  // 0: chi
  std::size_t recurrence_windows = 5;
  std::size_t recurrence_depth = 200;
  std::size_t tail_n_max = 30;
  std::size_t stride = 1000;

  std::size_t entropy_samples = 100000;
  double entropy_delta = 0.05;
  std::vector<std::size_t> n_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<double> eps_grid{0.0625, 0.03125, 0.015625, 0.0078125};

  double eps = 0.15;
  double delta = 0.1;
  std::size_t n = 10;
  std::size_t depth = 200;
  std::size_t windows = 4000;
  std::size_t birkhoff_horizon = 100;
  double rho_quantile = 0.0;

  std::vector<std::string> potentials{"x", "logdf"};

  std::size_t max_word_length = 3;
  std::size_t pressure_k = 3;
  double word_cap = 1e5;
  bool subsample = true;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(std::istream& in);

// Grid, range and map checks that do not need an orbit. Throws Config.
void validate(const PipelineConfig& config);

// eps must lie in (0, chi/3). Throws Config.
void require_epsilon_below(const PipelineConfig& config, double chi);

// Map section in config syntax; used by both configs and IFS files.
std::string map_spec_text(const MapSpec& spec);

void echo_config(KvWriter& out, const PipelineConfig& config);

}  // namespace replab
