#pragma once

// Regularity data along finite backward windows: the distortion constant
// C_eps, the Lyapunov-adapted norm, the two-pass tempering kernel, and the
// radius rho on which inverse branches along the window contract uniformly.
//
// All sups/infs over n >= 0 are truncated at the window depth.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "replab/maps.hpp"
#include "replab/orbits.hpp"

namespace replab {

// Throws BadParameter unless 0 < eps < chi/3.
void require_epsilon_range(double chi, double eps);

// sup_{0<=n<=depth} |(f^n)'(x_{-n})|^{-1} e^{n(chi-eps)}; always >= 1.
double c_epsilon(const MapSystem& map, const BackwardOrbit& bw, double chi, double eps);

// C_eps at f^{-offset}(x^) using the remaining depth - offset entries.
double c_epsilon_at(const MapSystem& map, const BackwardOrbit& bw, std::size_t offset, double chi, double eps);

// ||v||' = sup_{0<=n<=depth} |T^{-n} v| e^{n(chi-eps)}.
double adapted_norm(const MapSystem& map, const BackwardOrbit& bw, double chi, double eps, double v);

// values[t] sampled along the f^-orbit in forward time order. Returns r with
//   b_t = min_{s>=t} values[s] e^{(s-t)eps},  r_t = min_{s<=t} b_s e^{(t-s)eps}.
std::vector<double> tempering_kernel(std::span<const double> values, double eps);

// r~ from C_eps at the point and its predecessor; throws TemperingTooWeak
// when C_eps >= e^eps leaves the numerator non-positive.
double radius_tilde(double c_here, double c_prev, double holder_bound, double beta, double holder_radius,
                    double chi, double eps);

struct TemperingOptions {
  std::size_t kernel_span = 0;  // 0 = depth / 2
  int max_probes = 20;          // dyadic safety factors tried
};

struct TemperingProfile {
  double chi = 0.0;
  double epsilon = 0.0;
  double c_eps = 1.0;
  double c_eps_prev = 1.0;            // C_eps(f^{-1} x^)
  double c_eps_half_depth = 1.0;      // convergence monitor
  double adapted_norm_factor = 1.0;   // ||1||' at x^
  double r_tilde = 0.0;
  double r = 0.0;
  double safety_factor = 0.0;         // R
  double rho = 0.0;                   // r * R
  std::size_t depth_used = 0;
  std::size_t kernel_span_used = 0;
};

TemperingProfile contraction_radius(const MapSystem& map, const BackwardOrbit& bw, double chi, double eps,
                                    const TemperingOptions& options = {});

struct ContractionReport {
  bool pass = true;
  bool escaped = false;
  std::size_t failed_at = 0;          // first k violating a bound (0 = none)
  std::vector<double> derivative;     // |(f^{-k})'(y)|, k = 1..depth
  std::vector<double> distance_ratio; // d(f^{-k}x_0, f^{-k}y) / d(x_0, y)
  std::vector<double> bound;          // e^{-k(chi - 2 eps)}
};

// Pulls y back along the window's inverse branches and checks both the
// derivative and the distance contraction against e^{-k(chi-2eps)}.
// Throws BranchEscape if the pullback leaves a branch image.
ContractionReport verify_backward_contraction(const MapSystem& map, const BackwardOrbit& bw, double y, double rho,
                                              double chi, double eps);

// Non-throwing variant; escape is reported through `escaped`.
ContractionReport probe_backward_contraction(const MapSystem& map, const BackwardOrbit& bw, double y, double chi,
                                             double eps);

}  // namespace replab
