#include "replab/tempering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "replab/error.hpp"

namespace replab {

namespace {

// log|f'(x_{-j})| for j = 1..depth, as prefix sums P[j] = sum_{i<=j}.
std::vector<double> log_derivative_prefix(const MapSystem& map, const BackwardOrbit& bw) {
  std::vector<double> prefix(bw.depth() + 1, 0.0);
  for (std::size_t j = 1; j <= bw.depth(); ++j) {
    const double d = std::abs(map.derivative(bw.at(j)));
    if (!(d > 0.0)) throw Error(ErrorKind::zero_derivative, fmt::format("f' vanishes at x_-{}", j));
    prefix[j] = prefix[j - 1] + std::log(d);
  }
  return prefix;
}

double log_c_epsilon(std::span<const double> prefix, std::size_t offset, std::size_t max_n, double rate) {
  double best = 0.0;
  for (std::size_t n = 1; n <= max_n && offset + n < prefix.size(); ++n)
    best = std::max(best, static_cast<double>(n) * rate - (prefix[offset + n] - prefix[offset]));
  return best;
}

}  // namespace

void require_epsilon_range(double chi, double eps) {
  if (!(chi > 0.0)) throw Error(ErrorKind::bad_parameter, fmt::format("chi = {} must be positive", chi));
  if (!(eps > 0.0 && eps < chi / 3.0))
    throw Error(ErrorKind::bad_parameter, fmt::format("eps = {} outside (0, chi/3) with chi = {}", eps, chi));
}

double c_epsilon(const MapSystem& map, const BackwardOrbit& bw, double chi, double eps) {
  return c_epsilon_at(map, bw, 0, chi, eps);
}

double c_epsilon_at(const MapSystem& map, const BackwardOrbit& bw, std::size_t offset, double chi, double eps) {
  require_epsilon_range(chi, eps);
  if (bw.depth() < 1) throw Error(ErrorKind::bad_parameter, "window depth must be >= 1");
  if (offset > bw.depth()) throw Error(ErrorKind::depth_exceeds_history, "offset beyond window");
  const auto prefix = log_derivative_prefix(map, bw);
  return std::exp(log_c_epsilon(prefix, offset, bw.depth(), chi - eps));
}

double adapted_norm(const MapSystem& map, const BackwardOrbit& bw, double chi, double eps, double v) {
  require_epsilon_range(chi, eps);
  if (bw.depth() < 1) throw Error(ErrorKind::bad_parameter, "window depth must be >= 1");
  double pulled = std::abs(v);  // |T^{-n} v|
  double best = pulled;
  const double growth = std::exp(chi - eps);
  double weight = 1.0;
  for (std::size_t n = 1; n <= bw.depth(); ++n) {
    const double d = std::abs(map.derivative(bw.at(n)));
    if (!(d > 0.0)) throw Error(ErrorKind::zero_derivative, fmt::format("f' vanishes at x_-{}", n));
    pulled /= d;
    weight *= growth;
    best = std::max(best, pulled * weight);
  }
  return best;
}

std::vector<double> tempering_kernel(std::span<const double> values, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::bad_parameter, "eps must be positive");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::non_positive_input, fmt::format("kernel input {} is not positive", v));
  const std::size_t n = values.size();
  std::vector<double> b(n), r(n);
  if (n == 0) return r;
  const double step = std::exp(eps);
  b[n - 1] = values[n - 1];
  for (std::size_t t = n - 1; t-- > 0;) b[t] = std::min(values[t], b[t + 1] * step);
  r[0] = b[0];
  for (std::size_t t = 1; t < n; ++t) r[t] = std::min(b[t], r[t - 1] * step);
  return r;
}

double radius_tilde(double c_here, double c_prev, double holder_bound, double beta, double holder_radius,
                    double chi, double eps) {
  const double numerator = std::exp(-chi + 2.0 * eps) / c_here - std::exp(-chi + eps);
  if (!(numerator > 0.0))
    throw Error(ErrorKind::tempering_too_weak,
                fmt::format("C_eps = {} >= e^eps = {}; r~ undefined", c_here, std::exp(eps)));
  const double first = std::pow(numerator / (c_prev * holder_bound), 1.0 / beta);
  return std::min({first, 1.0, holder_radius});
}

TemperingProfile contraction_radius(const MapSystem& map, const BackwardOrbit& bw, double chi, double eps,
                                    const TemperingOptions& options) {
  require_epsilon_range(chi, eps);
  const std::size_t depth = bw.depth();
  if (depth < 2) throw Error(ErrorKind::bad_parameter, "window depth must be >= 2");
  const auto prefix = log_derivative_prefix(map, bw);
  const double rate = chi - eps;
  auto c_at = [&](std::size_t k) { return std::exp(log_c_epsilon(prefix, k, depth, rate)); };

  TemperingProfile prof;
  prof.chi = chi;
  prof.epsilon = eps;
  prof.depth_used = depth;
  prof.c_eps = c_at(0);
  prof.c_eps_prev = c_at(1);
  prof.c_eps_half_depth = std::exp(log_c_epsilon(prefix, 0, depth / 2, rate));
  prof.adapted_norm_factor = prof.c_eps;
  prof.r_tilde = radius_tilde(prof.c_eps, prof.c_eps_prev, map.holder_bound(bw.at(0)), map.beta(),
                              map.holder_radius(bw.at(0)), chi, eps);

  // r~ along the window; the kernel runs over the stretch ending at x_0 on
  // which r~ is defined.
  const std::size_t span = std::min(options.kernel_span ? options.kernel_span : depth / 2, depth - 1);
  std::vector<double> tilde{prof.r_tilde};
  for (std::size_t k = 1; k <= span; ++k) {
    const double c_here = c_at(k);
    if (c_here >= std::exp(eps)) break;
    const double x = bw.at(k);
    tilde.push_back(radius_tilde(c_here, c_at(k + 1), map.holder_bound(x), map.beta(), map.holder_radius(x), chi, eps));
  }
  prof.kernel_span_used = tilde.size() - 1;
  std::reverse(tilde.begin(), tilde.end());
  prof.r = tempering_kernel(tilde, eps).back();

  const double x0 = bw.head();
  for (int p = 0; p < options.max_probes; ++p) {
    const double factor = std::ldexp(1.0, -p);
    const double rho = prof.r * factor;
    bool ok = true;
    for (double frac : {1.0 - 1e-9, -(1.0 - 1e-9), 0.5, -0.5}) {
      double y = x0 + frac * rho;
      y = map.is_circle() ? map.reduce(y) : std::clamp(y, map.lo(), map.hi());
      if (map.distance(x0, y) == 0.0) continue;
      if (!probe_backward_contraction(map, bw, y, chi, eps).pass) {
        ok = false;
        break;
      }
    }
    if (ok) {
      prof.safety_factor = factor;
      prof.rho = rho;
      return prof;
    }
  }
  throw Error(ErrorKind::tempering_too_weak,
              fmt::format("no dyadic safety factor down to 2^-{} gives uniform contraction", options.max_probes - 1));
}

ContractionReport probe_backward_contraction(const MapSystem& map, const BackwardOrbit& bw, double y, double chi,
                                             double eps) {
  ContractionReport rep;
  const double x0 = bw.head();
  const double d0 = map.distance(x0, y);
  double ycur = y;
  double zcur = x0;
  double deriv = 1.0;
  const double rate = chi - 2.0 * eps;
  const double slack = 1.0 + 1e-12;
  const double abs_tol = 1e-15 * map.diameter();
  for (std::size_t k = 1; k <= bw.depth(); ++k) {
    const double anchor = bw.at(k);
    auto ynext = map.pullback(ycur, anchor);
    auto znext = map.pullback(zcur, anchor);
    if (!ynext || !znext) {
      rep.pass = false;
      rep.escaped = true;
      rep.failed_at = k;
      return rep;
    }
    double slope = 0.0;
    try {
      slope = std::abs(map.derivative(*ynext));
    } catch (const Error&) {
      rep.pass = false;
      rep.escaped = true;
      rep.failed_at = k;
      return rep;
    }
    ycur = *ynext;
    zcur = *znext;
    deriv /= slope;
    const double bound = std::exp(-static_cast<double>(k) * rate);
    const double dist = map.distance(zcur, ycur);
    rep.derivative.push_back(deriv);
    rep.distance_ratio.push_back(d0 > 0.0 ? dist / d0 : 0.0);
    rep.bound.push_back(bound);
    if (rep.pass && (deriv > bound * slack || dist > bound * d0 * slack + abs_tol)) {
      rep.pass = false;
      rep.failed_at = k;
    }
  }
  return rep;
}

ContractionReport verify_backward_contraction(const MapSystem& map, const BackwardOrbit& bw, double y, double rho,
                                              double chi, double eps) {
  require_epsilon_range(chi, eps);
  if (!(map.distance(bw.head(), y) < rho))
    throw Error(ErrorKind::bad_parameter, fmt::format("d(x_0, y) = {} not below rho = {}", map.distance(bw.head(), y), rho));
  ContractionReport rep = probe_backward_contraction(map, bw, y, chi, eps);
  if (rep.escaped)
    throw Error(ErrorKind::branch_escape, fmt::format("pullback of y = {} left its branch at k = {}", y, rep.failed_at));
  return rep;
}

}  // namespace replab
