#include "replab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "replab/error.hpp"

namespace replab {

namespace {

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Side of the power-law center on which a branch lives.
double branch_side(const Branch& br) { return sgn(0.5 * (br.lo + br.hi) - br.center); }

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

Branch affine_branch(int id, double lo, double hi, double a, double b, bool lo_closed = true,
                     bool hi_closed = false) {
  Branch br;
  br.id = id;
  br.lo = lo;
  br.hi = hi;
  br.lo_closed = lo_closed;
  br.hi_closed = hi_closed;
  br.formula = Formula::affine;
  br.a = a;
  br.b = b;
  return br;
}

Branch power_branch(int id, double lo, double hi, double scale, double offset, double exponent,
                    bool lo_closed, bool hi_closed) {
  Branch br;
  br.id = id;
  br.lo = lo;
  br.hi = hi;
  br.lo_closed = lo_closed;
  br.hi_closed = hi_closed;
  br.formula = Formula::power;
  br.a = scale;
  br.b = offset;
  br.center = 0.0;
  br.exponent = exponent;
  return br;
}

Branch gauss_branch(int n) {
  return power_branch(n, 1.0 / (n + 1), 1.0 / n, 1.0, -static_cast<double>(n), -1.0, false, true);
}

}  // namespace

// ---------------------------------------------------------------- Branch

double Branch::value(double x) const {
  if (formula == Formula::affine) return a * x + b;
  return b + a * std::pow(std::abs(x - center), exponent);
}

double Branch::slope(double x) const {
  if (formula == Formula::affine) return a;
  const double u = std::abs(x - center);
  return a * exponent * std::pow(u, exponent - 1.0) * sgn(x - center);
}

double Branch::preimage(double y) const {
  if (formula == Formula::affine) return (y - b) / a;
  const double ratio = std::max(0.0, (y - b) / a);
  return center + branch_side(*this) * std::pow(ratio, 1.0 / exponent);
}

double Branch::image_min() const { return std::min(value(lo), value(hi)); }
double Branch::image_max() const { return std::max(value(lo), value(hi)); }

bool Branch::contains(double x) const {
  if (x < lo || x > hi) return false;
  if (x == lo && !lo_closed) return false;
  if (x == hi && !hi_closed) return false;
  return true;
}

bool Branch::image_contains(double y) const {
  const double vlo = value(lo);
  const double vhi = value(hi);
  const bool increasing = vhi >= vlo;
  const double ymin = increasing ? vlo : vhi;
  const double ymax = increasing ? vhi : vlo;
  const bool min_closed = increasing ? lo_closed : hi_closed;
  const bool max_closed = increasing ? hi_closed : lo_closed;
  if (y < ymin || y > ymax) return false;
  if (y == ymin && !min_closed) return false;
  if (y == ymax && !max_closed) return false;
  return true;
}

// ---------------------------------------------------------------- MapSystem

MapSystem::MapSystem(std::string name, MapSpec spec, double lo, double hi, Metric metric,
                     std::vector<Branch> branches, std::vector<double> singular, double beta,
                     Profile holder_bound, Profile holder_radius, bool reciprocal_tail)
    : name_(std::move(name)),
      spec_(std::move(spec)),
      lo_(lo),
      hi_(hi),
      metric_(metric),
      branches_(std::move(branches)),
      singular_(std::move(singular)),
      beta_(beta),
      holder_bound_(std::move(holder_bound)),
      holder_radius_(std::move(holder_radius)),
      reciprocal_tail_(reciprocal_tail) {
  if (!(hi_ > lo_)) throw Error(ErrorKind::bad_parameter, "empty domain");
  if (!(beta_ > 0.0 && beta_ <= 1.0)) throw Error(ErrorKind::bad_parameter, "beta must lie in (0,1]");
  if (branches_.empty()) throw Error(ErrorKind::bad_parameter, "map without branches");
  std::sort(branches_.begin(), branches_.end(),
            [](const Branch& l, const Branch& r) { return l.lo < r.lo; });
  std::sort(singular_.begin(), singular_.end());
  lattice_prone_ = !reciprocal_tail_ &&
                   std::all_of(branches_.begin(), branches_.end(), [](const Branch& br) {
                     return br.formula == Formula::affine && is_integer(br.a) && std::abs(br.a) > 1.0;
                   });
  if (is_circle()) {
    for (const auto& br : branches_)
      if (br.formula != Formula::affine)
        throw Error(ErrorKind::bad_parameter, "circle maps must use affine branches");
  }
}

MapSystem MapSystem::with_holder(double beta, Profile holder_bound, Profile holder_radius) const {
  MapSystem copy = *this;
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorKind::bad_parameter, "beta must lie in (0,1]");
  copy.beta_ = beta;
  copy.holder_bound_ = std::move(holder_bound);
  copy.holder_radius_ = std::move(holder_radius);
  return copy;
}

bool MapSystem::in_domain(double x) const { return std::isfinite(x) && x >= lo_ && x <= hi_; }

double MapSystem::reduce(double x) const {
  if (is_circle()) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
  }
  return std::clamp(x, lo_, hi_);
}

double MapSystem::displacement(double x, double y) const {
  double d = y - x;
  if (is_circle()) {
    d -= std::round(d);
  }
  return d;
}

double MapSystem::distance(double x, double y) const { return std::abs(displacement(x, y)); }

double MapSystem::singular_distance(double x) const {
  if (singular_.empty()) return no_singularity_sentinel();
  double best = std::numeric_limits<double>::infinity();
  for (double s : singular_) best = std::min(best, distance(x, s));
  return best;
}

void MapSystem::check_point(double x) const {
  if (!in_domain(x)) throw Error(ErrorKind::out_of_domain, fmt::format("x = {} outside [{}, {}]", x, lo_, hi_));
  if (!singular_.empty() && singular_distance(x) < guard())
    throw Error(ErrorKind::singular_point, fmt::format("x = {} lies on the singular set", x));
}

Branch MapSystem::branch_at(double x) const {
  if (!in_domain(x)) throw Error(ErrorKind::out_of_domain, fmt::format("x = {} outside domain", x));
  if (is_circle()) x = reduce(x);
  if (reciprocal_tail_ && x > 0.0 && x <= branches_.front().lo) {
    // Countable tail beyond the stored branches.
    double inv = 1.0 / x;
    int n = static_cast<int>(std::floor(inv));
    for (int cand : {n - 1, n, n + 1}) {
      if (cand < 1) continue;
      Branch br = gauss_branch(cand);
      if (br.contains(x)) return br;
    }
  }
  auto it = std::upper_bound(branches_.begin(), branches_.end(), x,
                             [](double v, const Branch& br) { return v < br.lo; });
  // Check the candidate and its neighbours to honour open/closed endpoints.
  const std::ptrdiff_t pos = std::distance(branches_.begin(), it) - 1;
  for (std::ptrdiff_t k = pos; k >= std::max<std::ptrdiff_t>(0, pos - 1); --k) {
    if (k >= 0 && k < static_cast<std::ptrdiff_t>(branches_.size()) && branches_[k].contains(x))
      return branches_[k];
  }
  if (pos + 1 < static_cast<std::ptrdiff_t>(branches_.size()) && branches_[pos + 1].contains(x))
    return branches_[pos + 1];
  throw Error(ErrorKind::singular_point, fmt::format("x = {} is not covered by any branch", x));
}

double MapSystem::eval(double x) const {
  check_point(x);
  if (is_circle()) x = reduce(x);
  return reduce(branch_at(x).value(x));
}

double MapSystem::derivative(double x) const {
  check_point(x);
  if (is_circle()) x = reduce(x);
  return branch_at(x).slope(x);
}

std::vector<Preimage> MapSystem::inverse_branches(double y, int max_branches) const {
  if (max_branches < 1) throw Error(ErrorKind::bad_parameter, "max_branches must be >= 1");
  if (is_circle()) y = reduce(y);
  std::vector<Preimage> out;
  // Branch ids grow left to right except for the Gauss family, whose ids are
  // continued-fraction digits; both are emitted in id order.
  std::vector<const Branch*> order;
  order.reserve(branches_.size());
  for (const auto& br : branches_) order.push_back(&br);
  std::sort(order.begin(), order.end(), [](const Branch* l, const Branch* r) { return l->id < r->id; });
  for (const Branch* br : order) {
    if (static_cast<int>(out.size()) >= max_branches) break;
    if (!br->image_contains(y)) continue;
    double x = std::clamp(br->preimage(y), br->lo, br->hi);
    if (!br->contains(x)) continue;
    out.push_back({x, br->id});
  }
  if (out.empty()) throw Error(ErrorKind::no_preimage, fmt::format("y = {} has no preimage", y));
  return out;
}

std::size_t MapSystem::branch_count(double y) const {
  try {
    return inverse_branches(y, std::numeric_limits<int>::max()).size();
  } catch (const Error&) {
    return 0;
  }
}

std::optional<double> MapSystem::pullback(double y, double anchor) const {
  if (is_circle()) {
    y = reduce(y);
    double best = 0.0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& br : branches_) {
      double x = reduce(br.preimage(y));
      double d = distance(x, anchor);
      if (d < best_d) {
        best_d = d;
        best = x;
      }
    }
    return best;
  }
  Branch br = branch_at(anchor);
  const double tol = 1e-15 * diameter();
  if (y < br.image_min() - tol || y > br.image_max() + tol) return std::nullopt;
  return std::clamp(br.preimage(std::clamp(y, br.image_min(), br.image_max())), br.lo, br.hi);
}

// ---------------------------------------------------------------- builtins

MapSystem make_builtin(const std::string& name, double param, int max_branches) {
  MapSpec spec;
  spec.kind = name;
  spec.param = param;
  spec.max_branches = max_branches;
  return make_map(spec);
}

MapSystem make_map(const MapSpec& spec) {
  const std::string& kind = spec.kind;
  // Affine branches have a locally constant inverse derivative, so any
  // positive Hoelder constant works; a tiny one leaves r~ limited by G.
  constexpr double affine_holder = 1e-9;

  if (kind == "doubling" || kind == "tripling" || kind == "linear") {
    const int k = kind == "doubling" ? 2 : kind == "tripling" ? 3 : static_cast<int>(std::lround(spec.param));
    if (k < 2 || (kind == "linear" && !is_integer(spec.param)))
      throw Error(ErrorKind::bad_parameter, "linear circle map needs an integer slope >= 2");
    MapSpec s = spec;
    s.param = k;
    std::vector<Branch> br;
    for (int j = 0; j < k; ++j)
      br.push_back(affine_branch(j, static_cast<double>(j) / k, static_cast<double>(j + 1) / k, k, -j));
    std::string label = kind == "linear" ? fmt::format("linear({})", k) : kind;
    // Any arc shorter than the circle carries well-defined inverse branches.
    return MapSystem(label, s, 0.0, 1.0, Metric::circle, std::move(br), {}, 1.0,
                     [](double) { return affine_holder; }, [](double) { return 0.5; }, false);
  }
  if (kind == "tent") {
    std::vector<Branch> br{affine_branch(0, 0.0, 0.5, 2.0, 0.0, true, true),
                           affine_branch(1, 0.5, 1.0, -2.0, 2.0, false, true)};
    return MapSystem("tent", spec, 0.0, 1.0, Metric::interval, std::move(br), {}, 1.0,
                     [](double) { return affine_holder; }, [](double) { return 1.0; }, false);
  }
  if (kind == "quadratic") {
    const double a = spec.param;
    if (!(a > 1.0 && a <= 2.0)) throw Error(ErrorKind::bad_parameter, "quadratic family needs a in (1,2]");
    std::vector<Branch> br{power_branch(0, -1.0, 0.0, -a, 1.0, 2.0, true, false),
                           power_branch(1, 0.0, 1.0, -a, 1.0, 2.0, false, true)};
    // Inverse branches +-sqrt((1-u)/a) have g'' = (1-u)^(-3/2) / (4 sqrt a);
    // bound it on the ball of radius G(x) = (1-x)/2 that avoids the critical value.
    auto radius = [](double x) { return std::max(0.5 * (1.0 - x), 1e-300); };
    auto bound = [a, radius](double x) {
      const double gap = std::max(1.0 - x - radius(x), 1e-300);
      return 1.0 / (4.0 * std::sqrt(a) * std::pow(gap, 1.5));
    };
    return MapSystem(fmt::format("quadratic({})", a), spec, -1.0, 1.0, Metric::interval, std::move(br),
                     {0.0}, 1.0, bound, radius, false);
  }
  if (kind == "gauss") {
    if (spec.max_branches < 1) throw Error(ErrorKind::bad_parameter, "gauss needs max_branches >= 1");
    std::vector<Branch> br;
    for (int n = 1; n <= spec.max_branches; ++n) br.push_back(gauss_branch(n));
    // g_n(u) = 1/(n+u): |g_n''(u)| = 2/(n+u)^3 <= 2/(1+u)^3 for every digit n.
    return MapSystem("gauss", spec, 0.0, 1.0, Metric::interval, std::move(br), {0.0}, 1.0,
                     [](double x) { return 2.0 / std::pow(1.0 + x, 3); }, [](double) { return 1.0; }, true);
  }
  if (kind == "cusp") {
    std::vector<Branch> br{power_branch(0, -1.0, 0.0, -2.0, 1.0, 0.5, true, false),
                           power_branch(1, 0.0, 1.0, 2.0, -1.0, 0.5, false, true)};
    // Inverse branches u -> -((1-u)/2)^2 and ((1+u)/2)^2 have derivatives
    // Lipschitz with constant 1/2 on all of [-1,1].
    return MapSystem("cusp", spec, -1.0, 1.0, Metric::interval, std::move(br), {0.0}, 1.0,
                     [](double) { return 0.5; }, [](double) { return 2.0; }, false);
  }
  if (kind == "custom") {
    if (spec.branches.empty()) throw Error(ErrorKind::bad_parameter, "custom map without branches");
    std::vector<double> singular = spec.singular;
    const double diam = spec.hi - spec.lo;
    const double h0 = spec.holder_scale;
    const double alpha = spec.holder_alpha;
    if (!(h0 > 0.0) || alpha < 0.0) throw Error(ErrorKind::bad_parameter, "custom Hoelder data must be positive");
    auto dist = [singular, diam, metric = spec.metric](double x) {
      if (singular.empty()) return 1e6 * diam;
      double best = std::numeric_limits<double>::infinity();
      for (double s : singular) {
        double d = std::abs(x - s);
        if (metric == Metric::circle) d = std::min(d, 1.0 - d);
        best = std::min(best, d);
      }
      return std::max(best, 1e-300);
    };
    auto bound = [dist, h0, alpha](double x) { return h0 * std::pow(dist(x), -alpha); };
    auto radius = [dist, diam](double x) { return std::min(0.5 * dist(x), diam); };
    return MapSystem("custom", spec, spec.lo, spec.hi, spec.metric, spec.branches, singular, spec.beta, bound,
                     radius, false);
  }
  throw Error(ErrorKind::bad_parameter, fmt::format("unknown map '{}'", kind));
}

// ---------------------------------------------------------------- non-flatness

NonFlatnessFit fit_nonflatness(const MapSystem& map, std::span<const double> samples) {
  if (map.singular_set().empty()) throw Error(ErrorKind::empty_singular_set, "nothing to fit");
  if (samples.size() < 10) throw Error(ErrorKind::bad_parameter, "need at least 10 samples");
  std::vector<double> u;  // -log d(x,S)
  std::vector<double> v;  // log |f'(x)|
  for (double x : samples) {
    const double d = map.singular_distance(x);
    if (!(d > 0.0)) throw Error(ErrorKind::singular_point, "sample on the singular set");
    u.push_back(-std::log(d));
    v.push_back(std::log(std::abs(map.derivative(x))));
  }
  const double n = static_cast<double>(u.size());
  double mu = 0, mv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  double suu = 0, suv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  const double slope = suu > 0 ? suv / suu : 0.0;
  const double intercept = mv - slope * mu;

  NonFlatnessFit fit;
  fit.alpha = std::abs(slope);
  double residual = 0.0;
  double log_h = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    residual = std::max(residual, std::abs(v[i] - (intercept + slope * u[i])));
    // H^-1 d^alpha <= |f'| <= H d^-alpha, i.e. |v - alpha u| <= log H and
    // v + alpha u >= -log H.
    log_h = std::max(log_h, v[i] - fit.alpha * u[i]);
    log_h = std::max(log_h, -(v[i] + fit.alpha * u[i]));
  }
  fit.h_const = std::exp(log_h);
  fit.residual = residual;
  return fit;
}

}  // namespace replab
