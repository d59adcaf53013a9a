#pragma once

// One-dimensional dynamical systems: piecewise-monotone maps of an interval or
// of the circle [0,1), described branch by branch so that evaluation,
// derivatives and inverse branches all come from the same closed forms.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace replab {

enum class Metric { interval, circle };

enum class Formula {
  affine,  // value = a*x + b
  power,   // value = b + a*|x - center|^exponent
};

// A monotone branch on [lo, hi] with configurable endpoint closure.
struct Branch {
  int id = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = true;
  bool hi_closed = false;
  Formula formula = Formula::affine;
  double a = 1.0;
  double b = 0.0;
  double center = 0.0;
  double exponent = 1.0;

  double value(double x) const;
  double slope(double x) const;
  // Inverse of value() on this branch, without any range checks.
  double preimage(double y) const;
  double image_min() const;
  double image_max() const;
  bool contains(double x) const;
  // Whether y is attained on the branch, honouring endpoint closure.
  bool image_contains(double y) const;
};

struct Preimage {
  double x;
  int branch_id;
};

// Everything needed to rebuild a map: builtin name plus parameters, or a
// custom branch table.
struct MapSpec {
  std::string kind = "doubling";
  double param = 0.0;      // quadratic a, linear slope
  int max_branches = 50;   // Gauss truncation
  // custom maps only
  double lo = 0.0;
  double hi = 1.0;
  Metric metric = Metric::interval;
  std::vector<Branch> branches;
  std::vector<double> singular;
  double beta = 1.0;
  double holder_scale = 1.0;   // H0 in H(x) = H0 d(x,S)^-alpha
  double holder_alpha = 0.0;
};

class MapSystem {
 public:
  using Profile = std::function<double(double)>;

  MapSystem(std::string name, MapSpec spec, double lo, double hi, Metric metric,
            std::vector<Branch> branches, std::vector<double> singular, double beta,
            Profile holder_bound, Profile holder_radius, bool reciprocal_tail);

  const std::string& name() const { return name_; }
  const MapSpec& spec() const { return spec_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double diameter() const { return hi_ - lo_; }
  Metric metric() const { return metric_; }
  bool is_circle() const { return metric_ == Metric::circle; }
  std::span<const Branch> branches() const { return branches_; }
  std::span<const double> singular_set() const { return singular_; }
  double beta() const { return beta_; }
  int max_branches() const { return spec_.max_branches; }

  // Hoelder data of the inverse derivative: H(x) and the radius G(x).
  double holder_bound(double x) const { return holder_bound_(x); }
  double holder_radius(double x) const { return holder_radius_(x); }
  MapSystem with_holder(double beta, Profile holder_bound, Profile holder_radius) const;

  // Points closer than this to the singular set count as lying on it.
  double guard() const { return 1e-14 * diameter(); }
  // Returned by singular_distance() when S is empty.
  double no_singularity_sentinel() const { return 1e6 * diameter(); }

  // Integer-slope affine maps lose mantissa bits under iteration and need
  // low-order dithering to keep floating-point orbits generic.
  bool lattice_prone() const { return lattice_prone_; }

  bool in_domain(double x) const;
  double reduce(double x) const;
  double distance(double x, double y) const;
  // Signed displacement y - x; shortest representative on the circle.
  double displacement(double x, double y) const;
  double singular_distance(double x) const;

  Branch branch_at(double x) const;
  double eval(double x) const;
  double derivative(double x) const;
  std::vector<Preimage> inverse_branches(double y, int max_branches) const;
  std::size_t branch_count(double y) const;

  // Preimage of y along the local inverse branch through `anchor`.
  // Circle maps pick the preimage nearest the anchor; interval maps use the
  // branch containing the anchor and return nullopt if y leaves its image.
  std::optional<double> pullback(double y, double anchor) const;

 private:
  void check_point(double x) const;

  std::string name_;
  MapSpec spec_;
  double lo_;
  double hi_;
  Metric metric_;
  std::vector<Branch> branches_;
  std::vector<double> singular_;
  double beta_;
  Profile holder_bound_;
  Profile holder_radius_;
  bool reciprocal_tail_;
  bool lattice_prone_;
};

MapSystem make_map(const MapSpec& spec);

// Builtins: doubling, tripling, linear (slope = param), tent,
// quadratic (a = param), gauss (max_branches), cusp.
MapSystem make_builtin(const std::string& name, double param = 0.0, int max_branches = 50);

struct NonFlatnessFit {
  double alpha = 0.0;
  double h_const = 1.0;
  double residual = 0.0;
};

NonFlatnessFit fit_nonflatness(const MapSystem& map, std::span<const double> samples);

}  // namespace replab
