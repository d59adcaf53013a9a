#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "replab/maps.hpp"

namespace replab {

// Observables phi: M -> R drawn from a fixed catalog. The textual name is the
// round-trippable identifier used in configs, reports and IFS files:
//   const:<c>   x   x^2   logdf   -logdf   table:<x0>:<y0>,<x1>:<y1>,...
class Potential {
 public:
  enum class Kind { constant, coordinate, square, log_derivative, neg_log_derivative, table, combination };

  static Potential constant(double c);
  static Potential coordinate();
  static Potential square();
  static Potential log_derivative();
  static Potential neg_log_derivative();
  // Piecewise-linear interpolation, constant beyond the first/last knot.
  static Potential table(std::vector<double> xs, std::vector<double> ys);
  static Potential combination(double a, const Potential& p, double b, const Potential& q);
  static Potential parse(std::string_view text);

  double operator()(const MapSystem& map, double x) const;
  std::string name() const;
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::constant;
  double c_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::shared_ptr<const Potential> lhs_;
  std::shared_ptr<const Potential> rhs_;
  double wa_ = 0.0;
  double wb_ = 0.0;
};

std::vector<Potential> parse_potentials(std::string_view comma_free_list);

}  // namespace replab
