#include "replab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "replab/error.hpp"

namespace replab {

Potential Potential::constant(double c) {
  Potential p;
  p.kind_ = Kind::constant;
  p.c_ = c;
  return p;
}

Potential Potential::coordinate() {
  Potential p;
  p.kind_ = Kind::coordinate;
  return p;
}

Potential Potential::square() {
  Potential p;
  p.kind_ = Kind::square;
  return p;
}

Potential Potential::log_derivative() {
  Potential p;
  p.kind_ = Kind::log_derivative;
  return p;
}

Potential Potential::neg_log_derivative() {
  Potential p;
  p.kind_ = Kind::neg_log_derivative;
  return p;
}

Potential Potential::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw Error(ErrorKind::bad_parameter, "table potential needs matching non-empty knots");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw Error(ErrorKind::bad_parameter, "table potential knots must be sorted");
  Potential p;
  p.kind_ = Kind::table;
  p.xs_ = std::move(xs);
  p.ys_ = std::move(ys);
  return p;
}

Potential Potential::combination(double a, const Potential& lhs, double b, const Potential& rhs) {
  Potential p;
  p.kind_ = Kind::combination;
  p.wa_ = a;
  p.wb_ = b;
  p.lhs_ = std::make_shared<const Potential>(lhs);
  p.rhs_ = std::make_shared<const Potential>(rhs);
  return p;
}

double Potential::operator()(const MapSystem& map, double x) const {
  switch (kind_) {
    case Kind::constant: return c_;
    case Kind::coordinate: return x;
    case Kind::square: return x * x;
    case Kind::log_derivative: return std::log(std::abs(map.derivative(x)));
    case Kind::neg_log_derivative: return -std::log(std::abs(map.derivative(x)));
    case Kind::table: {
      if (x <= xs_.front()) return ys_.front();
      if (x >= xs_.back()) return ys_.back();
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
      const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
    }
    case Kind::combination: return wa_ * (*lhs_)(map, x) + wb_ * (*rhs_)(map, x);
  }
  return 0.0;
}

std::string Potential::name() const {
  switch (kind_) {
    case Kind::constant: return fmt::format("const:{}", c_);
    case Kind::coordinate: return "x";
    case Kind::square: return "x^2";
    case Kind::log_derivative: return "logdf";
    case Kind::neg_log_derivative: return "-logdf";
    case Kind::table: {
      std::string out = "table:";
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (i) out += ',';
        out += fmt::format("{}:{}", xs_[i], ys_[i]);
      }
      return out;
    }
    case Kind::combination: return fmt::format("({}*{}+{}*{})", wa_, lhs_->name(), wb_, rhs_->name());
  }
  return "?";
}

namespace {

double parse_double(std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::config, fmt::format("bad number '{}'", s));
  }
  if (used != s.size()) throw Error(ErrorKind::config, fmt::format("bad number '{}'", s));
  return v;
}

}  // namespace

Potential Potential::parse(std::string_view text) {
  if (text == "x") return coordinate();
  if (text == "x^2") return square();
  if (text == "logdf") return log_derivative();
  if (text == "-logdf") return neg_log_derivative();
  if (text.starts_with("const:")) return constant(parse_double(text.substr(6)));
  if (text.starts_with("table:")) {
    std::vector<double> xs, ys;
    std::string body(text.substr(6));
    std::stringstream ss(body);
    std::string knot;
    while (std::getline(ss, knot, ',')) {
      auto colon = knot.find(':');
      if (colon == std::string::npos) throw Error(ErrorKind::config, "table knot needs x:y");
      xs.push_back(parse_double(std::string_view(knot).substr(0, colon)));
      ys.push_back(parse_double(std::string_view(knot).substr(colon + 1)));
    }
    return table(std::move(xs), std::move(ys));
  }
  throw Error(ErrorKind::config, fmt::format("unknown potential '{}'", text));
}

std::vector<Potential> parse_potentials(std::string_view list) {
  std::vector<Potential> out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (ss >> item) out.push_back(Potential::parse(item));
  return out;
}

}  // namespace replab
