#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "replab/error.hpp"
#include "replab/numeric.hpp"
#include "replab/tempering.hpp"

using namespace replab;

namespace {

// sup_{0<=n<=depth} e^{n(chi-eps)} / |(f^n)'(x_{-n})|, by direct products.
double sup_oracle(const MapSystem& map, const BackwardOrbit& bw, double chi, double eps) {
  double best = 1.0;
  double prod = 1.0;
  for (std::size_t n = 1; n <= bw.depth(); ++n) {
    prod *= std::abs(map.derivative(bw.at(n)));
    best = std::max(best, std::exp(static_cast<double>(n) * (chi - eps)) / prod);
  }
  return best;
}

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("kernel output is tempered on random sequences") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 2 + rng() % 60;
    const double eps = 0.01 + 0.3 * unit_uniform(rng);
    std::vector<double> v(len);
    for (auto& x : v) x = std::exp(-12.0 * unit_uniform(rng));
    const auto r = tempering_kernel(v, eps);
    REQUIRE(r.size() == len);
    for (std::size_t i = 0; i < len; ++i) {
      CHECK(r[i] > 0.0);
      CHECK(r[i] <= v[i]);
      for (std::size_t j = 0; j < len; ++j) {
        const double k = std::abs(static_cast<double>(i) - static_cast<double>(j));
        CHECK(r[i] / r[j] <= std::exp(k * eps) * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("kernel worked sequences") {
  const std::vector<double> flat(9, 0.7);
  for (double r : tempering_kernel(flat, 0.2)) CHECK(r == 0.7);

  std::vector<double> spike(11, 1.0);
  spike[5] = 1e-3;
  const auto r = tempering_kernel(spike, 0.1);
  for (std::size_t t = 0; t < r.size(); ++t)
    CHECK(r[t] == doctest::Approx(1e-3 * std::exp(0.1 * std::abs(static_cast<double>(t) - 5.0))).epsilon(1e-12));

  std::vector<double> rising(20);
  for (std::size_t t = 0; t < rising.size(); ++t) rising[t] = 0.3 * std::exp(0.05 * t);
  const auto rr = tempering_kernel(rising, 0.1);
  for (std::size_t t = 0; t < rr.size(); ++t) CHECK(rr[t] == doctest::Approx(rising[t]).epsilon(1e-14));

  CHECK(throws_kind(ErrorKind::non_positive_input, [] { tempering_kernel(std::vector<double>{1.0, 0.0}, 0.1); }));
  CHECK(throws_kind(ErrorKind::non_positive_input, [] { tempering_kernel(std::vector<double>{1.0, -2.0}, 0.1); }));
}

TEST_CASE("C_eps is exactly one for constant slope") {
  for (const char* name : {"doubling", "tripling"}) {
    const auto map = make_builtin(name);
    const double chi = std::log(std::abs(map.derivative(0.1)));
    const Orbit o = typical_orbit(map, 5000, 3);
    for (double eps : {0.01, 0.1, 0.2})
      for (std::size_t end : {300u, 2000u, 4900u}) {
        const auto bw = backward_window(o, end, 200);
        CHECK(c_epsilon(map, bw, chi, eps) == 1.0);
        CHECK(adapted_norm(map, bw, chi, eps, 1.0) == 1.0);
        CHECK(adapted_norm(map, bw, chi, eps, 0.0) == 0.0);
      }
  }
  const auto five = make_builtin("linear", 5.0);
  const auto bw = backward_window(typical_orbit(five, 1000, 1), 800, 200);
  CHECK(c_epsilon(five, bw, std::log(5.0), 0.3) == 1.0);
}

TEST_CASE("sandwich and monotonicity on cusp windows") {
  const auto cusp = make_builtin("cusp");
  const Orbit o = typical_orbit(cusp, 300000, 12);
  const double chi = 0.5;
  for (int w = 0; w < 1000; ++w) {
    const auto bw = backward_window(o, 250 + static_cast<std::size_t>(w) * 290, 200);
    const double c = c_epsilon(cusp, bw, chi, 0.15);
    const double norm = adapted_norm(cusp, bw, chi, 0.15, 1.0);
    CHECK(c == doctest::Approx(sup_oracle(cusp, bw, chi, 0.15)).epsilon(1e-10));
    CHECK(norm >= 1.0);
    CHECK(norm <= c * (1.0 + 1e-12));
    CHECK(c_epsilon(cusp, bw, chi, 0.16) <= c * (1.0 + 1e-12));
    CHECK(adapted_norm(cusp, bw, chi, 0.15, -2.0) == doctest::Approx(2.0 * norm).epsilon(1e-14));
  }
}

TEST_CASE("one-step contraction of the adapted norm") {
  const auto cusp = make_builtin("cusp");
  const Orbit o = typical_orbit(cusp, 20000, 4);
  const double chi = 0.5, eps = 0.1;
  for (std::size_t end : {1000u, 5000u, 15000u}) {
    const auto bw = backward_window(o, end, 300);
    BackwardOrbit prev;
    prev.points.assign(bw.points.begin(), bw.points.end() - 1);
    // ||T^{-1} v||' at f^{-1} x^ with v = 1 at x^.
    const double pulled = 1.0 / std::abs(cusp.derivative(bw.at(1)));
    const double lhs = adapted_norm(cusp, prev, chi, eps, pulled);
    CHECK(lhs <= std::exp(-chi + eps) * adapted_norm(cusp, bw, chi, eps, 1.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("radius formula") {
  const double chi = std::log(2.0);
  CHECK(radius_tilde(1.0, 1.0, 1.0, 1.0, 1.0, chi, 0.1) ==
        doctest::Approx(0.5 * (std::exp(0.2) - std::exp(0.1))).epsilon(1e-14));
  CHECK(radius_tilde(1.0, 1.0, 1.0, 1.0, 1.0, chi, 0.1) == doctest::Approx(0.0579).epsilon(1e-3));
  CHECK(throws_kind(ErrorKind::tempering_too_weak, [&] { radius_tilde(std::exp(0.1), 1.0, 1.0, 1.0, 1.0, chi, 0.1); }));
  CHECK(throws_kind(ErrorKind::bad_parameter, [] { require_epsilon_range(0.6, 0.2); }));
  CHECK(throws_kind(ErrorKind::bad_parameter, [] { require_epsilon_range(0.6, 0.0); }));
}

TEST_CASE("contraction radius profile invariants") {
  const auto dbl = make_builtin("doubling");
  const Orbit o = typical_orbit(dbl, 2000, 5);
  const auto prof = contraction_radius(dbl, backward_window(o, 1500, 200), std::log(2.0), 0.15);
  CHECK(prof.c_eps == 1.0);
  CHECK(prof.r > 0.0);
  CHECK(prof.r <= prof.r_tilde);
  CHECK(prof.rho <= prof.r);
  CHECK(prof.depth_used == 200);

  const auto cusp = make_builtin("cusp");
  const Orbit co = typical_orbit(cusp, 200000, 6);
  std::mt19937_64 rng(6);
  int accepted = 0;
  for (int w = 0; w < 300; ++w) {
    const auto bw = backward_window(co, 300 + static_cast<std::size_t>(w) * 600, 200);
    TemperingProfile p;
    try {
      p = contraction_radius(cusp, bw, 0.5, 0.15);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::tempering_too_weak);
      continue;
    }
    ++accepted;
    CHECK(p.adapted_norm_factor >= 1.0);
    CHECK(p.adapted_norm_factor <= p.c_eps);
    CHECK(p.r <= p.r_tilde);
    CHECK(p.rho <= p.r);
    CHECK(p.c_eps < std::exp(0.15));
    // Points inside the accepted ball pull back with uniform contraction.
    for (int s = 0; s < 8; ++s) {
      const double y = std::clamp(bw.head() + (2.0 * unit_uniform(rng) - 1.0) * p.rho, -1.0, 1.0);
      if (cusp.distance(y, bw.head()) >= p.rho) continue;
      CHECK(verify_backward_contraction(cusp, bw, y, p.rho, 0.5, 0.15).pass);
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("backward contraction on the doubling map") {
  const auto dbl = make_builtin("doubling");
  const Orbit o = typical_orbit(dbl, 2000, 8);
  const auto bw = backward_window(o, 1000, 100);
  const auto rep = verify_backward_contraction(dbl, bw, dbl.reduce(bw.head() + 0.01), 0.05, std::log(2.0), 0.1);
  CHECK(rep.pass);
  // Beyond ~30 halvings the distance drops under the rounding of O(1) coordinates.
  for (std::size_t k = 1; k <= 30; ++k)
    CHECK(rep.distance_ratio[k - 1] == doctest::Approx(std::ldexp(1.0, -static_cast<int>(k))).epsilon(1e-6));
  CHECK(verify_backward_contraction(dbl, bw, bw.head(), 0.05, std::log(2.0), 0.1).pass);
  CHECK(throws_kind(ErrorKind::bad_parameter,
                    [&] { verify_backward_contraction(dbl, bw, dbl.reduce(bw.head() + 0.2), 0.05, std::log(2.0), 0.1); }));
}
