#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "replab/error.hpp"
#include "replab/orbits.hpp"

using namespace replab;

using oracle::gauss_expectation;

TEST_CASE("iterate follows the map") {
  const auto dbl = make_builtin("doubling");
  const Orbit o = iterate(dbl, 0.1, 3, 1);
  REQUIRE(o.size() == 3);
  CHECK(o[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(o[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(o[2] == doctest::Approx(0.4).epsilon(1e-12));

  const auto gauss = make_builtin("gauss");
  const double fixed = std::sqrt(2.0) - 1.0;
  const Orbit g = iterate(gauss, fixed, 2, 1);
  CHECK(g[1] == doctest::Approx(fixed).epsilon(1e-12));
}

TEST_CASE("singular hits restart with a logged perturbation") {
  const auto cusp = make_builtin("cusp");
  const Orbit o = iterate(cusp, 0.25, 2, 5);
  REQUIRE(o.size() == 2);
  CHECK_FALSE(o.restarts.empty());
  CHECK(o.x0 != 0.25);
  CHECK(std::abs(o.x0 - 0.25) < 1e-6);
  CHECK(cusp.singular_distance(o[1]) > cusp.guard());
}

TEST_CASE("orbits are deterministic and consistent") {
  const auto gauss = make_builtin("gauss");
  const Orbit a = typical_orbit(gauss, 5000, 42);
  const Orbit b = typical_orbit(gauss, 5000, 42);
  CHECK(a.points == b.points);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double next = gauss.eval(a[i]);
    CHECK(std::abs(next - a[i + 1]) <= 1e-12 * std::max(1.0, std::abs(next)));
  }
  CHECK(typical_orbit(gauss, 5000, 43).points != a.points);
}

TEST_CASE("Birkhoff averages") {
  const auto dbl = make_builtin("doubling");
  const Orbit o = typical_orbit(dbl, 1000000, 3);
  CHECK(birkhoff_average(dbl, o, Potential::constant(1.25)) == 1.25);
  CHECK(birkhoff_average(dbl, o, Potential::coordinate()) == doctest::Approx(0.5).epsilon(0.004));

  const auto lin = Potential::combination(2.0, Potential::coordinate(), -3.0, Potential::log_derivative());
  const double lhs = birkhoff_average(dbl, o, lin);
  const double rhs = 2.0 * birkhoff_average(dbl, o, Potential::coordinate()) -
                     3.0 * birkhoff_average(dbl, o, Potential::log_derivative());
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("Lyapunov estimates against quadrature") {
  const auto dbl = make_builtin("doubling");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto est = lyapunov_estimates(dbl, typical_orbit(dbl, 10000, seed));
    CHECK(est.chi_lower == std::log(2.0));
    CHECK(est.lambda_forward == std::log(2.0));
  }

  const double gauss_chi = gauss_expectation([](double x) { return -2.0 * std::log(x); });
  CHECK(gauss_chi == doctest::Approx(std::numbers::pi * std::numbers::pi / (6.0 * std::numbers::ln2)).epsilon(1e-8));
  const auto gauss = make_builtin("gauss");
  const auto g = lyapunov_estimates(gauss, typical_orbit(gauss, 1000000, 11));
  CHECK(std::abs(g.chi_lower - gauss_chi) < 0.05);
  CHECK(g.chi_lower <= g.lambda_forward + 1e-12);

  const auto cusp = make_builtin("cusp");
  const auto c = lyapunov_estimates(cusp, typical_orbit(cusp, 1000000, 11));
  CHECK(std::abs(c.chi_lower - 0.5) < 0.02);
}

TEST_CASE("quadratic critical orbit raises NonFiniteLog") {
  const auto quad = make_builtin("quadratic", 2.0);
  Orbit o;
  o.points = {0.5, 0.0};
  bool thrown = false;
  try {
    lyapunov_estimates(quad, o);
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::non_finite_log || e.kind() == ErrorKind::singular_point;
  }
  CHECK(thrown);
}

TEST_CASE("integrability diagnostics") {
  const auto dbl = make_builtin("doubling");
  const auto stats = integrability_diagnostics(dbl, typical_orbit(dbl, 20000, 1));
  bool saw_distance = false;
  for (const auto& s : stats) {
    if (s.name == "log d(.,S)") {
      saw_distance = true;
      CHECK_FALSE(s.applicable);
    } else {
      CHECK(std::isfinite(s.mean));
    }
  }
  CHECK(saw_distance);

  const auto gauss = make_builtin("gauss");
  const double log_x = gauss_expectation([](double x) { return std::log(x); });
  for (const auto& s : integrability_diagnostics(gauss, typical_orbit(gauss, 1000000, 5)))
    if (s.name == "log d(.,S)") {
      CHECK(s.stable);
      CHECK(std::abs(s.mean - log_x) < 0.02);
    }

  const auto cusp = make_builtin("cusp");
  for (const auto& s : integrability_diagnostics(cusp, typical_orbit(cusp, 1000000, 5)))
    if (s.name == "log d(.,S)") CHECK(std::abs(s.mean + 1.0) < 0.02);
}

TEST_CASE("backward windows") {
  const auto dbl = make_builtin("doubling");
  Orbit o;
  o.points = {0.1, 0.2, 0.4, 0.8};
  const auto w = backward_window(o, 3, 2);
  REQUIRE(w.points.size() == 3);
  CHECK(w.at(0) == 0.8);
  CHECK(w.at(2) == 0.2);
  CHECK(backward_window(o, 3, 0).points.size() == 1);
  CHECK(backward_window(o, 2, 2).points == std::vector<double>{0.1, 0.2, 0.4});
  bool thrown = false;
  try {
    backward_window(o, 1, 2);
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::depth_exceeds_history;
  }
  CHECK(thrown);

  const Orbit long_orbit = typical_orbit(dbl, 500, 9);
  const auto win = backward_window(long_orbit, 300, 100);
  for (std::size_t k = 0; k < 100; ++k)
    CHECK(std::abs(dbl.eval(win.at(k + 1)) - win.at(k)) < 1e-12);
}

TEST_CASE("running means export") {
  const auto dbl = make_builtin("doubling");
  const Orbit o = typical_orbit(dbl, 10000, 2);
  std::vector<Potential> pots{Potential::coordinate()};
  const auto rm = running_means(dbl, o, pots, 1000);
  REQUIRE(!rm.index.empty());
  CHECK(rm.means.size() == 1);
  CHECK(rm.means[0].back() == doctest::Approx(birkhoff_average(dbl, o, pots[0])).epsilon(1e-12));
}
