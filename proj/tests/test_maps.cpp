#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "replab/error.hpp"
#include "replab/maps.hpp"
#include "replab/numeric.hpp"

using namespace replab;

namespace {

std::vector<MapSystem> builtins() {
  return {make_builtin("doubling"), make_builtin("tripling"),       make_builtin("tent"),
          make_builtin("quadratic", 1.8), make_builtin("gauss", 0.0, 50), make_builtin("cusp")};
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

TEST_CASE("eval and derivative on the worked points") {
  CHECK(make_builtin("doubling").eval(0.3) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(make_builtin("cusp").eval(0.25) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(make_builtin("gauss").eval(0.4) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(make_builtin("doubling").derivative(0.77) == 2.0);
  CHECK(make_builtin("cusp").derivative(0.25) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(make_builtin("gauss").derivative(0.4) == doctest::Approx(-6.25).epsilon(1e-14));
}

TEST_CASE("singular guard and domain errors") {
  const auto cusp = make_builtin("cusp");
  CHECK(throws_kind(ErrorKind::singular_point, [&] { cusp.eval(0.0); }));
  CHECK(throws_kind(ErrorKind::singular_point, [&] { cusp.derivative(1e-16); }));
  CHECK(throws_kind(ErrorKind::out_of_domain, [&] { cusp.eval(1.5); }));
  CHECK(throws_kind(ErrorKind::out_of_domain, [&] { make_builtin("tent").eval(-0.1); }));
}

TEST_CASE("inverse branches") {
  auto pre = make_builtin("doubling").inverse_branches(0.6, 10);
  REQUIRE(pre.size() == 2);
  CHECK(pre[0].x == doctest::Approx(0.3));
  CHECK(pre[0].branch_id == 0);
  CHECK(pre[1].x == doctest::Approx(0.8));
  CHECK(pre[1].branch_id == 1);

  auto g = make_builtin("gauss", 0.0, 50).inverse_branches(0.5, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0].x == doctest::Approx(2.0 / 3.0));
  CHECK(g[0].branch_id == 1);
  CHECK(g[1].x == doctest::Approx(0.4));
  CHECK(g[2].x == doctest::Approx(2.0 / 7.0));
  CHECK(g[2].branch_id == 3);

  auto t = make_builtin("tent").inverse_branches(1.0, 10);
  REQUIRE(t.size() == 1);
  CHECK(t[0].x == doctest::Approx(0.5));

  CHECK(throws_kind(ErrorKind::no_preimage, [] { make_builtin("cusp").inverse_branches(2.0, 5); }));
}

TEST_CASE("round trip on a 1000-point image grid") {
  for (const auto& map : builtins()) {
    CAPTURE(map.name());
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double y = map.lo() + map.diameter() * (i + 0.5) / 1000.0;
      std::vector<Preimage> pre;
      try {
        pre = map.inverse_branches(y, map.max_branches());
      } catch (const Error&) {
        continue;
      }
      for (const auto& p : pre) {
        if (map.singular_distance(p.x) <= map.guard()) continue;
        worst = std::max(worst, map.distance(map.eval(p.x), y));
      }
    }
    CHECK(worst <= 1e-12 * map.diameter());
  }
}

TEST_CASE("branch ids follow position") {
  for (const auto& map : builtins()) {
    CAPTURE(map.name());
    // Gauss ids are continued-fraction digits, which decrease with x.
    const double sign = map.spec().kind == "gauss" ? -1.0 : 1.0;
    for (int i = 0; i < 200; ++i) {
      const double y = map.lo() + map.diameter() * (i + 0.25) / 200.0;
      if (map.branch_count(y) == 0) continue;  // outside the quadratic image
      auto pre = map.inverse_branches(y, map.max_branches());
      for (std::size_t j = 1; j < pre.size(); ++j) {
        CHECK(pre[j].branch_id > pre[j - 1].branch_id);
        CHECK(sign * (pre[j].x - pre[j - 1].x) > 0.0);
      }
    }
  }
}

TEST_CASE("derivative agrees with central differences") {
  for (const auto& map : builtins()) {
    CAPTURE(map.name());
    for (int i = 1; i < 1000; ++i) {
      const double x = map.lo() + map.diameter() * i / 1000.0;
      if (map.singular_distance(x) < 1e-3) continue;
      const auto br = map.branch_at(x);
      const double h = 1e-7 * std::max(1e-3, std::min(x - br.lo, br.hi - x));
      if (x - h <= br.lo || x + h >= br.hi) continue;
      const double fd = (br.value(x + h) - br.value(x - h)) / (2 * h);
      const double d = map.derivative(x);
      CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)));
    }
  }
}

TEST_CASE("singular distance") {
  CHECK(make_builtin("cusp").singular_distance(0.25) == 0.25);
  CHECK(make_builtin("gauss").singular_distance(0.01) == 0.01);
  const auto dbl = make_builtin("doubling");
  CHECK(dbl.singular_distance(0.5) == dbl.no_singularity_sentinel());
  CHECK(dbl.no_singularity_sentinel() == 1e6);
}

TEST_CASE("builtin catalogue") {
  const auto dbl = make_builtin("doubling");
  CHECK(dbl.is_circle());
  CHECK(dbl.singular_set().empty());
  CHECK(dbl.beta() == 1.0);

  const auto cusp = make_builtin("cusp");
  CHECK(cusp.lo() == -1.0);
  CHECK(cusp.hi() == 1.0);
  REQUIRE(cusp.singular_set().size() == 1);
  CHECK(cusp.singular_set()[0] == 0.0);
  CHECK(cusp.branch_count(0.3) == 2);

  const auto gauss = make_builtin("gauss", 0.0, 50);
  CHECK(gauss.branch_count(0.3) == 50);
  CHECK(gauss.singular_set().size() == 1);

  const auto quad = make_builtin("quadratic", 2.0);
  REQUIRE(quad.singular_set().size() == 1);
  CHECK(quad.singular_set()[0] == 0.0);

  CHECK(throws_kind(ErrorKind::bad_parameter, [] { make_builtin("quadratic", 2.5); }));
  CHECK(throws_kind(ErrorKind::bad_parameter, [] { make_builtin("quadratic", 1.0); }));
  CHECK(throws_kind(ErrorKind::bad_parameter, [] { make_builtin("no-such-map"); }));
  CHECK(throws_kind(ErrorKind::bad_parameter, [] { make_builtin("gauss", 0.0, 0); }));
}

TEST_CASE("Hoelder data is positive") {
  for (const auto& map : builtins()) {
    for (int i = 1; i < 100; ++i) {
      const double x = map.lo() + map.diameter() * i / 100.0;
      if (map.singular_distance(x) <= map.guard()) continue;
      CHECK(map.holder_bound(x) > 0.0);
      CHECK(map.holder_radius(x) > 0.0);
    }
  }
}

TEST_CASE("custom piecewise map") {
  MapSpec spec;
  spec.kind = "custom";
  spec.lo = 0.0;
  spec.hi = 1.0;
  Branch left;
  left.id = 0;
  left.lo = 0.0;
  left.hi = 0.5;
  left.hi_closed = true;
  left.a = 2.0;
  Branch right = left;
  right.id = 1;
  right.lo = 0.5;
  right.hi = 1.0;
  right.lo_closed = false;
  right.a = -2.0;
  right.b = 2.0;
  spec.branches = {left, right};
  const auto map = make_map(spec);
  CHECK(map.eval(0.2) == doctest::Approx(0.4));
  CHECK(map.eval(0.8) == doctest::Approx(0.4));
  CHECK(map.derivative(0.8) == -2.0);
  CHECK(map.branch_count(0.4) == 2);
}

TEST_CASE("non-flatness fits") {
  std::vector<double> cusp_samples;
  for (int i = 0; i < 60; ++i) cusp_samples.push_back(0.5 * std::pow(10.0, -6.0 * i / 59.0));
  const auto cusp = fit_nonflatness(make_builtin("cusp"), cusp_samples);
  CHECK(cusp.alpha == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(cusp.residual < 0.01);

  std::vector<double> gauss_samples;
  for (int i = 0; i < 60; ++i) gauss_samples.push_back(0.3 * std::pow(10.0, -4.0 * i / 59.0));
  CHECK(fit_nonflatness(make_builtin("gauss"), gauss_samples).alpha == doctest::Approx(2.0).epsilon(1e-3));

  // Constant slope 2 with an artificial singular point at 0.
  MapSpec spec;
  spec.kind = "custom";
  spec.metric = Metric::circle;
  spec.singular = {0.0};
  Branch a;
  a.id = 0;
  a.lo = 0.0;
  a.hi = 0.5;
  a.a = 2.0;
  Branch b = a;
  b.id = 1;
  b.lo = 0.5;
  b.hi = 1.0;
  b.b = -1.0;
  spec.branches = {a, b};
  std::vector<double> flat_samples;
  for (int i = 1; i <= 40; ++i) flat_samples.push_back(0.49 * i / 40.0);
  const auto flat = fit_nonflatness(make_map(spec), flat_samples);
  CHECK(flat.alpha == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(flat.h_const == doctest::Approx(2.0).epsilon(1e-9));

  CHECK(throws_kind(ErrorKind::empty_singular_set, [&] { fit_nonflatness(make_builtin("doubling"), flat_samples); }));
}

TEST_CASE("cusp map preserves normalised Lebesgue measure") {
  const auto cusp = make_builtin("cusp");
  std::mt19937_64 rng(2024);
  std::vector<double> image;
  image.reserve(1000000);
  while (image.size() < 1000000) {
    const double x = -1.0 + 2.0 * unit_uniform(rng);
    if (cusp.singular_distance(x) <= cusp.guard()) continue;
    image.push_back(cusp.eval(x));
  }
  std::sort(image.begin(), image.end());
  double ks = 0.0;
  const double n = static_cast<double>(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double cdf = (image[i] + 1.0) / 2.0;
    ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
  }
  CHECK(ks < 0.005);
}
