#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "replab/recurrence.hpp"

using namespace replab;

TEST_CASE("empty singular set never violates") {
  for (const char* name : {"doubling", "tripling", "tent"}) {
    const auto map = make_builtin(name);
    const Orbit o = typical_orbit(map, 20000, 4);
    for (std::size_t end : {500u, 5000u, 19000u}) {
      const auto prof = slow_recurrence_profile(map, backward_window(o, end, 400), 0.5);
      CHECK(prof.violations.empty());
      CHECK(prof.last_violation == 0);
    }
    const auto tail = tail_sum_estimate(map, o, 0.5, 20);
    for (double t : tail.tail_sums) CHECK(t == 0.0);
    CHECK(tail.total == 0.0);
  }
}

TEST_CASE("hand-placed cusp violation") {
  const auto cusp = make_builtin("cusp");
  BackwardOrbit bw;
  // x_{-3} = 0.1 sits inside B(0, e^{-1.5}).
  bw.points = {0.1, 0.9, 0.9, 0.9};
  const auto prof = slow_recurrence_profile(cusp, bw, 0.5);
  REQUIRE(prof.violations.size() == 1);
  CHECK(prof.violations[0] == 3);
  CHECK(prof.last_violation == 3);
  CHECK(prof.thresholds[2] == doctest::Approx(std::exp(-1.5)));
}

TEST_CASE("violations shrink as delta grows") {
  const auto cusp = make_builtin("cusp");
  const Orbit o = typical_orbit(cusp, 50000, 8);
  for (std::size_t end : {1000u, 20000u, 40000u}) {
    const auto bw = backward_window(o, end, 500);
    const auto lo = slow_recurrence_profile(cusp, bw, 0.05);
    const auto hi = slow_recurrence_profile(cusp, bw, 0.5);
    for (auto k : hi.violations)
      CHECK(std::find(lo.violations.begin(), lo.violations.end(), k) != lo.violations.end());
    CHECK(std::is_sorted(lo.violations.begin(), lo.violations.end()));
  }
}

TEST_CASE("tail sums match the geometric series") {
  const auto cusp = make_builtin("cusp");
  const Orbit o = typical_orbit(cusp, 1000000, 17);
  const double delta = 1.0;
  const auto tail = tail_sum_estimate(cusp, o, delta, 30);
  // mu = Leb/2 on [-1,1] gives mu(B(0,r)) = r.
  for (std::size_t n = 1; n <= 5; ++n) {
    const double oracle = std::exp(-static_cast<double>(n) * delta);
    CHECK(std::abs(tail.tail_sums[n - 1] - oracle) < 0.1 * oracle);
  }
  const double oracle_total = 1.0 / (std::exp(delta) - 1.0);
  CHECK(std::abs(tail.total - oracle_total) < 0.1 * oracle_total);
  for (std::size_t n = 1; n < tail.tail_sums.size(); ++n) CHECK(tail.tail_sums[n] <= tail.tail_sums[n - 1]);
  CHECK(tail.total <= tail.integral_bound * 1.1);

  const auto gauss = make_builtin("gauss");
  const auto gt = tail_sum_estimate(gauss, typical_orbit(gauss, 1000000, 17), delta, 30);
  const double g_oracle = std::log1p(std::exp(-delta)) / std::log(2.0);
  CHECK(std::abs(gt.tail_sums[0] - g_oracle) < 0.1 * g_oracle);
}

TEST_CASE("Gauss windows at delta = chi have bounded last violation") {
  const auto gauss = make_builtin("gauss");
  const Orbit o = typical_orbit(gauss, 200000, 21);
  const double chi = 2.3731;
  std::vector<std::size_t> last;
  for (std::size_t w = 0; w < 100; ++w) {
    const auto prof = slow_recurrence_profile(gauss, backward_window(o, 10000 + w * 1500, 10000), chi);
    // Independent rescan of the same window.
    std::size_t manual = 0;
    const auto bw = backward_window(o, 10000 + w * 1500, 10000);
    for (std::size_t k = 1; k <= bw.depth(); ++k)
      if (gauss.singular_distance(bw.at(k)) < std::exp(-static_cast<double>(k) * chi)) manual = k;
    CHECK(prof.last_violation == manual);
    last.push_back(prof.last_violation);
  }
  std::sort(last.begin(), last.end());
  CHECK(last[50] < 20);
}
