#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "replab/entropy.hpp"
#include "replab/maps.hpp"

namespace oracle {

// Exact maximum independent set of the Bowen conflict graph on a pool sorted
// around the circle (or along the interval). The conflict neighbourhood of
// every point must be a contiguous run of indices around it, which makes the
// graph a proper circular-arc graph; nullopt if that structure is absent.
// Then fixing the first chosen vertex and sweeping greedily is exact.
inline std::optional<std::size_t> max_separated(const replab::MapSystem& map, const std::vector<double>& sorted_pool,
                                                std::size_t n, double eps) {
  const std::size_t N = sorted_pool.size();
  std::vector<std::vector<std::uint8_t>> adj(N, std::vector<std::uint8_t>(N, 0));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      adj[i][j] = adj[j][i] = replab::bowen_distance(map, sorted_pool[i], sorted_pool[j], n) < eps;

  for (std::size_t i = 0; i < N; ++i) {
    // Walk forward and backward from i; neighbours must come first.
    std::size_t fwd = 0, back = 0;
    while (fwd + 1 < N && adj[i][(i + fwd + 1) % N]) ++fwd;
    while (back + 1 < N && adj[i][(i + N - back - 1) % N]) ++back;
    std::size_t degree = 0;
    for (std::size_t j = 0; j < N; ++j) degree += adj[i][j];
    if (fwd + back < degree && fwd + 1 < N) return std::nullopt;
  }

  std::size_t best = 0;
  for (std::size_t s = 0; s < N; ++s) {
    std::size_t count = 1, last = s;
    for (std::size_t step = 1; step < N; ++step) {
      const std::size_t j = (s + step) % N;
      if (!adj[last][j] && !adj[j][s]) {
        ++count;
        last = j;
      }
    }
    best = std::max(best, count);
  }
  return best;
}

// Fixed point of the composed doubling inverse branches y -> (y + e)/2 with
// digits e applied in order: p = sum_i e_i 2^{i-1} / (2^L - 1).
inline double doubling_periodic_point(const std::vector<int>& digits_in_application_order) {
  const std::size_t L = digits_in_application_order.size();
  std::int64_t num = 0;
  for (std::size_t i = 0; i < L; ++i) num += static_cast<std::int64_t>(digits_in_application_order[i]) << i;
  const std::int64_t den = (std::int64_t{1} << L) - 1;
  const double p = static_cast<double>(num) / static_cast<double>(den);
  return p >= 1.0 ? p - 1.0 : p;
}

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Integral of g against the Gauss density 1/((1+x) ln 2), x = e^{-t}.
template <class G>
double gauss_expectation(G g) {
  auto integrand = [&](double t) {
    const double x = std::exp(-t);
    return g(x) * x / ((1.0 + x) * std::numbers::ln2);
  };
  return simpson(integrand, 0.0, 60.0, 200000);
}

}  // namespace oracle
