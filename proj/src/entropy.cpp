#include "replab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "replab/error.hpp"

namespace replab {

namespace {

// Grid of width >= eps over the domain, so points closer than eps sit in
// the same or adjacent cells (wrapping on the circle).
struct CellGrid {
  double lo;
  double width;
  std::int64_t count;
  bool wrap;

  CellGrid(const MapSystem& map, double eps)
      : lo(map.lo()),
        count(std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(map.diameter() / eps)))),
        wrap(map.is_circle()) {
    width = map.diameter() / static_cast<double>(count);
  }

  std::int64_t cell(double x) const {
    return std::clamp(static_cast<std::int64_t>(std::floor((x - lo) / width)), std::int64_t{0}, count - 1);
  }

  std::vector<std::int64_t> neighbours(std::int64_t c) const {
    std::vector<std::int64_t> out;
    for (std::int64_t d = -1; d <= 1; ++d) {
      std::int64_t v = c + d;
      if (wrap)
        v = (v % count + count) % count;
      else if (v < 0 || v >= count)
        continue;
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
  }
};

// Bowen distance between table rows, stopping once it reaches `cutoff`.
double row_distance(const MapSystem& map, std::span<const double> a, std::span<const double> b, std::size_t n,
                    double cutoff) {
  double best = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    best = std::max(best, map.distance(a[k], b[k]));
    if (best >= cutoff) break;
  }
  return best;
}

SeparatedSet greedy_on_table(const MapSystem& map, std::span<const double> pool, const OrbitTable& table,
                             std::size_t n, double eps) {
  SeparatedSet set;
  set.n = n;
  set.eps_tilde = eps;
  set.source_pool_size = pool.size();
  const CellGrid grid(map, eps);
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  // Keyed on (x, f^{mid} x, f^{n-1} x); a clash needs adjacent cells in all three.
  const std::size_t mid = (n - 1) / 2;
  auto key = [&](std::int64_t a, std::int64_t b, std::int64_t c) { return (a * grid.count + b) * grid.count + c; };

  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!table.valid[i]) {
      ++set.dropped;
      continue;
    }
    const auto row = table.row(i);
    const std::int64_t c0 = grid.cell(row[0]);
    const std::int64_t c1 = grid.cell(row[mid]);
    const std::int64_t c2 = grid.cell(row[n - 1]);
    const auto n0 = grid.neighbours(c0);
    const auto n1 = grid.neighbours(c1);
    const auto n2 = grid.neighbours(c2);
    bool clash = false;
    for (std::int64_t a : n0) {
      for (std::int64_t b : n1) {
        for (std::int64_t c : n2) {
          auto it = buckets.find(key(a, b, c));
          if (it == buckets.end()) continue;
          for (std::size_t member : it->second) {
            if (row_distance(map, row, table.row(member), n, eps) < eps) {
              clash = true;
              break;
            }
          }
          if (clash) break;
        }
        if (clash) break;
      }
      if (clash) break;
    }
    if (clash) continue;
    buckets[key(c0, c1, c2)].push_back(i);
    set.points.push_back(pool[i]);
    set.pool_indices.push_back(i);
  }
  return set;
}

}  // namespace

double bowen_distance(const MapSystem& map, double x, double y, std::size_t n) {
  if (n < 1) throw Error(ErrorKind::bad_parameter, "Bowen distance needs n >= 1");
  double best = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    best = std::max(best, map.distance(x, y));
    if (k + 1 < n) {
      x = map.eval(x);
      y = map.eval(y);
    }
  }
  return best;
}

SeparatedSet greedy_separated(const MapSystem& map, std::span<const double> pool, std::size_t n, double eps_tilde,
                              Execution mode) {
  if (n < 1) throw Error(ErrorKind::bad_parameter, "n must be >= 1");
  if (!(eps_tilde > 0.0)) throw Error(ErrorKind::bad_parameter, "eps_tilde must be positive");
  const OrbitTable table = forward_table(map, pool, n, mode);
  return greedy_on_table(map, pool, table, n, eps_tilde);
}

SeparatedSet greedy_separated_reference(const MapSystem& map, std::span<const double> pool, std::size_t n,
                                        double eps_tilde) {
  if (n < 1) throw Error(ErrorKind::bad_parameter, "n must be >= 1");
  if (!(eps_tilde > 0.0)) throw Error(ErrorKind::bad_parameter, "eps_tilde must be positive");
  SeparatedSet set;
  set.n = n;
  set.eps_tilde = eps_tilde;
  set.source_pool_size = pool.size();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    bool clash = false;
    try {
      bowen_distance(map, pool[i], pool[i], n);  // orbit must be guard-clean
      for (double member : set.points) {
        if (bowen_distance(map, pool[i], member, n) < eps_tilde) {
          clash = true;
          break;
        }
      }
    } catch (const Error&) {
      ++set.dropped;
      continue;
    }
    if (clash) continue;
    set.points.push_back(pool[i]);
    set.pool_indices.push_back(i);
  }
  return set;
}

SeparationCertificate certify_separated(const MapSystem& map, const SeparatedSet& set, std::span<const double> pool,
                                        Execution mode) {
  SeparationCertificate cert;
  const std::size_t m = set.points.size();
  std::vector<double> row_min(m, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> row_bad(m, 0);
  for_each_index(m, mode, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = bowen_distance(map, set.points[i], set.points[j], set.n);
      row_min[i] = std::min(row_min[i], d);
      if (d < set.eps_tilde) ++row_bad[i];
    }
  });
  cert.min_pair_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    cert.min_pair_distance = std::min(cert.min_pair_distance, row_min[i]);
    cert.pair_violations += row_bad[i];
  }
  cert.separated = cert.pair_violations == 0;

  std::vector<std::uint8_t> covered(pool.size(), 1);
  for_each_index(pool.size(), mode, [&](std::size_t p) {
    try {
      bowen_distance(map, pool[p], pool[p], set.n);
    } catch (const Error&) {
      return;  // dropped by the greedy pass, not part of the covering claim
    }
    for (double member : set.points)
      if (bowen_distance(map, pool[p], member, set.n) < set.eps_tilde) return;
    covered[p] = 0;
  });
  for (auto c : covered) cert.uncovered += c ? 0 : 1;
  cert.spanning = cert.uncovered == 0;
  return cert;
}

EntropyEstimate katok_entropy(const MapSystem& map, std::span<const double> pool, double delta,
                              std::span<const std::size_t> n_grid, std::span<const double> eps_grid, Execution mode) {
  if (n_grid.empty() || eps_grid.empty()) throw Error(ErrorKind::bad_parameter, "entropy grids must be nonempty");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::bad_parameter, "delta must lie in (0,1)");
  std::vector<std::size_t> ns(n_grid.begin(), n_grid.end());
  std::vector<double> epss(eps_grid.begin(), eps_grid.end());
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::sort(epss.begin(), epss.end());
  epss.erase(std::unique(epss.begin(), epss.end()), epss.end());
  if (ns.front() < 1) throw Error(ErrorKind::bad_parameter, "n grid entries must be >= 1");
  if (!(epss.front() > 0.0)) throw Error(ErrorKind::bad_parameter, "eps grid entries must be positive");

  const OrbitTable table = forward_table(map, pool, ns.back(), mode);
  std::size_t usable_pool = 0;
  for (auto v : table.valid) usable_pool += v;

  EntropyEstimate est;
  est.delta = delta;
  est.pool_size = usable_pool;
  // Cells are independent; each writes its own slot.
  est.grid.resize(epss.size() * ns.size());
  for_each_index(est.grid.size(), mode, [&](std::size_t idx) {
    EntropyCell& cell = est.grid[idx];
    cell.eps_tilde = epss[idx / ns.size()];
    cell.n = ns[idx % ns.size()];
    cell.card = greedy_on_table(map, pool, table, cell.n, cell.eps_tilde).points.size();
  });
  for (std::size_t e = 0; e < epss.size(); ++e) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      EntropyCell& cell = est.grid[e * ns.size() + j];
      cell.rate = cell.card > 0 ? std::log(static_cast<double>(cell.card)) / static_cast<double>(cell.n) : 0.0;
      cell.saturated = usable_pool < kPoolPerPoint * cell.card;
      cell.increment = std::numeric_limits<double>::quiet_NaN();
      if (j > 0 && ns[j - 1] + 1 == cell.n && cell.card > 0) {
        const auto& prev = est.grid[e * ns.size() + j - 1];
        if (prev.card > 0)
          cell.increment = std::log(static_cast<double>(cell.card)) - std::log(static_cast<double>(prev.card));
      }
      if (j > 0 && cell.card < est.grid[e * ns.size() + j - 1].card) ++est.n_monotonicity_violations;
      if (e > 0 && est.grid[(e - 1) * ns.size() + j].card < cell.card) ++est.eps_monotonicity_violations;
    }
  }

  // Plateau readout: at each eps take the largest unsaturated n whose
  // increment and the one before it are both available.
  struct Candidate {
    std::size_t e, j;
    bool flat;
  };
  std::vector<Candidate> candidates;
  for (std::size_t e = 0; e < epss.size(); ++e) {
    for (std::size_t j = ns.size(); j-- > 1;) {
      const auto& c = est.grid[e * ns.size() + j];
      const auto& p = est.grid[e * ns.size() + j - 1];
      if (c.saturated || std::isnan(c.increment) || std::isnan(p.increment)) continue;
      candidates.push_back({e, j, std::abs(c.increment - p.increment) < kPlateauTolerance});
      break;
    }
  }
  if (candidates.empty())
    throw Error(ErrorKind::pool_too_small,
                fmt::format("pool of {} points leaves no unsaturated pair of increments", usable_pool));
  auto chosen = std::find_if(candidates.begin(), candidates.end(), [](const Candidate& c) { return c.flat; });
  if (chosen == candidates.end()) chosen = candidates.begin();
  const auto& c = est.grid[chosen->e * ns.size() + chosen->j];
  const auto& p = est.grid[chosen->e * ns.size() + chosen->j - 1];
  est.h = std::max(0.0, 0.5 * (c.increment + p.increment));
  est.chosen_n = c.n;
  est.chosen_eps = c.eps_tilde;
  est.flat = chosen->flat;
  return est;
}

}  // namespace replab
