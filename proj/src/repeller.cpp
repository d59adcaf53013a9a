#include "replab/repeller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "replab/error.hpp"
#include "replab/numeric.hpp"
#include "replab/recurrence.hpp"

namespace replab {

namespace {

constexpr double kRelSlack = 1e-12;
constexpr double kSweepTolerance = 1e-13;
constexpr double kResidualTolerance = 1e-9;
constexpr int kMaxSweeps = 1000;

const Branch& branch_by_id(const MapSystem& map, int id) {
  for (const auto& br : map.branches())
    if (br.id == id) return br;
  throw Error(ErrorKind::bad_parameter, fmt::format("map {} has no branch with id {}", map.name(), id));
}

// Lower end of the (1 - q) tail: value at rank floor(q (count - 1)).
double lower_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  return values[std::min(idx, values.size() - 1)];
}

struct BaseBall {
  double lo;
  double hi;
};

BaseBall base_ball(const MapSystem& map, double center, double radius) {
  if (map.is_circle()) return {center - radius, center + radius};
  return {std::max(map.lo(), center - radius), std::min(map.hi(), center + radius)};
}

// Expresses x in the lift of the circle closest to `ref`.
double lift_near(const MapSystem& map, double ref, double x) {
  return map.is_circle() ? ref + map.displacement(ref, x) : x;
}

struct TracedBranch {
  IfsBranch branch;
  bool escaped = false;
};

// Pulls nine samples of the base ball back along the anchor's orbit.
TracedBranch trace_branch(const RepellerIFS& ifs, double anchor) {
  const MapSystem& map = *ifs.map;
  TracedBranch out;
  IfsBranch& br = out.branch;
  br.anchor = anchor;
  br.anchor_orbit.push_back(anchor);
  try {
    for (std::size_t t = 0; t < ifs.m; ++t) {
      br.ids.push_back(map.branch_at(br.anchor_orbit.back()).id);
      br.anchor_orbit.push_back(map.eval(br.anchor_orbit.back()));
    }
  } catch (const Error&) {
    out.escaped = true;
    return out;
  }
  const BaseBall ball = base_ball(map, ifs.base_center, ifs.base_radius);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  constexpr int samples = 9;
  for (int s = 0; s < samples; ++s) {
    double y = ball.lo + (ball.hi - ball.lo) * s / (samples - 1);
    y = map.reduce(y);
    double deriv = 1.0;
    for (std::size_t t = ifs.m; t-- > 0;) {
      auto v = map.pullback(y, br.anchor_orbit[t]);
      if (!v) {
        out.escaped = true;
        return out;
      }
      y = *v;
      try {
        deriv /= std::abs(map.derivative(y));
      } catch (const Error&) {
        out.escaped = true;
        return out;
      }
    }
    const double lifted = lift_near(map, anchor, y);
    lo = std::min(lo, lifted);
    hi = std::max(hi, lifted);
    br.lipschitz = std::max(br.lipschitz, deriv);
  }
  // Move into the lift next to the base center.
  const double shift = lift_near(map, ifs.base_center, anchor) - anchor;
  br.u_lo = lo + shift;
  br.u_hi = hi + shift;
  return out;
}

// Image of the base ball under an id word on a map with onto branches.
IfsBranch trace_full_shift(const MapSystem& map, std::vector<int> ids) {
  IfsBranch br;
  br.ids = std::move(ids);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  constexpr int samples = 9;
  for (int s = 0; s < samples; ++s) {
    double y = map.lo() + map.diameter() * s / (samples - 1);
    double deriv = 1.0;
    for (std::size_t t = br.ids.size(); t-- > 0;) {
      const Branch& b = branch_by_id(map, br.ids[t]);
      y = std::clamp(b.preimage(y), b.lo, b.hi);
      deriv /= std::abs(b.slope(y));
    }
    lo = std::min(lo, y);
    hi = std::max(hi, y);
    br.lipschitz = std::max(br.lipschitz, deriv);
  }
  br.u_lo = lo;
  br.u_hi = hi;
  br.anchor = 0.5 * (lo + hi);
  return br;
}

}  // namespace

// ---------------------------------------------------------------- good set

std::vector<double> GoodSet::xs() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.x);
  return out;
}

GoodSet evaluate_good_set(const MapSystem& map, const Orbit& orbit, double chi, double eps, double delta,
                          const GoodSetOptions& options) {
  require_epsilon_range(chi, eps);
  if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorKind::bad_parameter, "delta must lie in (0, 1/2)");
  if (options.n < 1 || options.depth < 2 || options.windows < 1 || options.birkhoff_horizon < 1)
    throw Error(ErrorKind::bad_parameter, "n, depth, windows and horizon must be positive (depth >= 2)");
  if (!(options.rho_quantile >= 0.0 && options.rho_quantile < 1.0))
    throw Error(ErrorKind::bad_parameter, "rho_quantile must lie in [0, 1)");
  const std::size_t horizon = options.birkhoff_horizon;
  if (orbit.size() < options.depth + horizon + options.windows)
    throw Error(ErrorKind::bad_parameter, fmt::format("orbit of length {} cannot supply {} windows of depth {}",
                                                      orbit.size(), options.windows, options.depth));
  const std::size_t first = options.depth;
  const std::size_t last = orbit.size() - horizon;  // forward segment x_end .. x_{end+horizon-1}
  const std::size_t stride = options.windows > 1 ? (last - first - 1) / (options.windows - 1) : 0;

  std::vector<double> means = options.potential_means;
  if (means.empty())
    for (const auto& phi : options.potentials) means.push_back(birkhoff_average(map, orbit, phi));
  if (means.size() != options.potentials.size())
    throw Error(ErrorKind::bad_parameter, "one mean per potential is required");
  const double rec_delta = options.recurrence_delta > 0.0 ? options.recurrence_delta : chi;

  GoodSet good;
  good.delta = delta;
  good.chi = chi;
  good.eps = eps;
  good.n = options.n;
  good.candidates = options.windows;
  good.windows.resize(options.windows);

  for_each_index(options.windows, options.mode, [&](std::size_t w) {
    WindowRecord& rec = good.windows[w];
    const std::size_t end = first + w * stride;
    rec.orbit_index = end;
    rec.x = orbit[end];
    const BackwardOrbit bw = backward_window(orbit, end, options.depth);
    try {
      rec.profile = contraction_radius(map, bw, chi, eps, options.tempering);
      rec.tempering_ok = true;
    } catch (const Error& e) {
      rec.reject_reason = std::string(to_string(e.kind()));
    }
    rec.last_violation = slow_recurrence_profile(map, bw, rec_delta).last_violation;
    rec.recurrence_ok = rec.last_violation < options.n;
    for (std::size_t p = 0; p < options.potentials.size(); ++p) {
      CompensatedSum sum;
      for (std::size_t k = 1; k <= horizon; ++k) {
        sum.add(options.potentials[p](map, orbit[end + k - 1]));
        if (std::abs(sum.value() / static_cast<double>(k) - means[p]) > eps) rec.last_bad_k = std::max(rec.last_bad_k, k);
      }
    }
  });

  // Lambda_2 is fixed by (eps, delta): n2 is the smallest onset after which
  // a (1 - delta) share of windows keeps every tested average within eps.
  std::vector<std::size_t> onsets;
  for (const auto& rec : good.windows) onsets.push_back(rec.last_bad_k);
  std::sort(onsets.begin(), onsets.end());
  const auto rank = static_cast<std::size_t>(std::ceil((1.0 - delta) * static_cast<double>(onsets.size()))) - 1;
  good.n2 = onsets[std::min(rank, onsets.size() - 1)] + 1;
  for (auto& rec : good.windows) rec.birkhoff_ok = rec.last_bad_k < good.n2;

  std::size_t tempering_ok = 0, recurrence_ok = 0, birkhoff_ok = 0;
  std::vector<double> accepted_rho;
  for (auto& rec : good.windows) {
    tempering_ok += rec.tempering_ok;
    recurrence_ok += rec.recurrence_ok;
    birkhoff_ok += rec.birkhoff_ok;
    if (rec.tempering_ok && rec.recurrence_ok && rec.birkhoff_ok) accepted_rho.push_back(rec.profile.rho);
    else if (rec.reject_reason.empty()) rec.reject_reason = !rec.tempering_ok ? "tempering" : !rec.recurrence_ok ? "recurrence" : "birkhoff";
  }
  const double threshold = accepted_rho.empty() ? 0.0 : lower_quantile(accepted_rho, options.rho_quantile);
  good.rho = std::numeric_limits<double>::infinity();
  for (auto& rec : good.windows) {
    if (!rec.reject_reason.empty()) continue;
    if (rec.profile.rho < threshold) {
      rec.reject_reason = "rho_quantile";
      continue;
    }
    rec.retained = true;
    good.points.push_back({rec.x, rec.orbit_index, rec.profile.rho, rec.last_violation});
    good.rho = std::min(good.rho, rec.profile.rho);
  }
  if (good.points.empty()) good.rho = 0.0;
  const double total = static_cast<double>(options.windows);
  good.acceptance_rate = static_cast<double>(good.points.size()) / total;
  good.tempering_acceptance = static_cast<double>(tempering_ok) / total;
  good.recurrence_acceptance = static_cast<double>(recurrence_ok) / total;
  good.birkhoff_acceptance = static_cast<double>(birkhoff_ok) / total;
  return good;
}

GoodSet select_good_set(const MapSystem& map, const Orbit& orbit, double chi, double eps, double delta,
                        const GoodSetOptions& options) {
  GoodSet good = evaluate_good_set(map, orbit, chi, eps, delta, options);
  if (good.points.empty() || good.acceptance_rate < 1.0 - 2.0 * delta)
    throw Error(ErrorKind::good_set_too_thin,
                fmt::format("acceptance {:.4f} below 1 - 2 delta = {:.4f} (tempering {:.4f}, recurrence {:.4f}, "
                            "birkhoff {:.4f}); raise eps or deepen windows",
                            good.acceptance_rate, 1.0 - 2.0 * delta, good.tempering_acceptance,
                            good.recurrence_acceptance, good.birkhoff_acceptance));
  return good;
}

// ---------------------------------------------------------------- classing

std::int64_t ReturnClassing::cell_of(double x, const MapSystem& map) const {
  const auto c = static_cast<std::int64_t>(std::floor((map.reduce(x) - map.lo()) / cell_width));
  return std::clamp(c, std::int64_t{0}, cell_count - 1);
}

ReturnClassing return_classing(const MapSystem& map, const GoodSet& good, std::size_t n, double eps, Execution mode) {
  require_epsilon_range(good.chi, eps);
  if (n < 1) throw Error(ErrorKind::bad_parameter, "n must be >= 1");
  if (!(good.rho > 0.0) && !good.points.empty()) throw Error(ErrorKind::bad_parameter, "good set has no radius");
  ReturnClassing rc;
  rc.n = n;
  rc.eps = eps;
  rc.chi = good.chi;
  rc.rho = good.rho;
  if (good.points.empty()) throw Error(ErrorKind::no_returns, "empty good set leaves E empty");
  const auto pool = good.xs();
  rc.e = greedy_separated(map, pool, n, good.rho / 2.0, mode);
  if (rc.e.points.empty()) throw Error(ErrorKind::no_returns, "separated set E is empty");

  rc.cell_count = static_cast<std::int64_t>(std::floor(map.diameter() / (good.rho / 4.0))) + 1;
  rc.cell_width = map.diameter() / static_cast<double>(rc.cell_count);

  // Cover centers: the first E point met in each nonempty cell.
  std::map<std::int64_t, double> first_in_cell;
  for (double x : rc.e.points) first_in_cell.emplace(rc.cell_of(x, map), x);
  for (const auto& [cell, x] : first_in_cell) {
    rc.cover_cells.push_back(cell);
    rc.cover_centers.push_back(x);
  }
  rc.j = rc.cover_centers.size();

  const double upper = static_cast<double>(n) * (1.0 + eps);
  const auto k_max = static_cast<std::size_t>(std::ceil(upper - 1e-9)) - 1;
  const std::size_t k_last = std::max(k_max, n);
  const OrbitTable table = forward_table(map, rc.e.points, k_last + 1, mode);
  rc.return_time.assign(rc.e.points.size(), 0);
  for (std::size_t i = 0; i < rc.e.points.size(); ++i) {
    if (!table.valid[i]) {
      ++rc.dropped;
      continue;
    }
    const auto row = table.row(i);
    const std::int64_t home = rc.cell_of(row[0], map);
    for (std::size_t k = n; k <= k_last; ++k) {
      if (rc.cell_of(row[k], map) == home) {
        rc.return_time[i] = k;
        rc.classes[k].push_back(i);
        break;
      }
    }
    if (rc.return_time[i] == 0) ++rc.dropped;
  }
  if (rc.classes.empty()) throw Error(ErrorKind::no_returns, fmt::format("no E point returns to its cell for k in [{}, {}]", n, k_last));

  std::size_t best = 0;
  for (const auto& [k, members] : rc.classes)
    if (members.size() > best) {
      best = members.size();
      rc.chosen_m = k;
    }
  const auto& f_m = rc.classes.at(rc.chosen_m);
  std::map<std::int64_t, std::size_t> per_cell;
  for (std::size_t idx : f_m) ++per_cell[rc.cell_of(rc.e.points[idx], map)];
  std::size_t best_cell = 0;
  for (const auto& [cell, count] : per_cell)
    if (count > best_cell) {
      best_cell = count;
      rc.chosen_cell = cell;
    }
  for (std::size_t idx : f_m)
    if (rc.cell_of(rc.e.points[idx], map) == rc.chosen_cell) rc.f_m_cell.push_back(idx);
  rc.base_center = first_in_cell.at(rc.chosen_cell);

  CountingChain& ch = rc.chain;
  ch.card_e = rc.e.points.size();
  for (const auto& [k, members] : rc.classes) ch.card_e_returning += members.size();
  ch.card_f_m = f_m.size();
  ch.card_f_m_cell = rc.f_m_cell.size();
  ch.return_slots = k_last - n + 1;
  ch.literal_bound = static_cast<double>(ch.card_e) / (eps * static_cast<double>(n));
  ch.pigeonhole_bound = static_cast<double>(ch.card_e_returning) / static_cast<double>(ch.return_slots);
  ch.cell_bound = static_cast<double>(ch.card_f_m) / static_cast<double>(rc.j);
  ch.literal_holds = static_cast<double>(ch.card_f_m) >= ch.literal_bound;
  ch.pigeonhole_holds = static_cast<double>(ch.card_f_m) >= ch.pigeonhole_bound;
  ch.cell_holds = static_cast<double>(ch.card_f_m_cell) >= ch.cell_bound;

  Thresholds& th = rc.thresholds;
  th.n1 = std::log(static_cast<double>(rc.j)) / eps;
  th.n2 = good.n2;
  th.n3 = std::log(4.0) / (good.chi - 2.0 * eps);
  th.n1_ok = static_cast<double>(n) >= th.n1;
  th.n2_ok = n >= th.n2;
  th.n3_ok = static_cast<double>(n) >= th.n3;
  return rc;
}

// ---------------------------------------------------------------- IFS

std::optional<double> RepellerIFS::apply(std::size_t branch, double y, std::vector<double>* trail) const {
  const IfsBranch& br = branches.at(branch);
  const MapSystem& f = *map;
  // Full-shift branches work on the closed domain: on the circle the lift
  // y = hi must stay distinct from lo or fixed points at the seam oscillate.
  y = br.anchor_orbit.empty() ? std::clamp(y, f.lo(), f.hi()) : f.reduce(y);
  for (std::size_t t = m; t-- > 0;) {
    if (br.anchor_orbit.empty()) {
      const Branch& b = branch_by_id(f, br.ids[t]);
      y = std::clamp(b.preimage(y), b.lo, b.hi);
    } else {
      auto v = f.pullback(y, br.anchor_orbit[t]);
      if (!v) return std::nullopt;
      y = *v;
    }
    if (trail) trail->push_back(y);
  }
  return y;
}

RepellerIFS build_ifs(const MapSystem& map, const ReturnClassing& classing, double chi, double eps, Execution mode) {
  require_epsilon_range(chi, eps);
  if (classing.f_m_cell.empty()) throw Error(ErrorKind::bad_parameter, "classing has no F_m points in the chosen cell");
  RepellerIFS ifs;
  ifs.map = std::make_shared<const MapSystem>(map);
  ifs.m = classing.chosen_m;
  ifs.base_center = classing.base_center;
  ifs.base_radius = classing.rho / 2.0;
  ifs.rho = classing.rho;
  ifs.chi = chi;
  ifs.eps = eps;
  ifs.contraction_bound = std::exp(-static_cast<double>(ifs.m) * (chi - 2.0 * eps));
  ifs.candidates = classing.f_m_cell.size();

  std::vector<TracedBranch> traced(classing.f_m_cell.size());
  for_each_index(traced.size(), mode,
                 [&](std::size_t i) { traced[i] = trace_branch(ifs, classing.e.points[classing.f_m_cell[i]]); });

  const BaseBall ball = base_ball(map, ifs.base_center, ifs.base_radius);
  const double tol = 1e-15 * map.diameter();
  for (auto& tb : traced) {
    const IfsBranch& br = tb.branch;
    if (tb.escaped) {
      ++ifs.rejected.escape;
      continue;
    }
    if (br.u_lo < ball.lo - tol || br.u_hi > ball.hi + tol) {
      ++ifs.rejected.containment;
      continue;
    }
    if (br.u_hi - br.u_lo > ifs.contraction_bound * ifs.rho * (1.0 + kRelSlack)) {
      ++ifs.rejected.diameter;
      continue;
    }
    if (br.lipschitz > ifs.contraction_bound * (1.0 + kRelSlack)) {
      ++ifs.rejected.lipschitz;
      continue;
    }
    const bool overlaps = std::any_of(ifs.branches.begin(), ifs.branches.end(), [&](const IfsBranch& o) {
      return !(br.u_hi < o.u_lo || o.u_hi < br.u_lo);
    });
    if (overlaps) {
      ++ifs.rejected.overlap;
      continue;
    }
    ifs.branches.push_back(br);
  }
  if (ifs.branches.empty())
    throw Error(ErrorKind::all_branches_rejected,
                fmt::format("all {} candidate branches rejected (escape {}, containment {}, diameter {}, lipschitz {}, "
                            "overlap {})",
                            ifs.candidates, ifs.rejected.escape, ifs.rejected.containment, ifs.rejected.diameter,
                            ifs.rejected.lipschitz, ifs.rejected.overlap));
  return ifs;
}

void rebuild_branches(RepellerIFS& ifs) {
  for (auto& br : ifs.branches) {
    const std::vector<int> stored = br.ids;
    if (ifs.full_shift) {
      br = trace_full_shift(*ifs.map, stored);
      continue;
    }
    TracedBranch tb = trace_branch(ifs, br.anchor);
    if (tb.escaped || tb.branch.ids != stored)
      throw Error(ErrorKind::config, fmt::format("branch anchored at {} does not reproduce its stored ids", br.anchor));
    br = tb.branch;
  }
}

RepellerIFS full_shift_ifs(const MapSystem& map, std::size_t m, double chi, double eps) {
  if (m < 1) throw Error(ErrorKind::bad_parameter, "m must be >= 1");
  const double tol = 1e-12 * map.diameter();
  for (const auto& br : map.branches())
    if (std::abs(br.image_min() - map.lo()) > tol || std::abs(br.image_max() - map.hi()) > tol)
      throw Error(ErrorKind::bad_parameter, fmt::format("branch {} of {} is not onto", br.id, map.name()));
  const std::size_t alphabet = map.branches().size();
  if (std::pow(static_cast<double>(alphabet), static_cast<double>(m)) > 1e6)
    throw Error(ErrorKind::cap_exceeded, "full shift has more than 1e6 words");
  RepellerIFS ifs;
  ifs.map = std::make_shared<const MapSystem>(map);
  ifs.m = m;
  ifs.base_center = 0.5 * (map.lo() + map.hi());
  ifs.base_radius = 0.5 * map.diameter();
  ifs.rho = map.diameter();
  ifs.chi = chi;
  ifs.eps = eps;
  ifs.full_shift = true;
  std::vector<std::size_t> digits(m, 0);
  while (true) {
    std::vector<int> ids;
    for (std::size_t d : digits) ids.push_back(map.branches()[d].id);
    ifs.branches.push_back(trace_full_shift(map, ids));
    std::size_t pos = m;
    while (pos-- > 0) {
      if (++digits[pos] < alphabet) break;
      digits[pos] = 0;
    }
    if (pos == static_cast<std::size_t>(-1)) break;
  }
  ifs.candidates = ifs.branches.size();
  ifs.contraction_bound = 0.0;
  for (const auto& br : ifs.branches) ifs.contraction_bound = std::max(ifs.contraction_bound, br.lipschitz);
  return ifs;
}

// ---------------------------------------------------------------- periodic points

PeriodicOrbit periodic_orbit(const RepellerIFS& ifs, const std::vector<std::size_t>& word) {
  if (word.empty()) throw Error(ErrorKind::bad_parameter, "word must have length >= 1");
  for (std::size_t w : word)
    if (w >= ifs.branches.size()) throw Error(ErrorKind::bad_parameter, fmt::format("branch index {} out of range", w));
  const MapSystem& map = *ifs.map;
  PeriodicOrbit out;
  std::vector<double> trail;
  trail.reserve(word.size() * ifs.m);
  double p = map.reduce(ifs.base_center);
  bool converged = false;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    trail.clear();
    double y = p;
    for (std::size_t w : word) {
      auto v = ifs.apply(w, y, &trail);
      if (!v) throw Error(ErrorKind::no_convergence, "backward sweep left a branch image");
      y = *v;
    }
    const double change = map.distance(y, p);
    p = y;
    out.sweeps = sweep;
    if (change < kSweepTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorKind::no_convergence, fmt::format("no fixed point after {} sweeps", kMaxSweeps));
  out.p = map.reduce(p);
  out.cycle.assign(trail.rbegin(), trail.rend());
  for (double& x : out.cycle) x = map.reduce(x);
  const std::size_t len = out.cycle.size();
  for (std::size_t t = 0; t < len; ++t) {
    const double next = t + 1 < len ? out.cycle[t + 1] : out.p;
    out.residual = std::max(out.residual, map.distance(map.eval(out.cycle[t]), next));
    out.log_derivative += std::log(std::abs(map.derivative(out.cycle[t])));
  }
  if (!(out.residual < kResidualTolerance))
    throw Error(ErrorKind::no_convergence, fmt::format("cycle residual {} exceeds {}", out.residual, kResidualTolerance));
  return out;
}

double periodic_point(const RepellerIFS& ifs, const std::vector<std::size_t>& word) {
  return periodic_orbit(ifs, word).p;
}

double repeller_entropy(const RepellerIFS& ifs) {
  if (ifs.branches.empty() || ifs.m == 0) throw Error(ErrorKind::bad_parameter, "IFS has no branches");
  return std::log(static_cast<double>(ifs.branches.size())) / static_cast<double>(ifs.m);
}

std::vector<std::vector<std::size_t>> enumerate_words(std::size_t alphabet, std::size_t k, const PressureOptions& options,
                                                      bool* subsampled, double* total) {
  if (alphabet < 1 || k < 1) throw Error(ErrorKind::bad_parameter, "alphabet and word length must be >= 1");
  const double count = std::pow(static_cast<double>(alphabet), static_cast<double>(k));
  if (total) *total = count;
  std::vector<std::vector<std::size_t>> words;
  if (count <= options.cap) {
    if (subsampled) *subsampled = false;
    std::vector<std::size_t> digits(k, 0);
    while (true) {
      words.push_back(digits);
      std::size_t pos = k;
      while (pos-- > 0) {
        if (++digits[pos] < alphabet) break;
        digits[pos] = 0;
      }
      if (pos == static_cast<std::size_t>(-1)) break;
    }
    return words;
  }
  if (!options.subsample)
    throw Error(ErrorKind::cap_exceeded, fmt::format("{} words exceed the cap {}", count, options.cap));
  if (subsampled) *subsampled = true;
  std::mt19937_64 rng(options.seed ^ (0x5851f42d4c957f2dULL * (k + 1)));
  const auto draws = static_cast<std::size_t>(options.cap);
  words.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    std::vector<std::size_t> w(k);
    for (auto& d : w)
      d = std::min(alphabet - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(alphabet)));
    words.push_back(std::move(w));
  }
  return words;
}

namespace {

double birkhoff_sum(const RepellerIFS& ifs, const Potential& phi, const PeriodicOrbit& orbit) {
  CompensatedSum s;
  for (double q : orbit.cycle) s.add(phi(*ifs.map, q));
  return s.value();
}

// (1/(mk)) log of the (possibly subsample-scaled) sum of exp(S_{mk} phi).
double pressure_from_sums(const std::vector<double>& sums, double total_words, bool subsampled, double mk) {
  double lse = log_sum_exp(sums);
  if (subsampled) lse += std::log(total_words) - std::log(static_cast<double>(sums.size()));
  return lse / mk;
}

std::vector<PeriodicOrbit> solve_words(const RepellerIFS& ifs, const std::vector<std::vector<std::size_t>>& words,
                                       Execution mode) {
  std::vector<PeriodicOrbit> orbits(words.size());
  for_each_index(words.size(), mode, [&](std::size_t i) { orbits[i] = periodic_orbit(ifs, words[i]); });
  return orbits;
}

}  // namespace

PressureEstimate pressure_estimate(const RepellerIFS& ifs, const Potential& phi, std::size_t k,
                                   const PressureOptions& options) {
  if (ifs.branches.empty()) throw Error(ErrorKind::bad_parameter, "IFS has no branches");
  PressureEstimate est;
  const auto words = enumerate_words(ifs.branches.size(), k, options, &est.subsampled, &est.words_total);
  const auto orbits = solve_words(ifs, words, options.mode);
  std::vector<double> sums(orbits.size());
  for_each_index(orbits.size(), options.mode, [&](std::size_t i) { sums[i] = birkhoff_sum(ifs, phi, orbits[i]); });
  est.words_used = words.size();
  est.value = pressure_from_sums(sums, est.words_total, est.subsampled, static_cast<double>(ifs.m * k));
  return est;
}

double repeller_pressure(const RepellerIFS& ifs, const Potential& phi, std::size_t k, const PressureOptions& options) {
  return pressure_estimate(ifs, phi, k, options).value;
}

// ---------------------------------------------------------------- verification

VerificationReport verify_theorem(const RepellerIFS& ifs, double h_mu, double chi, const std::vector<Potential>& potentials,
                                  const std::vector<double>& means, double eps, const VerifyOptions& options) {
  if (!(eps > 0.0)) throw Error(ErrorKind::bad_parameter, "eps must be positive");
  if (means.size() != potentials.size()) throw Error(ErrorKind::bad_parameter, "one mean per potential is required");
  if (options.max_word_length < 1 || options.pressure_k < 1)
    throw Error(ErrorKind::bad_parameter, "word lengths must be >= 1");
  const MapSystem& map = *ifs.map;
  VerificationReport rep;
  rep.map_name = map.name();
  rep.m = ifs.m;
  rep.branch_count = ifs.branches.size();
  rep.chi = chi;
  rep.eps = eps;
  rep.rho = ifs.rho;
  rep.h_mu = h_mu;
  rep.h_repeller = repeller_entropy(ifs);
  rep.entropy_target = h_mu - 3.0 * eps;
  rep.entropy_margin = rep.h_repeller - rep.entropy_target;
  rep.pass_a = rep.entropy_margin >= 0.0;
  rep.entropy_nominal_pass = rep.h_repeller >= h_mu - eps;

  // Periodic points of every tested word length, solved once and shared.
  const std::size_t longest = std::max(options.max_word_length, options.pressure_k);
  std::vector<std::vector<PeriodicOrbit>> orbits(longest + 1);
  std::vector<std::vector<std::vector<std::size_t>>> words(longest + 1);
  std::vector<double> totals(longest + 1, 0.0);
  std::vector<bool> sub(longest + 1, false);
  for (std::size_t len = 1; len <= longest; ++len) {
    bool s = false;
    words[len] = enumerate_words(ifs.branches.size(), len, options.pressure, &s, &totals[len]);
    sub[len] = s;
    orbits[len].resize(words[len].size());
    std::vector<std::uint8_t> ok(words[len].size(), 1);
    for_each_index(words[len].size(), options.pressure.mode, [&](std::size_t i) {
      try {
        orbits[len][i] = periodic_orbit(ifs, words[len][i]);
      } catch (const Error&) {
        ok[i] = 0;
      }
    });
    // Failed solves stay in the list with NaN data so they fail every check.
    for (std::size_t i = 0; i < ok.size(); ++i)
      if (!ok[i]) {
        orbits[len][i].p = std::numeric_limits<double>::quiet_NaN();
        orbits[len][i].log_derivative = std::numeric_limits<double>::quiet_NaN();
        orbits[len][i].residual = std::numeric_limits<double>::infinity();
      }
  }

  // (d) and the expansion certificate over word lengths <= max_word_length.
  rep.min_periodic_lyapunov = std::numeric_limits<double>::infinity();
  rep.expansion_certificate = true;
  bool any_failed = false;
  for (std::size_t len = 1; len <= options.max_word_length; ++len) {
    rep.periodic_subsampled = rep.periodic_subsampled || sub[len];
    const double mk = static_cast<double>(ifs.m * len);
    for (const auto& po : orbits[len]) {
      ++rep.periodic_points;
      if (std::isnan(po.p)) {
        any_failed = true;
        continue;
      }
      rep.max_residual = std::max(rep.max_residual, po.residual);
      rep.min_periodic_lyapunov = std::min(rep.min_periodic_lyapunov, po.log_derivative / mk);
      if (po.log_derivative < mk * (chi - 2.0 * eps)) rep.expansion_certificate = false;
    }
  }
  if (any_failed) {
    rep.expansion_certificate = false;
    rep.min_periodic_lyapunov = std::numeric_limits<double>::quiet_NaN();
  }
  rep.lyapunov_target = chi - 2.0 * eps;
  rep.lyapunov_margin = rep.min_periodic_lyapunov - rep.lyapunov_target;
  rep.pass_d = !any_failed && rep.lyapunov_margin >= 0.0;
  rep.lyapunov_nominal_pass = !any_failed && rep.min_periodic_lyapunov >= chi - eps;

  // Conjugacy: distinct words of one length give distinct points, each in
  // the closure of the cylinder of its outermost branch.
  rep.conjugacy_consistent = !any_failed;
  const double tol = 1e-12 * map.diameter();
  for (std::size_t len = 1; len <= options.max_word_length && rep.conjugacy_consistent; ++len) {
    std::vector<double> ps;
    for (std::size_t i = 0; i < orbits[len].size(); ++i) {
      const auto& po = orbits[len][i];
      const IfsBranch& outer = ifs.branches[words[len][i].back()];
      const double lifted = lift_near(map, ifs.base_center, po.p);
      bool inside = false;
      for (double shift : {0.0, -1.0, 1.0}) {
        if (shift != 0.0 && !map.is_circle()) continue;
        inside = inside || (lifted + shift >= outer.u_lo - tol && lifted + shift <= outer.u_hi + tol);
      }
      if (!inside) rep.conjugacy_consistent = false;
      ps.push_back(po.p);
    }
    if (!sub[len]) {
      std::sort(ps.begin(), ps.end());
      for (std::size_t i = 1; i < ps.size(); ++i)
        if (!(ps[i] > ps[i - 1])) rep.conjugacy_consistent = false;
    }
  }

  rep.pass_b = rep.pass_c = true;
  rep.pressure_subsampled = sub[options.pressure_k];
  for (std::size_t i = 0; i < potentials.size(); ++i) {
    const Potential& phi = potentials[i];
    PotentialCheck pc;
    pc.name = phi.name();
    pc.mean = means[i];
    // (c)
    pc.deviation_budget = 2.0 * eps;
    for (std::size_t len = 1; len <= options.max_word_length; ++len) {
      std::vector<double> dev(orbits[len].size(), 0.0);
      for_each_index(orbits[len].size(), options.pressure.mode, [&](std::size_t w) {
        const auto& po = orbits[len][w];
        if (std::isnan(po.p)) {
          dev[w] = std::numeric_limits<double>::infinity();
          return;
        }
        dev[w] = std::abs(birkhoff_sum(ifs, phi, po) / static_cast<double>(ifs.m * len) - pc.mean);
      });
      for (double d : dev) pc.max_deviation = std::max(pc.max_deviation, d);
    }
    pc.deviation_pass = pc.max_deviation <= pc.deviation_budget;
    pc.deviation_nominal_pass = pc.max_deviation < eps;
    // (b)
    const std::size_t k = options.pressure_k;
    std::vector<double> sums(orbits[k].size());
    bool failed = false;
    for (std::size_t w = 0; w < orbits[k].size(); ++w) {
      if (std::isnan(orbits[k][w].p)) failed = true;
    }
    if (failed) {
      pc.pressure = std::numeric_limits<double>::quiet_NaN();
    } else {
      for_each_index(orbits[k].size(), options.pressure.mode,
                     [&](std::size_t w) { sums[w] = birkhoff_sum(ifs, phi, orbits[k][w]); });
      pc.pressure = pressure_from_sums(sums, totals[k], sub[k], static_cast<double>(ifs.m * k));
    }
    pc.pressure_target = h_mu + pc.mean - 5.0 * eps;
    pc.pressure_margin = pc.pressure - pc.pressure_target;
    pc.pressure_pass = pc.pressure_margin >= 0.0;
    pc.pressure_nominal_pass = pc.pressure >= h_mu + pc.mean - eps;
    // Sampled modulus of continuity at scale rho.
    for (std::size_t s = 0; s < options.modulus_samples; ++s) {
      const double x = map.lo() + map.diameter() * (static_cast<double>(s) + 0.5) / static_cast<double>(options.modulus_samples);
      for (double frac : {0.25, 0.5, 1.0}) {
        const double y = map.reduce(x + frac * ifs.rho);
        try {
          pc.modulus = std::max(pc.modulus, std::abs(phi(map, x) - phi(map, y)));
        } catch (const Error&) {
        }
      }
    }
    pc.modulus_violated = pc.modulus > eps;
    if (map.is_circle()) {
      const double left = phi(map, map.lo());
      const double right = phi(map, map.hi() - 1e-12 * map.diameter());
      pc.continuous = std::abs(left - right) <= 1e-6 * (1.0 + std::abs(left));
    }
    if (pc.continuous) {
      rep.pass_b = rep.pass_b && pc.pressure_pass;
      rep.pass_c = rep.pass_c && pc.deviation_pass;
    }
    rep.potentials.push_back(std::move(pc));
  }
  if (any_failed) rep.pass_c = false;
  return rep;
}

}  // namespace replab
