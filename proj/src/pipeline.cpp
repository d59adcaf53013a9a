#include "replab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include <fmt/format.h>

#include "replab/entropy.hpp"
#include "replab/error.hpp"
#include "replab/orbits.hpp"
#include "replab/recurrence.hpp"
#include "replab/report.hpp"
#include "replab/serialize.hpp"

namespace replab {

namespace {

constexpr std::size_t kSpanningSample = 2000;
constexpr std::size_t kFitSamples = 10000;

class Outputs {
 public:
  explicit Outputs(const PipelineConfig& c) : dir_(c.out) {}

  void write(const std::string& name, const std::string& text) {
    const std::string path = (std::filesystem::path(dir_) / name).string();
    write_text(path, text);
    files.push_back(path);
  }

  std::vector<std::string> files;

 private:
  std::string dir_;
};

bool is_user_error(const Error& e) { return e.kind() == ErrorKind::config || e.kind() == ErrorKind::io; }

std::string d(double v) { return format_double(v); }

std::vector<Potential> potentials_of(const PipelineConfig& c) {
  std::vector<Potential> out;
  for (const auto& p : c.potentials) out.push_back(Potential::parse(p));
  return out;
}

void put_map(KvWriter& kv, const MapSystem& map) {
  kv.begin("map");
  kv.put("name", map.name());
  kv.put("lo", map.lo());
  kv.put("hi", map.hi());
  kv.put("metric", map.is_circle() ? "circle" : "interval");
  kv.put("branches", map.branches().size());
  if (map.spec().kind == "gauss") kv.put("branch_cutoff", map.max_branches());
  std::string s;
  for (double x : map.singular_set()) s += (s.empty() ? "" : " ") + d(x);
  kv.put("singular_set", s.empty() ? "none" : s);
  kv.put("beta", map.beta());
  kv.end();
}

void put_orbit(KvWriter& kv, const Orbit& orbit) {
  kv.begin("orbit");
  kv.put("length", orbit.size());
  kv.put("seed", orbit.seed);
  kv.put("x0", orbit.x0);
  kv.put("burn_in", orbit.burn_in);
  kv.put("restarts", orbit.restarts.size());
  kv.end();
}

void put_lyapunov(KvWriter& kv, const ErgodicEstimates& est) {
  kv.begin("lyapunov");
  kv.put("chi", est.chi_lower);
  kv.put("lambda_forward", est.lambda_forward);
  kv.put("half_orbit_chi", est.half_orbit_chi);
  kv.put("convergence_drift", est.convergence_drift);
  kv.put("note", est.note);
  kv.end();
}

Orbit make_orbit(const MapSystem& map, const PipelineConfig& c) {
  return typical_orbit(map, c.orbit_length, c.seed, c.burn_in);
}

std::vector<double> entropy_pool(const Orbit& orbit, std::size_t samples) {
  const std::size_t n = std::min(samples, orbit.size());
  return {orbit.points.begin(), orbit.points.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::string entropy_grid_csv(const EntropyEstimate& est) {
  CsvTable t({"n", "eps_tilde", "card", "rate", "increment", "saturated"});
  for (const auto& cell : est.grid)
    t.row({std::to_string(cell.n), d(cell.eps_tilde), std::to_string(cell.card), d(cell.rate), d(cell.increment),
           cell.saturated ? "1" : "0"});
  return t.str();
}

void put_entropy(KvWriter& kv, const EntropyEstimate& est) {
  kv.begin("entropy");
  kv.put("h", est.h);
  kv.put("chosen_n", est.chosen_n);
  kv.put("chosen_eps_tilde", est.chosen_eps);
  kv.put("plateau_flat", est.flat);
  kv.put("plateau_tolerance", kPlateauTolerance);
  kv.put("pool_size", est.pool_size);
  kv.put("delta", est.delta);
  kv.put("eps_monotonicity_violations", est.eps_monotonicity_violations);
  kv.put("n_monotonicity_violations", est.n_monotonicity_violations);
  kv.end();
}

std::string flag_list(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) out += (out.empty() ? "" : " ") + f;
  return out.empty() ? "none" : out;
}

}  // namespace

// ---------------------------------------------------------------- analyze

CommandResult cmd_analyze(const PipelineConfig& c) {
  validate(c);
  const MapSystem map = make_map(c.map);
  const auto potentials = potentials_of(c);
  Outputs out(c);
  std::vector<std::string> flags;
  KvWriter kv;
  echo_config(kv, c);
  put_map(kv, map);

  const Orbit orbit = make_orbit(map, c);
  put_orbit(kv, orbit);

  double chi = c.chi;
  try {
    const ErgodicEstimates est = lyapunov_estimates(map, orbit);
    put_lyapunov(kv, est);
    if (!(chi > 0.0)) chi = est.chi_lower;
  } catch (const Error& e) {
    if (is_user_error(e)) throw;
    kv.begin("lyapunov");
    kv.put("error", e.what());
    kv.end();
    flags.push_back("lyapunov");
  }

  kv.begin("birkhoff");
  for (const auto& phi : potentials) kv.put(phi.name(), birkhoff_average(map, orbit, phi));
  kv.end();

  const auto stats = integrability_diagnostics(map, orbit, c.drift_threshold);
  CsvTable integ({"observable", "applicable", "mean", "half_mean", "drift", "std_error", "stable"});
  kv.begin("integrability");
  kv.put("drift_threshold", c.drift_threshold);
  for (const auto& s : stats) {
    kv.begin(s.name);
    kv.put("applicable", s.applicable);
    if (s.applicable) {
      kv.put("mean", s.mean);
      kv.put("half_mean", s.half_mean);
      kv.put("drift", s.drift);
      kv.put("std_error", s.std_error);
      kv.put("stable", s.stable);
      if (!s.stable || !std::isfinite(s.mean)) flags.push_back("integrability:" + s.name);
    }
    kv.end();
    integ.row({s.name, s.applicable ? "1" : "0", d(s.mean), d(s.half_mean), d(s.drift), d(s.std_error),
               s.stable ? "1" : "0"});
  }
  kv.end();
  out.write("integrability.csv", integ.str());

  const RunningMeans rm = running_means(map, orbit, potentials, c.stride);
  std::vector<std::string> header{"index"};
  for (const auto& phi : potentials) header.push_back(phi.name());
  CsvTable means(header);
  for (std::size_t r = 0; r < rm.index.size(); ++r) {
    std::vector<std::string> row{std::to_string(rm.index[r])};
    for (const auto& col : rm.means) row.push_back(d(col[r]));
    means.row(row);
  }
  out.write("orbit_stats.csv", means.str());

  // Recurrence profiles along evenly spaced backward windows.
  const double delta = c.recurrence_delta > 0.0 ? c.recurrence_delta : chi;
  kv.begin("recurrence");
  kv.put("delta", delta);
  if (delta > 0.0 && orbit.size() > c.recurrence_depth && c.recurrence_windows > 0) {
    CsvTable rec({"window", "end_index", "k", "distance", "threshold", "violation"});
    const std::size_t span = orbit.size() - 1 - c.recurrence_depth;
    std::vector<std::size_t> last;
    for (std::size_t w = 0; w < c.recurrence_windows; ++w) {
      const std::size_t end =
          c.recurrence_depth + (c.recurrence_windows > 1 ? w * span / (c.recurrence_windows - 1) : span);
      const auto prof = slow_recurrence_profile(map, backward_window(orbit, end, c.recurrence_depth), delta);
      last.push_back(prof.last_violation);
      std::size_t next = 0;
      for (std::size_t k = 1; k <= prof.distances.size(); ++k) {
        const bool violated = next < prof.violations.size() && prof.violations[next] == k;
        if (violated) ++next;
        rec.row({std::to_string(w), std::to_string(end), std::to_string(k), d(prof.distances[k - 1]),
                 d(prof.thresholds[k - 1]), violated ? "1" : "0"});
      }
    }
    out.write("recurrence.csv", rec.str());
    std::sort(last.begin(), last.end());
    kv.put("windows", last.size());
    kv.put("depth", c.recurrence_depth);
    kv.put("median_last_violation", last[last.size() / 2]);
    kv.put("max_last_violation", last.back());
    const TailSumEstimate tail = tail_sum_estimate(map, orbit, delta, c.tail_n_max);
    CsvTable ts({"n", "radius", "fraction"});
    for (std::size_t n = 1; n <= tail.tail_sums.size(); ++n)
      ts.row({std::to_string(n), d(std::exp(-static_cast<double>(n) * delta)), d(tail.tail_sums[n - 1])});
    out.write("tail_sums.csv", ts.str());
    kv.put("tail_sum_total", tail.total);
    kv.put("integral_bound", tail.integral_bound);
    kv.put("ball_fraction", tail.ball_fraction);
  } else {
    kv.put("skipped", "orbit shorter than the window depth or delta unavailable");
  }
  kv.end();

  if (!map.singular_set().empty()) {
    std::vector<double> samples;
    for (std::size_t i = 0; i < orbit.size() && samples.size() < kFitSamples; ++i)
      if (map.singular_distance(orbit[i]) > 0.0) samples.push_back(orbit[i]);
    kv.begin("nonflatness");
    try {
      const NonFlatnessFit fit = fit_nonflatness(map, samples);
      kv.put("alpha", fit.alpha);
      kv.put("h_const", fit.h_const);
      kv.put("residual", fit.residual);
    } catch (const Error& e) {
      if (is_user_error(e)) throw;
      kv.put("error", e.what());
    }
    kv.end();
  }

  kv.begin("status");
  kv.put("flags", flag_list(flags));
  kv.put("exit_code", flags.empty() ? 0 : 2);
  kv.end();
  out.write("report.txt", kv.str());

  CommandResult res;
  res.exit_code = flags.empty() ? 0 : 2;
  res.summary = fmt::format("analyze {}: chi = {}, flags: {}\n", map.name(), d(chi), flag_list(flags));
  out.write("summary.txt", res.summary);
  res.files = out.files;
  return res;
}

// ---------------------------------------------------------------- entropy

CommandResult cmd_entropy(const PipelineConfig& c) {
  validate(c);
  const MapSystem map = make_map(c.map);
  Outputs out(c);
  KvWriter kv;
  echo_config(kv, c);
  put_map(kv, map);
  const Orbit orbit = typical_orbit(map, c.entropy_samples, c.seed, c.burn_in);
  put_orbit(kv, orbit);
  const std::vector<double> pool = entropy_pool(orbit, c.entropy_samples);

  CommandResult res;
  std::vector<std::string> flags;
  try {
    const EntropyEstimate est = katok_entropy(map, pool, c.entropy_delta, c.n_grid, c.eps_grid);
    put_entropy(kv, est);
    out.write("entropy_grid.csv", entropy_grid_csv(est));
    if (est.eps_monotonicity_violations > 0) flags.push_back("eps_monotonicity");
    if (!est.flat) flags.push_back("plateau_not_flat");

    const SeparatedSet set = greedy_separated(map, pool, est.chosen_n, est.chosen_eps);
    const std::size_t sample = std::min(kSpanningSample, pool.size());
    const SeparationCertificate cert =
        certify_separated(map, set, std::span<const double>(pool).first(sample));
    CsvTable pts({"index", "x", "pool_index"});
    for (std::size_t i = 0; i < set.points.size(); ++i)
      pts.row({std::to_string(i), d(set.points[i]), std::to_string(set.pool_indices[i])});
    out.write("separated_set.csv", pts.str());
    kv.begin("separated_set");
    kv.put("n", set.n);
    kv.put("eps_tilde", set.eps_tilde);
    kv.put("card", set.points.size());
    kv.put("dropped", set.dropped);
    kv.put("separated", cert.separated);
    kv.put("min_pair_distance", cert.min_pair_distance);
    kv.put("pair_violations", cert.pair_violations);
    kv.put("spanning_sample", sample);
    kv.put("uncovered", cert.uncovered);
    kv.put("spanning", cert.spanning);
    kv.end();
    if (!cert.separated || !cert.spanning) flags.push_back("certificate");
    res.summary = fmt::format("entropy {}: h = {} at n = {}, eps_tilde = {} ({})\n", map.name(), d(est.h),
                              est.chosen_n, d(est.chosen_eps), est.flat ? "flat plateau" : "no flat plateau");
  } catch (const Error& e) {
    if (is_user_error(e)) throw;
    kv.begin("entropy");
    kv.put("error", e.what());
    kv.end();
    flags.push_back("estimate_failed");
    res.summary = fmt::format("entropy {}: {}\n", map.name(), e.what());
  }
  // A non-flat plateau is reported but the fallback readout is still valid.
  const bool failed = std::any_of(flags.begin(), flags.end(), [](const std::string& f) { return f != "plateau_not_flat"; });
  res.exit_code = failed ? 2 : 0;
  kv.begin("status");
  kv.put("flags", flag_list(flags));
  kv.put("exit_code", res.exit_code);
  kv.end();
  out.write("report.txt", kv.str());
  out.write("summary.txt", res.summary);
  res.files = out.files;
  return res;
}

// ---------------------------------------------------------------- build

namespace {

std::string tempering_csv(const GoodSet& good) {
  CsvTable t({"window", "orbit_index", "x", "c_eps", "r_tilde", "r", "safety_factor", "rho", "last_violation",
              "last_bad_k", "tempering_ok", "recurrence_ok", "birkhoff_ok", "accepted", "reason"});
  for (std::size_t w = 0; w < good.windows.size(); ++w) {
    const auto& r = good.windows[w];
    const auto& p = r.profile;
    t.row({std::to_string(w), std::to_string(r.orbit_index), d(r.x), d(p.c_eps), d(p.r_tilde), d(p.r),
           d(p.safety_factor), d(p.rho), std::to_string(r.last_violation), std::to_string(r.last_bad_k),
           r.tempering_ok ? "1" : "0", r.recurrence_ok ? "1" : "0", r.birkhoff_ok ? "1" : "0",
           r.retained ? "1" : "0", r.reject_reason.empty() ? "-" : r.reject_reason});
  }
  return t.str();
}

void put_good_set(KvWriter& kv, const GoodSet& g) {
  kv.begin("good_set");
  kv.put("windows", g.candidates);
  kv.put("accepted", g.points.size());
  kv.put("acceptance_rate", g.acceptance_rate);
  kv.put("required_rate", 1.0 - 2.0 * g.delta);
  kv.put("tempering_acceptance", g.tempering_acceptance);
  kv.put("recurrence_acceptance", g.recurrence_acceptance);
  kv.put("birkhoff_acceptance", g.birkhoff_acceptance);
  kv.put("rho", g.rho);
  kv.put("n2", g.n2);
  std::size_t max_violation = 0;
  for (const auto& p : g.points) max_violation = std::max(max_violation, p.last_violation);
  kv.put("max_last_violation_retained", max_violation);
  kv.end();
}

void put_classing(KvWriter& kv, const ReturnClassing& rc) {
  kv.begin("classing");
  kv.put("card_e", rc.e.points.size());
  kv.put("cell_width", rc.cell_width);
  kv.put("cells", rc.cell_count);
  kv.put("j", rc.j);
  kv.put("dropped", rc.dropped);
  kv.begin("classes");
  for (const auto& [k, members] : rc.classes) kv.put(fmt::format("F{}", k), members.size());
  kv.end();
  kv.put("m", rc.chosen_m);
  kv.put("chosen_cell", rc.chosen_cell);
  kv.put("base_center", rc.base_center);
  kv.begin("counting_chain");
  const CountingChain& ch = rc.chain;
  kv.put("card_e", ch.card_e);
  kv.put("card_e_returning", ch.card_e_returning);
  kv.put("card_f_m", ch.card_f_m);
  kv.put("card_f_m_cell", ch.card_f_m_cell);
  kv.put("return_slots", ch.return_slots);
  kv.put("literal_bound", ch.literal_bound);
  kv.put("literal_holds", ch.literal_holds);
  kv.put("pigeonhole_bound", ch.pigeonhole_bound);
  kv.put("pigeonhole_holds", ch.pigeonhole_holds);
  kv.put("cell_bound", ch.cell_bound);
  kv.put("cell_holds", ch.cell_holds);
  kv.end();
  kv.begin("thresholds");
  const Thresholds& th = rc.thresholds;
  kv.put("n1", th.n1);
  kv.put("n1_ok", th.n1_ok);
  kv.put("n2", th.n2);
  kv.put("n2_ok", th.n2_ok);
  kv.put("n3", th.n3);
  kv.put("n3_ok", th.n3_ok);
  kv.end();
  kv.end();
}

void put_ifs(KvWriter& kv, const RepellerIFS& ifs) {
  kv.begin("ifs");
  kv.put("m", ifs.m);
  kv.put("base_center", ifs.base_center);
  kv.put("base_radius", ifs.base_radius);
  kv.put("contraction_bound", ifs.contraction_bound);
  kv.put("candidates", ifs.candidates);
  kv.put("branches", ifs.branches.size());
  kv.begin("rejected");
  kv.put("escape", ifs.rejected.escape);
  kv.put("containment", ifs.rejected.containment);
  kv.put("diameter", ifs.rejected.diameter);
  kv.put("lipschitz", ifs.rejected.lipschitz);
  kv.put("overlap", ifs.rejected.overlap);
  kv.end();
  double max_lip = 0.0;
  for (const auto& b : ifs.branches) max_lip = std::max(max_lip, b.lipschitz);
  kv.put("max_lipschitz", max_lip);
  kv.end();
}

VerifyOptions verify_options(const PipelineConfig& c) {
  VerifyOptions v;
  v.max_word_length = c.max_word_length;
  v.pressure_k = c.pressure_k;
  v.pressure.cap = c.word_cap;
  v.pressure.subsample = c.subsample;
  v.pressure.seed = c.seed;
  return v;
}

}  // namespace

CommandResult cmd_build(const PipelineConfig& c) {
  validate(c);
  const MapSystem map = make_map(c.map);
  const auto potentials = potentials_of(c);
  Outputs out(c);
  KvWriter kv;
  echo_config(kv, c);
  put_map(kv, map);

  std::string stage = "orbit";
  CommandResult res;
  try {
    const Orbit orbit = make_orbit(map, c);
    put_orbit(kv, orbit);

    stage = "lyapunov";
    const ErgodicEstimates est = lyapunov_estimates(map, orbit);
    put_lyapunov(kv, est);
    const double chi = c.chi > 0.0 ? c.chi : est.chi_lower;
    require_epsilon_below(c, chi);

    std::vector<double> means;
    kv.begin("birkhoff");
    for (const auto& phi : potentials) {
      means.push_back(birkhoff_average(map, orbit, phi));
      kv.put(phi.name(), means.back());
    }
    kv.end();

    stage = "entropy";
    const std::vector<double> pool = entropy_pool(orbit, c.entropy_samples);
    const EntropyEstimate h = katok_entropy(map, pool, c.entropy_delta, c.n_grid, c.eps_grid);
    put_entropy(kv, h);
    out.write("entropy_grid.csv", entropy_grid_csv(h));

    stage = "good_set";
    GoodSetOptions gopt;
    gopt.n = c.n;
    gopt.depth = c.depth;
    gopt.windows = c.windows;
    gopt.birkhoff_horizon = c.birkhoff_horizon;
    gopt.rho_quantile = c.rho_quantile;
    gopt.recurrence_delta = c.recurrence_delta;
    gopt.potentials = potentials;
    gopt.potential_means = means;
    const GoodSet good = evaluate_good_set(map, orbit, chi, c.eps, c.delta, gopt);
    put_good_set(kv, good);
    out.write("tempering.csv", tempering_csv(good));
    if (good.points.empty() || good.acceptance_rate < 1.0 - 2.0 * c.delta)
      throw Error(ErrorKind::good_set_too_thin,
                  fmt::format("acceptance {} below 1 - 2 delta = {}", d(good.acceptance_rate), d(1.0 - 2.0 * c.delta)));

    stage = "classing";
    const ReturnClassing rc = return_classing(map, good, c.n, c.eps);
    put_classing(kv, rc);

    stage = "ifs";
    const RepellerIFS ifs = build_ifs(map, rc, chi, c.eps);
    put_ifs(kv, ifs);
    StoredRepeller stored{ifs, h.h, {}, means, verify_options(c)};
    for (const auto& phi : potentials) stored.potentials.push_back(phi.name());
    out.write("ifs.txt", serialize_repeller(stored));

    stage = "verify";
    const VerificationReport rep = verify_theorem(ifs, h.h, chi, potentials, means, c.eps, stored.verify);
    const std::string vtext = verification_text(rep);
    out.write("verification.txt", vtext);
    kv.begin("status");
    kv.put("stage", "complete");
    kv.put("all_pass", rep.all_pass());
    kv.put("exit_code", rep.all_pass() ? 0 : 2);
    kv.end();
    out.write("report.txt", kv.str() + vtext);
    res.exit_code = rep.all_pass() ? 0 : 2;
    res.summary = verification_summary(rep);
  } catch (const Error& e) {
    if (is_user_error(e)) throw;
    kv.begin("status");
    kv.put("stage", stage);
    kv.put("error", e.what());
    kv.put("exit_code", 2);
    kv.end();
    out.write("report.txt", kv.str());
    res.exit_code = 2;
    res.summary = fmt::format("build {} stopped at stage '{}': {}\n", map.name(), stage, e.what());
  }
  out.write("summary.txt", res.summary);
  res.files = out.files;
  return res;
}

// ---------------------------------------------------------------- verify

CommandResult cmd_verify(const std::string& ifs_path, const PipelineConfig& c) {
  StoredRepeller stored = load_repeller(ifs_path);
  const RepellerIFS& ifs = stored.ifs;
  std::vector<Potential> potentials;
  for (const auto& p : stored.potentials) potentials.push_back(Potential::parse(p));
  std::vector<double> means = stored.means;

  // Config potentials missing from the file get fresh orbit means.
  std::vector<Potential> extra;
  for (const auto& text : c.potentials) {
    const Potential phi = Potential::parse(text);
    const bool known = std::any_of(potentials.begin(), potentials.end(),
                                   [&](const Potential& p) { return p.name() == phi.name(); });
    const bool repeated = std::any_of(extra.begin(), extra.end(),
                                      [&](const Potential& p) { return p.name() == phi.name(); });
    if (!known && !repeated) extra.push_back(phi);
  }
  if (!extra.empty()) {
    const Orbit orbit = typical_orbit(*ifs.map, c.orbit_length, c.seed, c.burn_in);
    for (const auto& phi : extra) {
      potentials.push_back(phi);
      means.push_back(birkhoff_average(*ifs.map, orbit, phi));
    }
  }

  Outputs out(c);
  const VerificationReport rep = verify_theorem(ifs, stored.h_mu, ifs.chi, potentials, means, ifs.eps, stored.verify);
  out.write("verification.txt", verification_text(rep));
  CommandResult res;
  res.exit_code = rep.all_pass() ? 0 : 2;
  res.summary = verification_summary(rep);
  out.write("summary.txt", res.summary);
  res.files = out.files;
  return res;
}

// ---------------------------------------------------------------- report text

std::string verification_text(const VerificationReport& r) {
  KvWriter kv;
  kv.begin("verification");
  kv.put("map", r.map_name);
  kv.put("m", r.m);
  kv.put("branches", r.branch_count);
  kv.put("chi", r.chi);
  kv.put("eps", r.eps);
  kv.put("rho", r.rho);
  kv.put("periodic_points", r.periodic_points);
  kv.put("periodic_subsampled", r.periodic_subsampled);
  kv.put("max_residual", r.max_residual);
  kv.put("conjugacy_consistent", r.conjugacy_consistent);

  kv.begin("a_entropy");
  kv.put("h_repeller", r.h_repeller);
  kv.put("h_mu", r.h_mu);
  kv.put("budget", "3 eps");
  kv.put("target", r.entropy_target);
  kv.put("margin", r.entropy_margin);
  kv.put("pass", r.pass_a);
  kv.put("nominal_pass", r.entropy_nominal_pass);
  kv.end();

  kv.begin("b_pressure");
  kv.put("budget", "5 eps");
  kv.put("subsampled", r.pressure_subsampled);
  for (const auto& p : r.potentials) {
    kv.begin(p.name);
    kv.put("mean", p.mean);
    kv.put("pressure", p.pressure);
    kv.put("target", p.pressure_target);
    kv.put("margin", p.pressure_margin);
    kv.put("pass", p.pressure_pass);
    kv.put("nominal_pass", p.pressure_nominal_pass);
    kv.put("modulus_at_rho", p.modulus);
    kv.put("modulus_violated", p.modulus_violated);
    kv.put("continuous", p.continuous);
    kv.end();
  }
  kv.put("pass", r.pass_b);
  kv.end();

  kv.begin("c_birkhoff");
  kv.put("budget", "2 eps");
  for (const auto& p : r.potentials) {
    kv.begin(p.name);
    kv.put("max_deviation", p.max_deviation);
    kv.put("limit", p.deviation_budget);
    kv.put("pass", p.deviation_pass);
    kv.put("nominal_pass", p.deviation_nominal_pass);
    kv.end();
  }
  kv.put("pass", r.pass_c);
  kv.end();

  kv.begin("d_lyapunov");
  kv.put("budget", "2 eps");
  kv.put("min_periodic_lyapunov", r.min_periodic_lyapunov);
  kv.put("target", r.lyapunov_target);
  kv.put("margin", r.lyapunov_margin);
  kv.put("expansion_certificate", r.expansion_certificate);
  kv.put("pass", r.pass_d);
  kv.put("nominal_pass", r.lyapunov_nominal_pass);
  kv.end();

  kv.put("all_pass", r.all_pass());
  kv.end();
  return kv.str();
}

std::string verification_summary(const VerificationReport& r) {
  auto mark = [](bool ok) { return ok ? "pass" : "FAIL"; };
  // Potentials discontinuous on the circle are outside the hypotheses.
  auto pmark = [&](const PotentialCheck& p, bool ok) { return p.continuous ? mark(ok) : ok ? "pass*" : "fail*"; };
  std::string s = fmt::format("repeller for {}: m = {}, {} branches, rho = {}\n", r.map_name, r.m, r.branch_count,
                              d(r.rho));
  s += fmt::format("(a) entropy   {}  h_rep = {:.4f}  vs h_mu - 3eps = {:.4f}\n", mark(r.pass_a), r.h_repeller,
                   r.entropy_target);
  for (const auto& p : r.potentials)
    s += fmt::format("(b) pressure  {}  {}: P = {:.4f}  vs h_mu + mean - 5eps = {:.4f}\n", pmark(p, p.pressure_pass),
                     p.name, p.pressure, p.pressure_target);
  for (const auto& p : r.potentials)
    s += fmt::format("(c) birkhoff  {}  {}: max deviation {:.4f}  vs 2eps = {:.4f}\n", pmark(p, p.deviation_pass), p.name,
                     p.max_deviation, p.deviation_budget);
  s += fmt::format("(d) lyapunov  {}  min {:.4f}  vs chi - 2eps = {:.4f}  over {} periodic points\n", mark(r.pass_d),
                   r.min_periodic_lyapunov, r.lyapunov_target, r.periodic_points);
  if (std::any_of(r.potentials.begin(), r.potentials.end(), [](const PotentialCheck& p) { return !p.continuous; }))
    s += "* discontinuous across the circle seam; reported, not gated\n";
  return s;
}

}  // namespace replab
