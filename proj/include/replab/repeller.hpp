#pragma once

// The repeller construction: good windows -> separated set E -> return-time
// classes F_k -> inverse-branch IFS on a base ball, plus the periodic-orbit
// estimates used to check the entropy, pressure, Birkhoff and expansion
// conclusions on it.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "replab/entropy.hpp"
#include "replab/kernels.hpp"
#include "replab/maps.hpp"
#include "replab/orbits.hpp"
#include "replab/potential.hpp"
#include "replab/tempering.hpp"

namespace replab {

// ---- good set ---------------------------------------------------------------

struct GoodSetOptions {
  std::size_t n = 10;                  // return-time lower bound of the pipeline
  std::size_t depth = 200;
  std::size_t windows = 4000;
  std::size_t birkhoff_horizon = 100;
  double rho_quantile = 0.0;           // lowest-rho fraction of accepted windows dropped
  double recurrence_delta = 0.0;       // 0 means chi
  std::vector<Potential> potentials;
  std::vector<double> potential_means; // orbit estimates of the integrals; computed when empty
  TemperingOptions tempering;
  Execution mode = Execution::parallel;
};

struct WindowRecord {
  std::size_t orbit_index = 0;
  double x = 0.0;
  bool tempering_ok = false;
  std::string reject_reason;  // empty when the window is retained
  TemperingProfile profile;
  std::size_t last_violation = 0;
  std::size_t last_bad_k = 0;  // largest k <= horizon with a Birkhoff average off by > eps
  bool recurrence_ok = false;
  bool birkhoff_ok = false;
  bool retained = false;
};

struct GoodPoint {
  double x = 0.0;
  std::size_t orbit_index = 0;
  double rho = 0.0;
  std::size_t last_violation = 0;
};

struct GoodSet {
  std::vector<GoodPoint> points;
  double rho = 0.0;
  double acceptance_rate = 0.0;
  double tempering_acceptance = 0.0;
  double recurrence_acceptance = 0.0;
  double birkhoff_acceptance = 0.0;
  double delta = 0.0;
  double chi = 0.0;
  double eps = 0.0;
  std::size_t n = 0;
  std::size_t n2 = 0;  // (1 - delta)-quantile of last_bad_k, plus one; Birkhoff filter onset
  std::size_t candidates = 0;
  std::vector<WindowRecord> windows;

  std::vector<double> xs() const;
};

// Profiles every window and applies the filters without the acceptance gate.
GoodSet evaluate_good_set(const MapSystem& map, const Orbit& orbit, double chi, double eps, double delta,
                          const GoodSetOptions& options = {});

// evaluate_good_set, then throws GoodSetTooThin if acceptance < 1 - 2 delta.
GoodSet select_good_set(const MapSystem& map, const Orbit& orbit, double chi, double eps, double delta,
                        const GoodSetOptions& options = {});

// ---- return classing ---------------------------------------------------------

struct CountingChain {
  std::size_t card_e = 0;
  std::size_t card_e_returning = 0;
  std::size_t card_f_m = 0;
  std::size_t card_f_m_cell = 0;
  std::size_t return_slots = 0;  // integers k in [n, n(1+eps))
  double literal_bound = 0.0;    // card E / (eps n)
  double pigeonhole_bound = 0.0; // card E_returning / return_slots
  double cell_bound = 0.0;       // card F_m / j
  bool literal_holds = false;
  bool pigeonhole_holds = false;
  bool cell_holds = false;
};

struct Thresholds {
  double n1 = 0.0;  // log j / eps
  std::size_t n2 = 0;
  double n3 = 0.0;  // log 4 / (chi - 2 eps)
  bool n1_ok = false;
  bool n2_ok = false;
  bool n3_ok = false;
};

struct ReturnClassing {
  SeparatedSet e;
  std::size_t n = 0;
  double eps = 0.0;
  double chi = 0.0;
  double rho = 0.0;
  double cell_width = 0.0;
  std::int64_t cell_count = 0;
  std::vector<double> cover_centers;
  std::vector<std::int64_t> cover_cells;
  std::size_t j = 0;
  std::vector<std::size_t> return_time;          // per E point, 0 = no return in the window
  std::map<std::size_t, std::vector<std::size_t>> classes;  // k -> indices into e.points
  std::size_t dropped = 0;
  std::size_t chosen_m = 0;
  std::int64_t chosen_cell = 0;
  double base_center = 0.0;
  std::vector<std::size_t> f_m_cell;             // indices into e.points
  CountingChain chain;
  Thresholds thresholds;

  std::int64_t cell_of(double x, const MapSystem& map) const;
};

ReturnClassing return_classing(const MapSystem& map, const GoodSet& good, std::size_t n, double eps,
                               Execution mode = Execution::parallel);

// ---- inverse-branch IFS --------------------------------------------------------

struct IfsBranch {
  double anchor = 0.0;
  std::vector<int> ids;               // branch ids along the anchor's first m iterates
  std::vector<double> anchor_orbit;   // anchor, f(anchor), ..., f^m(anchor); empty for full shifts
  double u_lo = 0.0;                  // image of the base ball, lifted next to the base center
  double u_hi = 0.0;
  double lipschitz = 0.0;
};

struct RejectCounts {
  std::size_t escape = 0;
  std::size_t containment = 0;
  std::size_t diameter = 0;
  std::size_t lipschitz = 0;
  std::size_t overlap = 0;
  std::size_t total() const { return escape + containment + diameter + lipschitz + overlap; }
};

struct RepellerIFS {
  std::shared_ptr<const MapSystem> map;
  double base_center = 0.0;
  double base_radius = 0.0;
  std::size_t m = 0;
  std::vector<IfsBranch> branches;
  double contraction_bound = 0.0;  // e^{-m(chi - 2 eps)}
  double chi = 0.0;
  double eps = 0.0;
  double rho = 0.0;
  std::size_t candidates = 0;
  RejectCounts rejected;
  bool full_shift = false;

  // One inverse branch applied to y; nullopt if it leaves a branch image.
  std::optional<double> apply(std::size_t branch, double y, std::vector<double>* trail = nullptr) const;
};

RepellerIFS build_ifs(const MapSystem& map, const ReturnClassing& classing, double chi, double eps,
                      Execution mode = Execution::parallel);

// Rebuilds branch data (anchor orbits, images, Lipschitz constants) from the
// anchors and ids alone; used when loading an IFS from disk.
void rebuild_branches(RepellerIFS& ifs);

// All id words of length m on a map whose branches are onto; base ball is
// the whole domain. Built without the closure checks.
RepellerIFS full_shift_ifs(const MapSystem& map, std::size_t m, double chi = 0.0, double eps = 0.0);

// ---- periodic points and pressure ------------------------------------------------

struct PeriodicOrbit {
  double p = 0.0;
  std::vector<double> cycle;   // f^t(p), t = 0..mk-1
  double residual = 0.0;       // max_t d(f(cycle[t]), cycle[t+1])
  double log_derivative = 0.0; // log |(f^{mk})'(p)|
  int sweeps = 0;
};

// Fixed point of phi_{w_{k-1}} o ... o phi_{w_0}, found by backward sweeps
// from the base center. Throws NoConvergence.
PeriodicOrbit periodic_orbit(const RepellerIFS& ifs, const std::vector<std::size_t>& word);
double periodic_point(const RepellerIFS& ifs, const std::vector<std::size_t>& word);

double repeller_entropy(const RepellerIFS& ifs);

struct PressureOptions {
  double cap = 1e5;
  bool subsample = true;
  std::uint64_t seed = 0;
  Execution mode = Execution::parallel;
};

struct PressureEstimate {
  double value = 0.0;
  double words_total = 0.0;
  std::size_t words_used = 0;
  bool subsampled = false;
};

// Words of length k: every word when B^k <= cap, else `cap` words drawn
// uniformly with replacement. Throws CapExceeded if that is disallowed.
std::vector<std::vector<std::size_t>> enumerate_words(std::size_t alphabet, std::size_t k, const PressureOptions& options,
                                                      bool* subsampled = nullptr, double* total = nullptr);

PressureEstimate pressure_estimate(const RepellerIFS& ifs, const Potential& phi, std::size_t k,
                                   const PressureOptions& options = {});
double repeller_pressure(const RepellerIFS& ifs, const Potential& phi, std::size_t k,
                         const PressureOptions& options = {});

// ---- verification ---------------------------------------------------------------

struct VerifyOptions {
  std::size_t max_word_length = 3;
  std::size_t pressure_k = 3;
  PressureOptions pressure;
  std::size_t modulus_samples = 256;
};

struct PotentialCheck {
  std::string name;
  double mean = 0.0;            // orbit estimate of the integral
  double pressure = 0.0;
  double pressure_target = 0.0; // h_mu + mean - 5 eps
  double pressure_margin = 0.0;
  bool pressure_pass = false;
  bool pressure_nominal_pass = false;
  double max_deviation = 0.0;   // over tested periodic points
  double deviation_budget = 0.0;
  bool deviation_pass = false;
  bool deviation_nominal_pass = false;
  double modulus = 0.0;         // sampled sup |phi(x) - phi(y)| over d(x,y) <= rho
  bool modulus_violated = false;
  // False when phi jumps across the seam of a circle map. Such potentials are
  // outside the hypotheses; their (b) and (c) rows are reported but not gated.
  bool continuous = true;
};

struct VerificationReport {
  std::string map_name;
  std::size_t m = 0;
  std::size_t branch_count = 0;
  double chi = 0.0;
  double eps = 0.0;
  double rho = 0.0;
  double h_repeller = 0.0;
  double h_mu = 0.0;
  double entropy_target = 0.0;  // h_mu - 3 eps
  double entropy_margin = 0.0;
  bool entropy_nominal_pass = false;
  std::vector<PotentialCheck> potentials;
  std::size_t periodic_points = 0;
  bool periodic_subsampled = false;
  double max_residual = 0.0;
  double min_periodic_lyapunov = 0.0;
  double lyapunov_target = 0.0;  // chi - 2 eps
  double lyapunov_margin = 0.0;
  bool lyapunov_nominal_pass = false;
  bool expansion_certificate = false;
  bool conjugacy_consistent = false;
  bool pressure_subsampled = false;
  bool pass_a = false;
  bool pass_b = false;
  bool pass_c = false;
  bool pass_d = false;

  bool all_pass() const { return pass_a && pass_b && pass_c && pass_d; }
};

// `means[i]` is the orbit estimate of the integral of potentials[i].
VerificationReport verify_theorem(const RepellerIFS& ifs, double h_mu, double chi, const std::vector<Potential>& potentials,
                                  const std::vector<double>& means, double eps, const VerifyOptions& options = {});

}  // namespace replab
