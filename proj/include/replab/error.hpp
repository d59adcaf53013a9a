#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace replab {

enum class ErrorKind {
  singular_point,
  out_of_domain,
  no_preimage,
  bad_parameter,
  empty_singular_set,
  persistent_singular_hit,
  non_finite_log,
  depth_exceeds_history,
  zero_derivative,
  non_positive_input,
  tempering_too_weak,
  branch_escape,
  pool_too_small,
  good_set_too_thin,
  no_returns,
  all_branches_rejected,
  no_convergence,
  cap_exceeded,
  config,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::singular_point: return "SingularPoint";
    case ErrorKind::out_of_domain: return "OutOfDomain";
    case ErrorKind::no_preimage: return "NoPreimage";
    case ErrorKind::bad_parameter: return "BadParameter";
    case ErrorKind::empty_singular_set: return "EmptySingularSet";
    case ErrorKind::persistent_singular_hit: return "PersistentSingularHit";
    case ErrorKind::non_finite_log: return "NonFiniteLog";
    case ErrorKind::depth_exceeds_history: return "DepthExceedsHistory";
    case ErrorKind::zero_derivative: return "ZeroDerivative";
    case ErrorKind::non_positive_input: return "NonPositiveInput";
    case ErrorKind::tempering_too_weak: return "TemperingTooWeak";
    case ErrorKind::branch_escape: return "BranchEscape";
    case ErrorKind::pool_too_small: return "PoolTooSmall";
    case ErrorKind::good_set_too_thin: return "GoodSetTooThin";
    case ErrorKind::no_returns: return "NoReturns";
    case ErrorKind::all_branches_rejected: return "AllBranchesRejected";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::cap_exceeded: return "CapExceeded";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::io: return "IoError";
  }
  return "Unknown";
}

}  // namespace replab
