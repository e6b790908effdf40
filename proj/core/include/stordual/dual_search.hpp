#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stordual/cost.hpp"
#include "stordual/policy.hpp"
#include "stordual/schedule.hpp"

namespace stordual {

/// Thrown when the bisection exhausts its iteration cap, which indicates a
/// broken monotonicity assumption upstream or a dual accuracy finer than the
/// floating-point resolution of the search range.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DualRange {
  double lo;
  double hi;
};

/// Search parameters for the dual bisection.
struct SearchConfig {
  /// Dual accuracy: the search stops once the bracket is narrower than this.
  double epsilon = 1e-3;

  /// Explicit search range; when absent the symmetric marginal envelope of
  /// the instance is used. Must satisfy lo < hi.
  std::optional<DualRange> range;

  /// Safety cap on classification evaluations; 0 derives it from the range
  /// and epsilon. A supplied value must cover ceil(log2(width/epsilon)) + 2.
  std::size_t max_iterations = 0;

  /// Record the guaranteed-optimal leading periods in the solution. Turning
  /// this off makes the solver's working state constant in the horizon.
  bool collect_prefix = true;

  /// Use the one-sided search range [0, hi] instead of the symmetric
  /// envelope. Valid only when stored energy never has negative value.
  bool assume_nonnegative_dual = false;
};

/// Relation of a dual guess to the optimal dual, per the bound-crossing test.
enum class Classification { AboveOrEqual, BelowOrEqual, Equal };

/// Converged dual solution for one look-ahead problem.
struct DualSolution {
  double theta = 0.0;         // converged dual, midpoint of the final bracket
  Dispatch first_control;     // period-1 control (clamped onto a bound if needed)
  double first_soc = 0.0;     // state of charge after the first control
  bool first_control_clamped = false;
  std::vector<SimStep> prefix;  // leading periods with sigma inside [0, capacity]
  std::size_t iterations = 0;   // classification evaluations performed
  DualRange bracket{0.0, 0.0};  // final bracket, hi - lo < epsilon
  SimOutcome outcome;           // simulation outcome at theta

  std::size_t prefix_length() const { return prefix.size(); }
};

/// Dual and first-period control bounds for the problem with the
/// non-simultaneous charge/discharge constraint enforced. Every admissible
/// charge-status assignment has its dual inside [theta_lo, theta_hi] and its
/// first control inside [p_lo, p_hi] (up to the search accuracy).
struct BoundsResult {
  double theta_lo = 0.0;  // from the charge-preferring policy
  double theta_hi = 0.0;  // from the discharge-preferring policy
  double p_lo = 0.0;      // charge-preferring net control at theta_hi
  double p_hi = 0.0;      // discharge-preferring net control at theta_lo
  DualSolution charge_preferring;
  DualSolution discharge_preferring;
};

/// Symmetric default search range: hi is the largest efficiency-scaled
/// operating marginal over the power range plus the largest terminal
/// marginal over the capacity range, and lo = -hi. Encloses instances with
/// negative duals, which the one-sided textbook range does not.
DualRange marginal_envelope(const StorageSpec& spec, const CostSource& costs,
                            const TerminalCost& term);

/// Classifies a dual guess x from its simulation outcome: hitting the
/// capacity bound first means x is at or above the optimal dual, hitting
/// empty first means at or below, and a completed run compares x against the
/// negated terminal marginal at the final emulated state.
Classification classify(double x, const SimOutcome& outcome, const TerminalCost& term);

/// Bisects the dual range until it is narrower than cfg.epsilon, classifying
/// the midpoint by forward simulation. Returns the converged dual, the
/// period-1 control, and the guaranteed-optimal prefix (when collected). If
/// the converged control would push the state of charge past a bound in
/// period 1, the control is adjusted so the post-step state lands exactly on
/// that bound.
DualSolution solve(const StorageSpec& spec, const CostSource& costs, const TerminalCost& term,
                   const SearchConfig& cfg = {}, PolicyVariant variant = PolicyVariant::Relaxed);

/// Runs the two one-sided searches and pairs each control bound with the
/// opposite dual bound, the direction forced by the decreasing dual-to-net
/// map. May run the inner searches concurrently (STORAGE_SOLVER_THREADS >= 2).
BoundsResult solve_bounds(const StorageSpec& spec, const CostSource& costs,
                          const TerminalCost& term, const SearchConfig& cfg = {});

/// Serves the period-t control from a previous solution when its prefix
/// still covers t; returns nullopt when a bound event invalidated the dual
/// and a fresh solve from the current state is required.
std::optional<Dispatch> warm_control(const DualSolution& prev, std::size_t t);

/// Solves the whole horizon by optimal-prefix decomposition: solve, commit
/// the guaranteed-optimal prefix, and re-solve the remaining subproblem from
/// the last committed state at each bound event. The dual trace is piecewise
/// constant, changing value only at committed bound events.
Schedule solve_horizon(const StorageSpec& spec, const CostSource& costs, const TerminalCost& term,
                       const SearchConfig& cfg = {},
                       PolicyVariant variant = PolicyVariant::Relaxed);

}  // namespace stordual
