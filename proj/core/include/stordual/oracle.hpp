#pragma once

#include <cstddef>
#include <span>

#include "stordual/cost.hpp"
#include "stordual/policy.hpp"
#include "stordual/schedule.hpp"

namespace stordual {

/// Grid resolution for the dynamic-programming reference solver.
struct DpConfig {
  std::size_t soc_points = 401;    // nodes over [0, capacity], >= 2
  std::size_t power_points = 201;  // odd node count over [-P, P] so 0 is a node
  bool interpolate = true;         // linear value interpolation between nodes

  DpConfig() = default;
  DpConfig(std::size_t soc_points_, std::size_t power_points_, bool interpolate_ = true);
};

/// Worst-case residuals of the optimality conditions over a candidate
/// schedule and dual trace. Stationarity covers the interior power
/// conditions, complementarity the state-driven dual transitions (the dual
/// may move only at a bound, and must match the terminal marginal at the
/// end), and dual infeasibility the sign constraints of the reconstructed
/// bound multipliers.
struct KktReport {
  double max_stationarity_residual = 0.0;
  double max_complementarity_residual = 0.0;
  double max_dual_infeasibility = 0.0;
  std::size_t worst_period = 0;

  double worst() const;
};

/// Backward value iteration over a state-of-charge grid with net-power
/// actions; the action's sign selects the efficiency branch, so the returned
/// schedule never charges and discharges simultaneously. The forward pass
/// follows the continuous state greedily and the objective is evaluated
/// exactly on the extracted schedule. Duals are not produced.
Schedule dp_solve(const StorageSpec& spec, const CostSource& costs, const TerminalCost& term,
                  const DpConfig& cfg = {});

/// Validates feasibility (bounds and dynamics within 1e-9) and reconstructs
/// the box multipliers implied by the schedule and the dual trace
/// (theta_0..theta_T). For piecewise-linear costs stationarity is membership
/// of the scaled dual in the one-sided marginal interval at the dispatch
/// point. Throws on an infeasible schedule.
KktReport kkt_residuals(const StorageSpec& spec, const CostSource& costs,
                        const TerminalCost& term, const Schedule& schedule,
                        std::span<const double> theta);

/// Sum of per-period operating costs at the net dispatch plus the terminal
/// cost of the final state.
double objective_of(const CostSource& costs, const TerminalCost& term, const Schedule& schedule);

}  // namespace stordual
