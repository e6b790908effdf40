#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stordual/cost.hpp"
#include "stordual/policy.hpp"
#include "stordual/schedule.hpp"
#include "stordual/storage.hpp"

namespace stordual {

/// A solvable instance: storage parameters, horizon costs, terminal
/// valuation, and the generator provenance (seed + family tag).
struct Scenario {
  StorageSpec storage;
  TerminalCost terminal;
  std::vector<CostFunction> costs;
  std::uint64_t seed = 0;
  std::string family = "custom";

  std::size_t horizon() const { return costs.size(); }

  /// Cost source borrowing this scenario's costs; the scenario must outlive it.
  SpanCostSource source() const { return SpanCostSource(costs); }
};

/// Tracking-cost family: per period a quadratic cost with curvature drawn
/// uniformly from [alpha_lo, alpha_hi] (the lower end clipped to 1e-3 to keep
/// the cost strictly convex) and target drawn from [beta_lo, beta_hi].
struct QuadraticFamilyOptions {
  double alpha_lo = 0.0;
  double alpha_hi = 10.0;
  double beta_lo = -10.0;
  double beta_hi = 0.0;
};

/// Dispatch-curve family: per period a convex piecewise-linear marginal with
/// `segments` steps drawn uniformly from [marginal_lo, marginal_hi] and
/// sorted, over breakpoints partitioning [-demand_span, demand_span].
struct PwlFamilyOptions {
  std::size_t segments = 100;
  double marginal_lo = -20.0;
  double marginal_hi = 0.0;
  double demand_span = 10.0;
};

/// Storage and terminal parameters shared by the generated families:
/// power 1, capacity 4, efficiency 0.92, half-full initial state, and a
/// terminal cost of (capacity - e)^2 / 2.
StorageSpec default_storage();
TerminalCost default_terminal();

Scenario generate_quadratic(std::uint64_t seed, std::size_t horizon,
                            const QuadraticFamilyOptions& opt = {});

Scenario generate_pwl(std::uint64_t seed, std::size_t horizon, const PwlFamilyOptions& opt = {});

/// Scenario files are versioned JSON; schedules are CSV with a header row
/// (columns t, p_plus, p_minus, net, soc, theta). Values round-trip exactly.
Scenario read_scenario(const std::filesystem::path& path);
void write_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Writes per-period rows; the theta column carries the dual governing each
/// period (theta_{t-1}).
void write_schedule(const Schedule& schedule, const std::filesystem::path& path);

/// Reads a schedule CSV. The returned theta vector holds the per-period
/// duals theta_0..theta_{T-1}; the initial state of charge is not part of
/// the format and is left for the caller to fill in from its scenario.
Schedule read_schedule(const std::filesystem::path& path);

}  // namespace stordual
