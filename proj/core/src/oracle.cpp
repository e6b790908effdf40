#include "stordual/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace stordual {

namespace {

constexpr double kFeasTol = 1e-9;

double interpolate_value(std::span<const double> values, double e, double step,
                         bool interpolate) {
  const double last = static_cast<double>(values.size() - 1);
  double pos = e / step;
  pos = std::clamp(pos, 0.0, last);
  if (!interpolate) {
    return values[static_cast<std::size_t>(std::llround(pos))];
  }
  const double floor_pos = std::floor(pos);
  const auto i0 = static_cast<std::size_t>(floor_pos);
  const std::size_t i1 = std::min(i0 + 1, values.size() - 1);
  const double frac = pos - floor_pos;
  return values[i0] * (1.0 - frac) + values[i1] * frac;
}

struct ResidualTracker {
  KktReport report;
  double worst_value = -1.0;

  void note(double& channel, double value, std::size_t period) {
    channel = std::max(channel, value);
    if (value > worst_value) {
      worst_value = value;
      report.worst_period = period;
    }
  }
};

double interval_distance(double lo, double hi) {
  if (lo > 0.0) return lo;
  if (hi < 0.0) return -hi;
  return 0.0;
}

}  // namespace

DpConfig::DpConfig(std::size_t soc_points_, std::size_t power_points_, bool interpolate_)
    : soc_points(soc_points_), power_points(power_points_), interpolate(interpolate_) {}

double KktReport::worst() const {
  return std::max({max_stationarity_residual, max_complementarity_residual,
                   max_dual_infeasibility});
}

Schedule dp_solve(const StorageSpec& spec, const CostSource& costs, const TerminalCost& term,
                  const DpConfig& cfg) {
  if (cfg.soc_points < 2) throw std::invalid_argument("soc grid requires at least 2 nodes");
  if (cfg.power_points < 3 || cfg.power_points % 2 == 0)
    throw std::invalid_argument("power grid requires an odd node count of at least 3");
  const std::size_t horizon = costs.periods();
  if (horizon == 0) throw std::invalid_argument("cost source is empty");

  const std::size_t n_soc = cfg.soc_points;
  const std::size_t n_pow = cfg.power_points;
  const double soc_step_size = spec.capacity / static_cast<double>(n_soc - 1);

  // Net-power actions; endpoints and the idle action are exact grid values.
  std::vector<double> actions(n_pow);
  std::vector<double> drains(n_pow);  // state-of-charge drop per action
  const double power_step = 2.0 * spec.power_limit / static_cast<double>(n_pow - 1);
  for (std::size_t k = 0; k < n_pow; ++k) {
    double p = -spec.power_limit + static_cast<double>(k) * power_step;
    if (k == 0) p = -spec.power_limit;
    if (k + 1 == n_pow) p = spec.power_limit;
    if (k == (n_pow - 1) / 2) p = 0.0;
    actions[k] = p;
    drains[k] = p >= 0.0 ? p / spec.efficiency : p * spec.efficiency;
  }

  // value[t-1][i]: cost-to-go from the start of period t at soc node i;
  // value[horizon][i] is the terminal cost.
  std::vector<std::vector<double>> value(horizon + 1, std::vector<double>(n_soc));
  for (std::size_t i = 0; i < n_soc; ++i) {
    value[horizon][i] = eval_terminal(term, static_cast<double>(i) * soc_step_size);
  }

  std::vector<double> stage_cost(n_pow);
  const double feas_slack = 1e-12 * std::max(1.0, spec.capacity);
  for (std::size_t t = horizon; t >= 1; --t) {
    const CostView view = costs.view(t);
    for (std::size_t k = 0; k < n_pow; ++k) stage_cost[k] = eval_cost(view, actions[k]);
    const auto& next = value[t];
    auto& cur = value[t - 1];
    for (std::size_t i = 0; i < n_soc; ++i) {
      const double e = static_cast<double>(i) * soc_step_size;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n_pow; ++k) {
        const double e_next = e - drains[k];
        if (e_next < -feas_slack || e_next > spec.capacity + feas_slack) continue;
        const double v =
            stage_cost[k] + interpolate_value(next, e_next, soc_step_size, cfg.interpolate);
        if (v < best) best = v;
      }
      cur[i] = best;
    }
  }

  // Greedy extraction along the continuous state.
  std::vector<std::size_t> choice(horizon);
  std::vector<double> path(horizon);
  double e = spec.initial_soc;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const CostView view = costs.view(t);
    const auto& next = value[t];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = (n_pow - 1) / 2;
    for (std::size_t k = 0; k < n_pow; ++k) {
      const double e_next = e - drains[k];
      if (e_next < -feas_slack || e_next > spec.capacity + feas_slack) continue;
      const double v =
          eval_cost(view, actions[k]) + interpolate_value(next, e_next, soc_step_size, cfg.interpolate);
      if (v < best) {
        best = v;
        best_k = k;
      }
    }
    choice[t - 1] = best_k;
    e -= drains[best_k];
    path[t - 1] = e;
  }

  // Grid polish: swap single-period actions while any swap improves the
  // objective. Only the swapped period's cost and the terminal value change
  // (downstream states shift uniformly), so each candidate is O(1) after a
  // suffix feasibility scan. Removes the value-interpolation noise of the
  // greedy pass and makes single-swap optimality exact.
  for (std::size_t sweep = 0; sweep < 100; ++sweep) {
    bool improved = false;
    for (std::size_t t = 0; t < horizon; ++t) {
      double suffix_min = std::numeric_limits<double>::infinity();
      double suffix_max = -std::numeric_limits<double>::infinity();
      for (std::size_t u = t; u < horizon; ++u) {
        suffix_min = std::min(suffix_min, path[u]);
        suffix_max = std::max(suffix_max, path[u]);
      }
      const CostView view = costs.view(t + 1);
      const std::size_t cur = choice[t];
      const double cur_cost = eval_cost(view, actions[cur]);
      const double tail = eval_terminal(term, path[horizon - 1]);
      double best_delta = -1e-12;
      std::size_t best_k = cur;
      for (std::size_t k = 0; k < n_pow; ++k) {
        if (k == cur) continue;
        const double shift = drains[cur] - drains[k];
        if (suffix_min + shift < -feas_slack || suffix_max + shift > spec.capacity + feas_slack)
          continue;
        const double delta = eval_cost(view, actions[k]) - cur_cost +
                             eval_terminal(term, path[horizon - 1] + shift) - tail;
        if (delta < best_delta) {
          best_delta = delta;
          best_k = k;
        }
      }
      if (best_k != cur) {
        const double shift = drains[cur] - drains[best_k];
        choice[t] = best_k;
        for (std::size_t u = t; u < horizon; ++u) path[u] += shift;
        improved = true;
      }
    }
    if (!improved) break;
  }

  Schedule sched;
  sched.initial_soc = spec.initial_soc;
  sched.controls.reserve(horizon);
  sched.soc.reserve(horizon);
  e = spec.initial_soc;
  double operating = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double p = actions[choice[t - 1]];
    operating += eval_cost(costs.view(t), p);
    const Dispatch d = p >= 0.0 ? Dispatch::of(p, 0.0) : Dispatch::of(0.0, -p);
    e = std::clamp(soc_step(spec, e, d), 0.0, spec.capacity);
    sched.controls.push_back(d);
    sched.soc.push_back(e);
  }
  sched.objective = operating + eval_terminal(term, e);
  return sched;
}

KktReport kkt_residuals(const StorageSpec& spec, const CostSource& costs,
                        const TerminalCost& term, const Schedule& schedule,
                        std::span<const double> theta) {
  const std::size_t horizon = schedule.horizon();
  if (horizon == 0 || schedule.soc.size() != horizon)
    throw std::invalid_argument("schedule is dimensionally inconsistent");
  if (theta.size() != horizon + 1)
    throw std::invalid_argument("dual trace must hold horizon + 1 values");
  if (costs.periods() != horizon)
    throw std::invalid_argument("cost source and schedule horizons differ");

  // Feasibility gate: bounds and dynamics must hold before residuals mean
  // anything.
  double e_prev = schedule.initial_soc;
  if (e_prev < -kFeasTol || e_prev > spec.capacity + kFeasTol)
    throw std::invalid_argument("infeasible schedule: initial state of charge out of range");
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Dispatch& d = schedule.controls[t - 1];
    if (d.discharge < -kFeasTol || d.discharge > spec.power_limit + kFeasTol ||
        d.charge < -kFeasTol || d.charge > spec.power_limit + kFeasTol)
      throw std::invalid_argument("infeasible schedule: power bound violated at period " +
                                  std::to_string(t));
    if (std::abs(d.net - (d.discharge - d.charge)) > kFeasTol)
      throw std::invalid_argument("infeasible schedule: net component mismatch at period " +
                                  std::to_string(t));
    const double e_t = schedule.soc[t - 1];
    if (std::abs(e_t - soc_step(spec, e_prev, d)) > kFeasTol)
      throw std::invalid_argument("infeasible schedule: state dynamics violated at period " +
                                  std::to_string(t));
    if (e_t < -kFeasTol || e_t > spec.capacity + kFeasTol)
      throw std::invalid_argument("infeasible schedule: state bound violated at period " +
                                  std::to_string(t));
    e_prev = e_t;
  }

  ResidualTracker tracker;
  const double eta = spec.efficiency;
  const double power_tol = 1e-9 * std::max(1.0, spec.power_limit);
  const double soc_tol = 1e-7 * std::max(1.0, spec.capacity);

  for (std::size_t t = 1; t <= horizon; ++t) {
    const Dispatch& d = schedule.controls[t - 1];
    const double theta_prev = theta[t - 1];
    const MarginalInterval iv = marginal_interval(costs.view(t), d.net);

    // Discharge component: the implied lower/upper multipliers carry
    // o(net) + theta/eta.
    const double r_lo = iv.lo + theta_prev / eta;
    const double r_hi = iv.hi + theta_prev / eta;
    if (d.discharge > power_tol && d.discharge < spec.power_limit - power_tol) {
      tracker.note(tracker.report.max_stationarity_residual, interval_distance(r_lo, r_hi), t);
    } else if (d.discharge <= power_tol) {
      tracker.note(tracker.report.max_dual_infeasibility, std::max(0.0, -r_hi), t);
    } else {
      tracker.note(tracker.report.max_dual_infeasibility, std::max(0.0, r_lo), t);
    }

    // Charge component: mirrored with the efficiency on the other side.
    const double s_lo = -iv.hi - theta_prev * eta;
    const double s_hi = -iv.lo - theta_prev * eta;
    if (d.charge > power_tol && d.charge < spec.power_limit - power_tol) {
      tracker.note(tracker.report.max_stationarity_residual, interval_distance(s_lo, s_hi), t);
    } else if (d.charge <= power_tol) {
      tracker.note(tracker.report.max_dual_infeasibility, std::max(0.0, -s_hi), t);
    } else {
      tracker.note(tracker.report.max_dual_infeasibility, std::max(0.0, s_lo), t);
    }

    // State transition: the dual may rise only at the capacity bound and
    // fall only at the empty bound; it is constant while interior.
    const double e_t = schedule.soc[t - 1];
    const double dtheta = theta[t] - theta[t - 1];
    if (e_t >= spec.capacity - soc_tol) {
      tracker.note(tracker.report.max_dual_infeasibility, std::max(0.0, -dtheta), t);
    } else if (e_t <= soc_tol) {
      tracker.note(tracker.report.max_dual_infeasibility, std::max(0.0, dtheta), t);
    } else {
      tracker.note(tracker.report.max_complementarity_residual, std::abs(dtheta), t);
    }
  }

  // Terminal condition: theta_T equals the negated terminal marginal.
  const double terminal_residual =
      std::abs(theta[horizon] + terminal_marginal(term, schedule.soc.back()));
  tracker.note(tracker.report.max_stationarity_residual, terminal_residual, horizon);

  return tracker.report;
}

double objective_of(const CostSource& costs, const TerminalCost& term, const Schedule& schedule) {
  const std::size_t horizon = schedule.horizon();
  if (schedule.soc.size() != horizon || costs.periods() != horizon)
    throw std::invalid_argument("schedule is dimensionally inconsistent");
  double total = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    total += eval_cost(costs.view(t), schedule.controls[t - 1].net);
  }
  return total + eval_terminal(term, schedule.soc.back());
}

}  // namespace stordual
