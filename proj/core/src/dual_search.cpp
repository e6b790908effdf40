#include "stordual/dual_search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

#include "stordual/oracle.hpp"
#include "stordual/parallel.hpp"

namespace stordual {

namespace {

constexpr double kJumpTol = 1e-12;

std::size_t iteration_requirement(double width, double epsilon) {
  if (!(width > epsilon)) return 0;
  return static_cast<std::size_t>(std::ceil(std::log2(width / epsilon)));
}

/// One-sided control that moves the state of charge from e_prev exactly onto
/// `target` (up to rounding): charge when the target lies above, discharge
/// when below.
Dispatch dispatch_landing(const StorageSpec& spec, double e_prev, double target) {
  const double delta = target - e_prev;
  if (delta >= 0.0) {
    const double charge = std::clamp(delta / spec.efficiency, 0.0, spec.power_limit);
    return Dispatch::of(0.0, charge);
  }
  const double discharge = std::clamp(-delta * spec.efficiency, 0.0, spec.power_limit);
  return Dispatch::of(discharge, 0.0);
}

/// Resolves a set-valued control left by a flat marginal segment equal to
/// the dual. When the converged bracket still straddles a policy step, the
/// step period's control is only pinned down by the bound or terminal
/// balance, not by the dual alone: replace it with the one-sided dispatch
/// that lands the balance exactly and recompute the trace. Quadratic costs
/// never step, so they are left alone. Returns true when a step was refined.
bool refine_degenerate_step(const StorageSpec& spec, const CostSource& costs,
                            const TerminalCost& term, double theta, double lo, double hi,
                            PolicyVariant variant, std::vector<SimStep>& trace,
                            SimOutcome& outcome) {
  if (!(lo < hi) || trace.empty()) return false;
  std::size_t step_period = 0;
  for (std::size_t t = 1; t <= trace.size(); ++t) {
    const Dispatch a = policy_dispatch(spec, costs.view(t), lo, variant);
    const Dispatch b = policy_dispatch(spec, costs.view(t), hi, variant);
    if (std::abs(a.net - b.net) > kJumpTol) {
      if (step_period != 0) return false;  // more than one step period
      step_period = t;
    }
  }
  if (step_period == 0) return false;
  if (!std::holds_alternative<PwlView>(costs.view(step_period))) return false;

  double shift = 0.0;
  if (outcome.kind == SimOutcome::Kind::Completed) {
    if (term.kappa <= 0.0) return false;
    const double balance = term.e_ref - (theta + term.slope) / term.kappa;
    if (!(balance > 0.0 && balance < spec.capacity)) return false;
    shift = balance - trace.back().sigma;
  } else {
    if (step_period > outcome.stop_period) return false;  // step beyond the crossing
    const double bound = outcome.kind == SimOutcome::Kind::HitUpper ? spec.capacity : 0.0;
    shift = bound - outcome.sigma_stop;
  }
  const double before = step_period == 1 ? spec.initial_soc : trace[step_period - 2].sigma;
  const double target = trace[step_period - 1].sigma + shift;
  if (!(target >= 0.0 && target <= spec.capacity)) return false;

  const Dispatch refined = dispatch_landing(spec, before, target);
  const MarginalInterval iv = marginal_interval(costs.view(step_period), refined.net);
  const double slack = (hi - lo) + 1e-9 * (1.0 + std::abs(theta));
  const double eta = spec.efficiency;
  if (refined.discharge > 0.0) {
    const double want = -theta / eta;
    if (want < iv.lo - slack || want > iv.hi + slack) return false;
  } else if (refined.charge > 0.0) {
    const double want = -theta * eta;
    if (want < iv.lo - slack || want > iv.hi + slack) return false;
  }

  trace[step_period - 1].control = refined;
  double sigma = spec.initial_soc;
  for (auto& step : trace) {
    sigma = soc_step(spec, sigma, step.control);
    step.sigma = sigma;
  }
  for (std::size_t t = 1; t <= trace.size(); ++t) {
    const double s = trace[t - 1].sigma;
    if (s >= spec.capacity) {
      outcome = SimOutcome{SimOutcome::Kind::HitUpper, t, s};
      trace.resize(t);
      return true;
    }
    if (s <= 0.0) {
      outcome = SimOutcome{SimOutcome::Kind::HitLower, t, s};
      trace.resize(t);
      return true;
    }
  }
  outcome = SimOutcome{SimOutcome::Kind::Completed, trace.size(), trace.back().sigma};
  return true;
}

}  // namespace

DualRange marginal_envelope(const StorageSpec& spec, const CostSource& costs,
                            const TerminalCost& term) {
  const std::size_t horizon = costs.periods();
  if (horizon == 0) throw std::invalid_argument("cost source is empty");
  double operating = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const CostView view = costs.view(t);
    if (const auto* pwl = std::get_if<PwlView>(&view)) {
      if (pwl->breaks.front() > -spec.power_limit || pwl->breaks.back() < spec.power_limit) {
        throw std::domain_error("piecewise-linear cost of period " + std::to_string(t) +
                                " does not cover the power range");
      }
    }
    operating = std::max(operating, max_abs_marginal(view, -spec.power_limit, spec.power_limit));
  }
  const double terminal = std::max(std::abs(terminal_marginal(term, 0.0)),
                                   std::abs(terminal_marginal(term, spec.capacity)));
  const double hi = operating / spec.efficiency + terminal;
  return DualRange{-hi, hi};
}

Classification classify(double x, const SimOutcome& outcome, const TerminalCost& term) {
  switch (outcome.kind) {
    case SimOutcome::Kind::HitUpper:
      return Classification::AboveOrEqual;
    case SimOutcome::Kind::HitLower:
      return Classification::BelowOrEqual;
    case SimOutcome::Kind::Completed:
      break;
  }
  const double balance = -terminal_marginal(term, outcome.sigma_stop);
  if (x > balance) return Classification::AboveOrEqual;
  if (x < balance) return Classification::BelowOrEqual;
  return Classification::Equal;
}

DualSolution solve(const StorageSpec& spec, const CostSource& costs, const TerminalCost& term,
                   const SearchConfig& cfg, PolicyVariant variant) {
  if (!(std::isfinite(cfg.epsilon) && cfg.epsilon > 0.0))
    throw std::invalid_argument("search accuracy must be positive");
  if (costs.periods() == 0) throw std::invalid_argument("cost source is empty");

  DualRange range{0.0, 0.0};
  if (cfg.range.has_value()) {
    range = *cfg.range;
    if (!(std::isfinite(range.lo) && std::isfinite(range.hi) && range.lo < range.hi))
      throw std::invalid_argument("search range must satisfy lo < hi");
  } else {
    range = marginal_envelope(spec, costs, term);
    if (cfg.assume_nonnegative_dual) range.lo = 0.0;
  }

  const std::size_t required = iteration_requirement(range.hi - range.lo, cfg.epsilon);
  if (cfg.max_iterations != 0 && cfg.max_iterations < required + 2) {
    throw std::invalid_argument("iteration cap below the bisection requirement of " +
                                std::to_string(required + 2));
  }
  const std::size_t cap = cfg.max_iterations != 0 ? cfg.max_iterations : required + 2;

  double lo = range.lo;
  double hi = range.hi;
  std::size_t iterations = 0;
  bool equal_exit = false;
  double theta = 0.5 * (lo + hi);
  while (hi - lo >= cfg.epsilon) {
    if (iterations >= cap) {
      throw ConvergenceError("dual search failed to converge within " + std::to_string(cap) +
                             " iterations; bracket [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
    ++iterations;
    const double x = 0.5 * (lo + hi);
    const SimOutcome out = simulate(spec, costs, x, variant, nullptr);
    const Classification c = classify(x, out, term);
    if (c == Classification::Equal) {
      lo = hi = x;
      equal_exit = true;
      break;
    }
    if (c == Classification::AboveOrEqual) {
      hi = x;
    } else {
      lo = x;
    }
  }
  theta = equal_exit ? lo : 0.5 * (lo + hi);

  DualSolution sol;
  sol.theta = theta;
  sol.iterations = iterations;
  sol.bracket = DualRange{lo, hi};

  if (!cfg.collect_prefix) {
    sol.outcome = simulate(spec, costs, theta, variant, nullptr);
    Dispatch first = policy_dispatch(spec, costs.view(1), theta, variant);
    const double sigma1 = soc_step(spec, spec.initial_soc, first);
    if (sigma1 > spec.capacity) {
      first = dispatch_landing(spec, spec.initial_soc, spec.capacity);
      sol.first_control_clamped = true;
    } else if (sigma1 < 0.0) {
      first = dispatch_landing(spec, spec.initial_soc, 0.0);
      sol.first_control_clamped = true;
    }
    sol.first_control = first;
    return sol;
  }

  std::vector<SimStep> trace;
  sol.outcome = simulate(spec, costs, theta, variant, &trace);
  refine_degenerate_first_control(spec, costs, term, theta, lo, hi, variant, trace, sol.outcome);

  const bool crossed = sol.outcome.kind != SimOutcome::Kind::Completed;
  const std::size_t prefix_len = crossed ? trace.size() - 1 : trace.size();
  if (prefix_len >= 1) {
    sol.first_control = trace.front().control;
  } else {
    const double bound =
        sol.outcome.kind == SimOutcome::Kind::HitUpper ? spec.capacity : 0.0;
    if (trace.front().sigma == bound) {
      sol.first_control = trace.front().control;  // exact touch needs no adjustment
    } else {
      sol.first_control = dispatch_landing(spec, spec.initial_soc, bound);
      sol.first_control_clamped = true;
    }
  }
  trace.resize(prefix_len);
  sol.prefix = std::move(trace);
  return sol;
}

BoundsResult solve_bounds(const StorageSpec& spec, const CostSource& costs,
                          const TerminalCost& term, const SearchConfig& cfg) {
  DualSolution charge_pref;
  DualSolution discharge_pref;
  if (worker_limit() >= 2) {
    auto future = std::async(std::launch::async, [&] {
      return solve(spec, costs, term, cfg, PolicyVariant::ChargePreferring);
    });
    discharge_pref = solve(spec, costs, term, cfg, PolicyVariant::DischargePreferring);
    charge_pref = future.get();
  } else {
    charge_pref = solve(spec, costs, term, cfg, PolicyVariant::ChargePreferring);
    discharge_pref = solve(spec, costs, term, cfg, PolicyVariant::DischargePreferring);
  }

  BoundsResult bounds;
  // The charge-preferring trace is the highest state-of-charge path any
  // charge-status assignment can produce, so its balanced dual is the lowest;
  // the discharge-preferring search bounds from above. Control bounds are
  // evaluated at the opposite dual bound because the dual-to-net map is
  // decreasing.
  bounds.theta_lo = charge_pref.theta;
  bounds.theta_hi = discharge_pref.theta;
  bounds.p_lo =
      policy_dispatch(spec, costs.view(1), bounds.theta_hi, PolicyVariant::ChargePreferring).net;
  bounds.p_hi = policy_dispatch(spec, costs.view(1), bounds.theta_lo,
                                PolicyVariant::DischargePreferring)
                    .net;
  bounds.charge_preferring = std::move(charge_pref);
  bounds.discharge_preferring = std::move(discharge_pref);
  return bounds;
}

std::optional<Dispatch> warm_control(const DualSolution& prev, std::size_t t) {
  if (t == 0) throw std::invalid_argument("periods are 1-based");
  if (t <= prev.prefix.size()) return prev.prefix[t - 1].control;
  return std::nullopt;
}

Schedule solve_horizon(const StorageSpec& spec, const CostSource& costs, const TerminalCost& term,
                       const SearchConfig& cfg, PolicyVariant variant) {
  const std::size_t horizon = costs.periods();
  if (horizon == 0) throw std::invalid_argument("cost source is empty");

  SearchConfig inner = cfg;
  inner.collect_prefix = true;

  Schedule sched;
  sched.initial_soc = spec.initial_soc;
  sched.controls.reserve(horizon);
  sched.soc.reserve(horizon);
  sched.theta.reserve(horizon + 1);

  double state = spec.initial_soc;
  std::size_t t = 1;
  while (t <= horizon) {
    const SuffixCostSource rest(costs, t);
    const StorageSpec sub(spec.power_limit, spec.capacity, spec.efficiency, state);
    const DualSolution sol = solve(sub, rest, term, inner, variant);
    if (sol.prefix.empty()) {
      // Bound event at the very first remaining period: commit the control
      // that lands exactly on the bound and continue from there.
      const double bound =
          sol.outcome.kind == SimOutcome::Kind::HitUpper ? spec.capacity : 0.0;
      sched.controls.push_back(sol.first_control);
      sched.soc.push_back(bound);
      sched.theta.push_back(sol.theta);
      state = bound;
      ++t;
    } else {
      for (const SimStep& step : sol.prefix) {
        sched.controls.push_back(step.control);
        sched.soc.push_back(step.sigma);
        sched.theta.push_back(sol.theta);
      }
      state = sol.prefix.back().sigma;
      t += sol.prefix.size();
    }
  }

  const double final_soc = sched.soc.back();
  const bool interior = final_soc > 0.0 && final_soc < spec.capacity;
  sched.theta.push_back(interior ? sched.theta.back() : -terminal_marginal(term, final_soc));
  sched.objective = objective_of(costs, term, sched);
  return sched;
}

}  // namespace stordual
