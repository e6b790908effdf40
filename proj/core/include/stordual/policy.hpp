#pragma once

#include <cstddef>
#include <vector>

#include "stordual/cost.hpp"
#include "stordual/storage.hpp"

namespace stordual {

/// Indexed access to the horizon's period costs. Implementations may own the
/// costs or synthesize them on demand; the solver only ever asks for one
/// period at a time, so streamed sources keep its working state constant in
/// the horizon length.
class CostSource {
 public:
  virtual ~CostSource() = default;

  /// Number of periods T (>= 1).
  virtual std::size_t periods() const = 0;

  /// Cost of period t, 1-based.
  virtual CostView view(std::size_t t) const = 0;
};

/// Cost source over a borrowed list of owning cost functions.
class SpanCostSource final : public CostSource {
 public:
  explicit SpanCostSource(std::span<const CostFunction> costs) : costs_(costs) {}

  std::size_t periods() const override { return costs_.size(); }
  CostView view(std::size_t t) const override { return view_of(costs_[t - 1]); }

 private:
  std::span<const CostFunction> costs_;
};

/// Cost source presenting a suffix [start, T] of another source as periods
/// 1..T-start+1. Used to re-solve the remaining horizon from a bound event.
class SuffixCostSource final : public CostSource {
 public:
  SuffixCostSource(const CostSource& base, std::size_t start) : base_(base), start_(start) {}

  std::size_t periods() const override { return base_.periods() - (start_ - 1); }
  CostView view(std::size_t t) const override { return base_.view(start_ - 1 + t); }

 private:
  const CostSource& base_;
  std::size_t start_;
};

/// Closed-form control for one period from a dual guess x: each component is
/// the marginal pseudo-inverse evaluated at its efficiency-scaled dual and
/// saturated to [0, power_limit]. The one-sided variants zero the suppressed
/// component only when the kept one is strictly positive; the clamp makes
/// those zeros exact, so no epsilon enters the comparison.
Dispatch policy_dispatch(const StorageSpec& spec, const CostView& cost, double x,
                         PolicyVariant variant = PolicyVariant::Relaxed);

/// One step of the state-of-charge emulation. Components are applied
/// separately (-discharge/eta + charge*eta) so simultaneous dispatches are
/// accounted exactly; the result is intentionally not clamped to [0, capacity].
double soc_step(const StorageSpec& spec, double sigma_prev, const Dispatch& d);

/// Outcome of a forward policy simulation at a fixed dual guess.
struct SimOutcome {
  enum class Kind { HitUpper, HitLower, Completed };

  Kind kind = Kind::Completed;
  std::size_t stop_period = 0;  // first crossing period, or T when completed
  double sigma_stop = 0.0;      // sigma at stop_period (the violating value on a crossing)
};

/// One recorded simulation step: the dispatch applied and the emulated state
/// of charge after it.
struct SimStep {
  Dispatch control;
  double sigma = 0.0;
};

/// Runs the policy forward from the initial state of charge, stopping at the
/// first period whose emulated state reaches the capacity bound (sigma >=
/// capacity) or the empty bound (sigma <= 0). When `trace` is null the
/// simulation holds a constant amount of state regardless of the horizon; a
/// non-null trace receives every step up to and including the stopping one.
SimOutcome simulate(const StorageSpec& spec, const CostSource& costs, double x,
                    PolicyVariant variant = PolicyVariant::Relaxed,
                    std::vector<SimStep>* trace = nullptr);

}  // namespace stordual
