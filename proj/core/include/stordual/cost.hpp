#pragma once

#include <span>
#include <variant>
#include <vector>

namespace stordual {

/// One period's operating cost O(p) = alpha/2 * (p - beta)^2 for a dispatch
/// p (positive = discharge). The marginal cost is alpha * (p - beta).
struct QuadraticCost {
  double alpha;  // curvature, > 0
  double beta;   // dispatch with zero marginal cost

  QuadraticCost(double alpha_, double beta_);
};

/// Convex piecewise-linear operating cost given by its step-function
/// marginal: segment j (1-based) spans [q_{j-1}, q_j) at marginal c_j, with
/// q_0 the domain lower bound. Marginals are non-decreasing and breakpoints
/// strictly increasing. The cost value is anchored at O(q_0) = 0; only cost
/// differences matter to the optimizer.
class PiecewiseLinearCost {
 public:
  /// `breaks` holds q_0 < q_1 < ... < q_J, `marginals` holds c_1..c_J.
  PiecewiseLinearCost(std::vector<double> breaks, std::vector<double> marginals);

  std::span<const double> breaks() const { return breaks_; }
  std::span<const double> marginals() const { return marginals_; }
  std::span<const double> cumulative() const { return cumulative_; }
  double domain_lo() const { return breaks_.front(); }
  double domain_hi() const { return breaks_.back(); }
  std::size_t segments() const { return marginals_.size(); }

 private:
  std::vector<double> breaks_;      // q_0..q_J
  std::vector<double> marginals_;   // c_1..c_J, non-decreasing
  std::vector<double> cumulative_;  // O at each breakpoint, cumulative_[0] = 0
};

/// Non-owning view of a piecewise-linear cost; cheap to copy into hot loops.
struct PwlView {
  std::span<const double> breaks;
  std::span<const double> marginals;
  std::span<const double> cumulative;
};

/// A period cost as consumed by the solver. QuadraticCost is self-contained;
/// PwlView aliases storage owned elsewhere (scenario or cost source).
using CostView = std::variant<QuadraticCost, PwlView>;

/// Owning cost representation used by scenarios.
using CostFunction = std::variant<QuadraticCost, PiecewiseLinearCost>;

CostView view_of(const CostFunction& cost);
PwlView view_of(const PiecewiseLinearCost& cost);

/// Convex terminal valuation of the end state of charge:
/// C(e) = kappa/2 * (e - e_ref)^2 + slope * e, with derivative
/// kappa * (e - e_ref) + slope.
struct TerminalCost {
  double kappa = 0.0;  // curvature, >= 0
  double e_ref = 0.0;  // reference state of charge
  double slope = 0.0;  // optional linear term

  TerminalCost() = default;
  TerminalCost(double kappa_, double e_ref_, double slope_ = 0.0);
};

/// Closed interval of marginal values; collapses to a point away from
/// piecewise-linear breakpoints.
struct MarginalInterval {
  double lo;
  double hi;
};

/// O(p). Piecewise-linear costs reject p outside their domain.
double eval_cost(const CostView& cost, double p);

/// Right-continuous marginal o(p): at a breakpoint the segment to the right
/// applies; at the domain upper end the last segment's marginal applies.
double marginal(const CostView& cost, double p);

/// One-sided marginal interval [left limit, right value] at p. Used for
/// stationarity checks where the marginal is set-valued.
MarginalInterval marginal_interval(const CostView& cost, double p);

/// Pseudo-inverse of the marginal: the largest domain point whose marginal
/// does not exceed x (sup convention). Returns the domain lower bound when no
/// point qualifies and the upper bound when all do, keeping arithmetic
/// finite. O(log J) for piecewise-linear costs.
double inverse_marginal(const CostView& cost, double x);

/// Derivative of the terminal cost at e.
double terminal_marginal(const TerminalCost& term, double e);

/// Terminal cost value at e.
double eval_terminal(const TerminalCost& term, double e);

/// Largest |o(p)| over p in [lo, hi]; the interval must lie in the domain.
double max_abs_marginal(const CostView& cost, double lo, double hi);

}  // namespace stordual
