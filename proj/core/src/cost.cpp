#include "stordual/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stordual {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// 0-based segment index covering p; the interval convention is half-open
// [q_{j-1}, q_j) except that the domain upper end belongs to the last segment.
std::size_t segment_index(const PwlView& c, double p) {
  if (!(p >= c.breaks.front() && p <= c.breaks.back())) {
    throw std::domain_error("piecewise-linear cost evaluated at p=" + std::to_string(p) +
                            " outside domain [" + std::to_string(c.breaks.front()) + ", " +
                            std::to_string(c.breaks.back()) + "]");
  }
  const auto it = std::upper_bound(c.breaks.begin() + 1, c.breaks.end(), p);
  const auto idx = static_cast<std::size_t>(it - (c.breaks.begin() + 1));
  return std::min(idx, c.marginals.size() - 1);
}

}  // namespace

QuadraticCost::QuadraticCost(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
  require(std::isfinite(alpha) && std::isfinite(beta), "quadratic cost parameters must be finite");
  require(alpha > 0.0, "quadratic cost requires alpha > 0");
}

PiecewiseLinearCost::PiecewiseLinearCost(std::vector<double> breaks, std::vector<double> marginals)
    : breaks_(std::move(breaks)), marginals_(std::move(marginals)) {
  require(!marginals_.empty(), "piecewise-linear cost requires at least one segment");
  require(breaks_.size() == marginals_.size() + 1,
          "piecewise-linear cost requires one more breakpoint than segments");
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    require(std::isfinite(breaks_[i]), "piecewise-linear breakpoints must be finite");
    if (i > 0) require(breaks_[i] > breaks_[i - 1], "breakpoints must be strictly increasing");
  }
  for (std::size_t j = 0; j < marginals_.size(); ++j) {
    require(std::isfinite(marginals_[j]), "piecewise-linear marginals must be finite");
    if (j > 0) require(marginals_[j] >= marginals_[j - 1], "marginals must be non-decreasing");
  }
  cumulative_.resize(breaks_.size());
  cumulative_[0] = 0.0;
  for (std::size_t j = 0; j < marginals_.size(); ++j) {
    cumulative_[j + 1] = cumulative_[j] + marginals_[j] * (breaks_[j + 1] - breaks_[j]);
  }
}

TerminalCost::TerminalCost(double kappa_, double e_ref_, double slope_)
    : kappa(kappa_), e_ref(e_ref_), slope(slope_) {
  require(std::isfinite(kappa) && std::isfinite(e_ref) && std::isfinite(slope),
          "terminal cost parameters must be finite");
  require(kappa >= 0.0, "terminal cost requires kappa >= 0");
}

PwlView view_of(const PiecewiseLinearCost& cost) {
  return PwlView{cost.breaks(), cost.marginals(), cost.cumulative()};
}

CostView view_of(const CostFunction& cost) {
  if (const auto* quad = std::get_if<QuadraticCost>(&cost)) return *quad;
  return view_of(std::get<PiecewiseLinearCost>(cost));
}

double eval_cost(const CostView& cost, double p) {
  if (const auto* quad = std::get_if<QuadraticCost>(&cost)) {
    const double d = p - quad->beta;
    return 0.5 * quad->alpha * d * d;
  }
  const auto& pwl = std::get<PwlView>(cost);
  const std::size_t j = segment_index(pwl, p);
  return pwl.cumulative[j] + pwl.marginals[j] * (p - pwl.breaks[j]);
}

double marginal(const CostView& cost, double p) {
  if (const auto* quad = std::get_if<QuadraticCost>(&cost)) return quad->alpha * (p - quad->beta);
  const auto& pwl = std::get<PwlView>(cost);
  return pwl.marginals[segment_index(pwl, p)];
}

MarginalInterval marginal_interval(const CostView& cost, double p) {
  if (const auto* quad = std::get_if<QuadraticCost>(&cost)) {
    const double m = quad->alpha * (p - quad->beta);
    return {m, m};
  }
  const auto& pwl = std::get<PwlView>(cost);
  const std::size_t j = segment_index(pwl, p);
  double lo = pwl.marginals[j];
  double hi = pwl.marginals[j];
  if (j > 0 && p == pwl.breaks[j]) lo = pwl.marginals[j - 1];
  if (j + 1 < pwl.marginals.size() && p == pwl.breaks[j + 1]) hi = pwl.marginals[j + 1];
  return {lo, hi};
}

double inverse_marginal(const CostView& cost, double x) {
  if (const auto* quad = std::get_if<QuadraticCost>(&cost)) return quad->beta + x / quad->alpha;
  const auto& pwl = std::get<PwlView>(cost);
  // Number of segments with marginal <= x; their shared upper breakpoint is
  // the sup of the qualifying set.
  const auto it = std::upper_bound(pwl.marginals.begin(), pwl.marginals.end(), x);
  const auto k = static_cast<std::size_t>(it - pwl.marginals.begin());
  return pwl.breaks[k];
}

double terminal_marginal(const TerminalCost& term, double e) {
  return term.kappa * (e - term.e_ref) + term.slope;
}

double eval_terminal(const TerminalCost& term, double e) {
  const double d = e - term.e_ref;
  return 0.5 * term.kappa * d * d + term.slope * e;
}

double max_abs_marginal(const CostView& cost, double lo, double hi) {
  if (const auto* quad = std::get_if<QuadraticCost>(&cost)) {
    return std::max(std::abs(quad->alpha * (lo - quad->beta)),
                    std::abs(quad->alpha * (hi - quad->beta)));
  }
  const auto& pwl = std::get<PwlView>(cost);
  const std::size_t j_lo = segment_index(pwl, lo);
  const std::size_t j_hi = segment_index(pwl, hi);
  double best = 0.0;
  for (std::size_t j = j_lo; j <= j_hi; ++j) {
    best = std::max(best, std::abs(pwl.marginals[j]));
  }
  return best;
}

}  // namespace stordual
