#include "stordual/cost.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "stordual/rng.hpp"

using namespace stordual;

namespace {

PiecewiseLinearCost three_step() {
  // Marginal 1 on [-1, 0), 3 on [0, 0.5), 5 on [0.5, 1].
  return PiecewiseLinearCost({-1.0, 0.0, 0.5, 1.0}, {1.0, 3.0, 5.0});
}

}  // namespace

TEST_CASE("quadratic cost value and validation") {
  const QuadraticCost q(1.0, 0.0);
  CHECK(eval_cost(q, 2.0) == doctest::Approx(2.0));
  CHECK(eval_cost(q, 0.0) == 0.0);
  CHECK_THROWS_AS(QuadraticCost(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticCost(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticCost(std::nan(""), 1.0), std::invalid_argument);
}

TEST_CASE("piecewise-linear cost integrates its step marginal from the domain floor") {
  const PiecewiseLinearCost pwl({-1.0, 0.0, 1.0}, {1.0, 3.0});
  CHECK(eval_cost(view_of(pwl), 0.5) == doctest::Approx(2.5));
  CHECK(eval_cost(view_of(pwl), -1.0) == 0.0);
  CHECK_THROWS_AS(eval_cost(view_of(pwl), 1.5), std::domain_error);
  CHECK_THROWS_AS(eval_cost(view_of(pwl), -1.0000001), std::domain_error);
}

TEST_CASE("piecewise-linear construction rejects broken shapes") {
  CHECK_THROWS_AS(PiecewiseLinearCost({-1.0, 0.0, 1.0}, {3.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCost({-1.0, 1.0, 0.5}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCost({-1.0, 1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearCost({-1.0, 0.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("marginal is right-continuous at breakpoints") {
  CHECK(marginal(CostView(QuadraticCost(2.0, -1.0)), 0.0) == doctest::Approx(2.0));
  const auto pwl = three_step();
  const CostView v = view_of(pwl);
  CHECK(marginal(v, 0.0) == 3.0);
  CHECK(marginal(v, -0.5) == 1.0);
  CHECK(marginal(v, -1.0) == 1.0);
  CHECK(marginal(v, 1.0) == 5.0);  // domain end takes the last segment
}

TEST_CASE("marginal interval is one-sided at breakpoints") {
  const auto pwl = three_step();
  const CostView v = view_of(pwl);
  auto iv = marginal_interval(v, 0.5);
  CHECK(iv.lo == 3.0);
  CHECK(iv.hi == 5.0);
  iv = marginal_interval(v, 0.25);
  CHECK(iv.lo == 3.0);
  CHECK(iv.hi == 3.0);
  iv = marginal_interval(v, -1.0);
  CHECK(iv.lo == 1.0);
  CHECK(iv.hi == 1.0);
  iv = marginal_interval(v, 1.0);
  CHECK(iv.lo == 5.0);
  CHECK(iv.hi == 5.0);
}

TEST_CASE("inverse marginal follows the sup convention") {
  CHECK(inverse_marginal(CostView(QuadraticCost(2.0, 0.0)), 4.0) == doctest::Approx(2.0));
  const auto pwl = three_step();
  const CostView v = view_of(pwl);
  CHECK(inverse_marginal(v, 3.0) == 0.5);
  CHECK(inverse_marginal(v, 0.0) == -1.0);  // nothing qualifies: domain floor
  CHECK(inverse_marginal(v, 10.0) == 1.0);  // everything qualifies: domain end
  CHECK(inverse_marginal(v, 1.0) == 0.0);
  CHECK(inverse_marginal(v, 2.9999) == 0.0);
}

TEST_CASE("terminal cost marginal and value") {
  const TerminalCost term(1.0, 4.0);
  CHECK(terminal_marginal(term, 3.0) == doctest::Approx(-1.0));
  CHECK(terminal_marginal(term, 4.0) == 0.0);
  CHECK(eval_terminal(term, 3.0) == doctest::Approx(0.5));
  CHECK(eval_terminal(term, 2.0) == doctest::Approx(2.0));
  const TerminalCost flat(0.0, 0.0, 0.0);
  CHECK(terminal_marginal(flat, 123.0) == 0.0);
  CHECK_THROWS_AS(TerminalCost(-1.0, 0.0), std::invalid_argument);
  CHECK(TerminalCost(0.0, 0.0, -2.5).slope == -2.5);  // linear-only valuation allowed
}

TEST_CASE("max abs marginal over the power range") {
  CHECK(max_abs_marginal(CostView(QuadraticCost(1.0, 0.0)), -1.0, 1.0) == doctest::Approx(1.0));
  CHECK(max_abs_marginal(view_of(three_step()), -1.0, 1.0) == 5.0);
  CHECK(max_abs_marginal(CostView(QuadraticCost(2.0, -3.0)), -1.0, 1.0) == doctest::Approx(8.0));
}

namespace {

CostFunction random_cost(const SplitMix64& rng, std::uint64_t base) {
  if (rng.bits(base) % 2 == 0) {
    return QuadraticCost(rng.uniform(base + 1, 1e-3, 10.0), rng.uniform(base + 2, -10.0, 10.0));
  }
  const std::size_t segments = 1 + rng.bits(base + 1) % 6;
  std::vector<double> marginals(segments);
  std::vector<double> breaks(segments + 1);
  for (std::size_t j = 0; j < segments; ++j)
    marginals[j] = rng.uniform(base + 2 + j, -20.0, 20.0);
  std::sort(marginals.begin(), marginals.end());
  breaks.front() = -3.0;
  breaks.back() = 3.0;
  for (std::size_t j = 0; j + 1 < segments; ++j)
    breaks[j + 1] = rng.uniform(base + 10 + j, -3.0, 3.0);
  std::sort(breaks.begin() + 1, breaks.end() - 1);
  for (std::size_t j = 1; j < segments; ++j)
    breaks[j] = std::max(breaks[j], breaks[j - 1] + 1e-9);
  return PiecewiseLinearCost(std::move(breaks), std::move(marginals));
}

}  // namespace

TEST_CASE("marginal is non-decreasing for every constructible cost") {
  const SplitMix64 rng(7);
  for (std::uint64_t i = 0; i < 300; ++i) {
    const CostFunction cost = random_cost(rng, i * 100);
    const CostView v = view_of(cost);
    const double a = rng.uniform(i * 100 + 50, -3.0, 3.0);
    const double b = rng.uniform(i * 100 + 51, -3.0, 3.0);
    const double p1 = std::min(a, b);
    const double p2 = std::max(a, b);
    CHECK(marginal(v, p1) <= marginal(v, p2));
  }
}

TEST_CASE("pseudo-inverse consistency against the marginal") {
  const SplitMix64 rng(11);
  for (std::uint64_t i = 0; i < 300; ++i) {
    const CostFunction cost = random_cost(rng, i * 100);
    const CostView v = view_of(cost);
    const double x = rng.uniform(i * 100 + 60, -25.0, 25.0);
    const double phi = inverse_marginal(v, x);
    // Below the pseudo-inverse the marginal cannot exceed x; above it must.
    const double below = rng.uniform(i * 100 + 61, -3.0, std::min(phi, 3.0));
    if (below >= -3.0 && below < phi) CHECK(marginal(v, below) <= x);
    const double above = rng.uniform(i * 100 + 62, std::max(phi, -3.0), 3.0);
    if (above <= 3.0 && above > phi) CHECK(marginal(v, above) > x);
    // The attained marginal at the sup itself stays within x on its left
    // side; quadratic costs get rounding slack for the division round trip.
    if (phi >= -3.0 && phi <= 3.0 && phi > -3.0) {
      CHECK(marginal_interval(v, phi).lo <= x + 1e-9 * (1.0 + std::abs(x)));
    }
    // Monotone in x.
    const double x2 = x + rng.uniform(i * 100 + 63, 0.0, 5.0);
    CHECK(inverse_marginal(v, x2) >= phi);
  }
}

TEST_CASE("quadratic marginal round trip is exact to relative 1e-12") {
  const SplitMix64 rng(13);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const QuadraticCost q(rng.uniform(3 * i, 1e-3, 10.0), rng.uniform(3 * i + 1, -10.0, 10.0));
    const double p = rng.uniform(3 * i + 2, -5.0, 5.0);
    const double back = inverse_marginal(CostView(q), marginal(CostView(q), p));
    CHECK(back == doctest::Approx(p).epsilon(1e-12));
  }
}
