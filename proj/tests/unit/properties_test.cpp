#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stordual/dual_search.hpp"
#include "stordual/policy.hpp"
#include "stordual/rng.hpp"
#include "stordual/scenario.hpp"

using namespace stordual;

namespace {

CostFunction random_cost(const SplitMix64& rng, std::uint64_t base) {
  if (rng.bits(base) % 3 != 0) {
    return QuadraticCost(rng.uniform(base + 1, 1e-3, 10.0), rng.uniform(base + 2, -10.0, 10.0));
  }
  const std::size_t segments = 1 + rng.bits(base + 1) % 5;
  std::vector<double> marginals(segments);
  std::vector<double> breaks(segments + 1);
  for (std::size_t j = 0; j < segments; ++j)
    marginals[j] = rng.uniform(base + 2 + j, -15.0, 15.0);
  std::sort(marginals.begin(), marginals.end());
  breaks.front() = -4.0;
  breaks.back() = 4.0;
  for (std::size_t j = 0; j + 1 < segments; ++j)
    breaks[j + 1] = rng.uniform(base + 10 + j, -4.0, 4.0);
  std::sort(breaks.begin() + 1, breaks.end() - 1);
  for (std::size_t j = 1; j < segments; ++j)
    breaks[j] = std::max(breaks[j], breaks[j - 1] + 1e-9);
  return PiecewiseLinearCost(std::move(breaks), std::move(marginals));
}

}  // namespace

TEST_CASE("nonnegative duals imply exactly complementary components") {
  const SplitMix64 rng(101);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const std::uint64_t base = i * 64;
    const CostFunction cost = random_cost(rng, base);
    const double eta = rng.uniform(base + 40, 1e-3, 1.0);
    const double x = rng.uniform(base + 41, 0.0, 30.0);
    const StorageSpec spec(1.0, 4.0, eta, 2.0);
    const Dispatch d = policy_dispatch(spec, view_of(cost), x);
    CHECK(d.discharge * d.charge == 0.0);
  }
}

TEST_CASE("net dispatch is non-increasing in the dual under every variant") {
  const SplitMix64 rng(202);
  const PolicyVariant variants[] = {PolicyVariant::Relaxed, PolicyVariant::ChargePreferring,
                                    PolicyVariant::DischargePreferring};
  for (std::uint64_t i = 0; i < 1500; ++i) {
    const std::uint64_t base = i * 64;
    const CostFunction cost = random_cost(rng, base);
    const double eta = rng.uniform(base + 40, 0.05, 1.0);
    const StorageSpec spec(1.0, 4.0, eta, 2.0);
    const double a = rng.uniform(base + 41, -30.0, 30.0);
    const double b = rng.uniform(base + 42, -30.0, 30.0);
    const double x1 = std::min(a, b);
    const double x2 = std::max(a, b);
    for (const PolicyVariant v : variants) {
      const double n1 = policy_dispatch(spec, view_of(cost), x1, v).net;
      const double n2 = policy_dispatch(spec, view_of(cost), x2, v).net;
      CHECK(n1 >= n2);
    }
  }
}

TEST_CASE("variant nets are ordered and coincide on one-sided dispatches") {
  const SplitMix64 rng(303);
  for (std::uint64_t i = 0; i < 1500; ++i) {
    const std::uint64_t base = i * 64;
    const CostFunction cost = random_cost(rng, base);
    const double eta = rng.uniform(base + 40, 0.05, 1.0);
    const StorageSpec spec(1.0, 4.0, eta, 2.0);
    const double x = rng.uniform(base + 41, -30.0, 30.0);
    const Dispatch relaxed = policy_dispatch(spec, view_of(cost), x, PolicyVariant::Relaxed);
    const double nc = policy_dispatch(spec, view_of(cost), x, PolicyVariant::ChargePreferring).net;
    const double nd =
        policy_dispatch(spec, view_of(cost), x, PolicyVariant::DischargePreferring).net;
    CHECK(nc <= relaxed.net);
    CHECK(relaxed.net <= nd);
    if (relaxed.discharge * relaxed.charge == 0.0) {
      CHECK(nc == relaxed.net);
      CHECK(nd == relaxed.net);
    }
  }
}

TEST_CASE("the emulated state is monotone in the dual and classifications never invert") {
  const SplitMix64 rng(404);
  for (std::uint64_t i = 0; i < 300; ++i) {
    const std::uint64_t scenario_seed = rng.bits(i * 8);
    const std::size_t horizon = 4 + rng.bits(i * 8 + 1) % 12;
    const Scenario scen = (i % 2 == 0)
                              ? generate_quadratic(scenario_seed, horizon)
                              : generate_pwl(scenario_seed, horizon,
                                             PwlFamilyOptions{8, -20.0, 0.0, 10.0});
    const SpanCostSource source = scen.source();
    const double a = rng.uniform(i * 8 + 2, -30.0, 30.0);
    const double b = rng.uniform(i * 8 + 3, -30.0, 30.0);
    const double x1 = std::min(a, b);
    const double x2 = std::max(a, b);

    std::vector<SimStep> t1;
    std::vector<SimStep> t2;
    const SimOutcome o1 = simulate(scen.storage, source, x1, PolicyVariant::Relaxed, &t1);
    const SimOutcome o2 = simulate(scen.storage, source, x2, PolicyVariant::Relaxed, &t2);
    const std::size_t shared = std::min(t1.size(), t2.size());
    for (std::size_t t = 0; t < shared; ++t) {
      CHECK(t1[t].sigma <= t2[t].sigma);
    }
    const Classification c1 = classify(x1, o1, scen.terminal);
    const Classification c2 = classify(x2, o2, scen.terminal);
    const bool inverted =
        c1 == Classification::AboveOrEqual && c2 == Classification::BelowOrEqual;
    CHECK_FALSE(inverted);
  }
}

TEST_CASE("a simultaneous dispatch strictly burns stored energy") {
  const SplitMix64 rng(505);
  for (std::uint64_t i = 0; i < 500; ++i) {
    const double eta = rng.uniform(3 * i, 0.05, 0.999);
    const double level = rng.uniform(3 * i + 1, 0.0, 4.0);
    const double both = rng.uniform(3 * i + 2, 1e-6, 1.0);
    const StorageSpec spec(1.0, 4.0, eta, 2.0);
    const double after = soc_step(spec, level, Dispatch::of(both, both));
    CHECK(after < level);
    CHECK(after == doctest::Approx(level - both * (1.0 / eta - eta)).epsilon(1e-12));
  }
}

TEST_CASE("final brackets keep their classification invariant") {
  const SplitMix64 rng(606);
  for (std::uint64_t i = 0; i < 60; ++i) {
    const Scenario scen = generate_quadratic(rng.bits(i), 10);
    const SpanCostSource source = scen.source();
    const DualSolution sol = solve(scen.storage, source, scen.terminal);
    const auto at = [&](double x) {
      return classify(x, simulate(scen.storage, source, x), scen.terminal);
    };
    CHECK(at(sol.bracket.lo) != Classification::AboveOrEqual);
    CHECK(at(sol.bracket.hi) != Classification::BelowOrEqual);
  }
}

TEST_CASE("iteration counts respect the bisection bound") {
  const SplitMix64 rng(707);
  for (std::uint64_t i = 0; i < 60; ++i) {
    const Scenario scen = generate_quadratic(rng.bits(i), 16);
    const SpanCostSource source = scen.source();
    const DualRange range = marginal_envelope(scen.storage, source, scen.terminal);
    const SearchConfig cfg;
    const DualSolution sol = solve(scen.storage, source, scen.terminal, cfg);
    const double width = range.hi - range.lo;
    const auto bound =
        static_cast<std::size_t>(std::ceil(std::log2(width / cfg.epsilon))) + 1;
    CHECK(sol.iterations <= bound);
  }
}
