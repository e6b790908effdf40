#include "stordual/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "stordual/rng.hpp"

namespace stordual {

namespace {

using nlohmann::json;

constexpr int kScenarioVersion = 1;
constexpr const char* kRngName = "splitmix64";

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

const json& field(const json& j, const char* name, const std::string& where) {
  const auto it = j.find(name);
  if (it == j.end()) fail("missing field: " + where + name);
  return *it;
}

double number(const json& j, const char* name, const std::string& where) {
  const json& v = field(j, name, where);
  if (!v.is_number()) fail("field is not a number: " + where + name);
  return v.get<double>();
}

}  // namespace

StorageSpec default_storage() { return StorageSpec(1.0, 4.0, 0.92, 2.0); }

TerminalCost default_terminal() { return TerminalCost(1.0, 4.0, 0.0); }

Scenario generate_quadratic(std::uint64_t seed, std::size_t horizon,
                            const QuadraticFamilyOptions& opt) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least one period");
  const double alpha_lo = std::max(opt.alpha_lo, 1e-3);
  if (!(alpha_lo <= opt.alpha_hi))
    throw std::invalid_argument("curvature range is empty after the positivity clip");
  if (!(opt.beta_lo <= opt.beta_hi)) throw std::invalid_argument("target range is empty");

  const SplitMix64 rng(seed);
  Scenario scenario{default_storage(), default_terminal(), {}, seed, "quadratic-tracking"};
  scenario.costs.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double alpha = rng.uniform(2 * t, alpha_lo, opt.alpha_hi);
    const double beta = rng.uniform(2 * t + 1, opt.beta_lo, opt.beta_hi);
    scenario.costs.emplace_back(QuadraticCost(alpha, beta));
  }
  return scenario;
}

Scenario generate_pwl(std::uint64_t seed, std::size_t horizon, const PwlFamilyOptions& opt) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least one period");
  if (opt.segments == 0) throw std::invalid_argument("at least one segment is required");
  if (!(opt.marginal_lo <= opt.marginal_hi)) throw std::invalid_argument("marginal range is empty");

  const SplitMix64 rng(seed);
  Scenario scenario{default_storage(), default_terminal(), {}, seed, "pwl-dispatch"};
  if (!(opt.demand_span >= scenario.storage.power_limit))
    throw std::invalid_argument("demand span must cover the power range");

  const double span = opt.demand_span;
  const double separation = 1e-9 * span;
  const std::size_t j = opt.segments;
  scenario.costs.reserve(horizon);
  std::vector<double> marginals(j);
  std::vector<double> breaks(j + 1);
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::uint64_t base = static_cast<std::uint64_t>(t) * (2 * j);
    for (std::size_t k = 0; k < j; ++k) {
      marginals[k] = rng.uniform(base + k, opt.marginal_lo, opt.marginal_hi);
    }
    std::sort(marginals.begin(), marginals.end());
    breaks.front() = -span;
    breaks.back() = span;
    for (std::size_t k = 0; k + 1 < j; ++k) {
      breaks[k + 1] = rng.uniform(base + j + k, -span, span);
    }
    std::sort(breaks.begin() + 1, breaks.end() - 1);
    for (std::size_t k = 1; k < j; ++k) {
      breaks[k] = std::max(breaks[k], breaks[k - 1] + separation);
    }
    if (j > 1 && breaks[j - 1] >= span)
      throw std::runtime_error("breakpoint separation exhausted the demand span");
    scenario.costs.emplace_back(PiecewiseLinearCost(breaks, marginals));
  }
  return scenario;
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("scenario parse error in " + path.string() + ": " + e.what());
  }

  const int version = static_cast<int>(number(j, "version", ""));
  if (version != kScenarioVersion)
    fail("unsupported scenario version " + std::to_string(version));

  const json& js = field(j, "storage", "");
  StorageSpec storage = [&] {
    try {
      return StorageSpec(number(js, "P", "storage."), number(js, "E", "storage."),
                         number(js, "eta", "storage."), number(js, "e0", "storage."));
    } catch (const std::invalid_argument& e) {
      fail("invalid storage parameters: " + std::string(e.what()));
    }
  }();

  const json& jt = field(j, "terminal", "");
  TerminalCost terminal = [&] {
    try {
      return TerminalCost(number(jt, "kappa", "terminal."), number(jt, "e_ref", "terminal."),
                          number(jt, "slope", "terminal."));
    } catch (const std::invalid_argument& e) {
      fail("invalid terminal cost: " + std::string(e.what()));
    }
  }();

  Scenario scenario{storage, terminal, {}, 0, "custom"};
  scenario.seed = field(j, "seed", "").get<std::uint64_t>();
  scenario.family = field(j, "family", "").get<std::string>();

  const auto horizon = static_cast<std::size_t>(number(j, "T", ""));
  const json& costs = field(j, "costs", "");
  if (!costs.is_array()) fail("field is not an array: costs");
  if (costs.size() != horizon) fail("field T does not match the number of costs");
  if (horizon == 0) fail("scenario requires at least one period");

  scenario.costs.reserve(horizon);
  for (std::size_t t = 0; t < costs.size(); ++t) {
    const json& jc = costs[t];
    const std::string where = "costs[" + std::to_string(t) + "].";
    const std::string type = field(jc, "type", where).get<std::string>();
    try {
      if (type == "quad") {
        scenario.costs.emplace_back(
            QuadraticCost(number(jc, "alpha", where), number(jc, "beta", where)));
      } else if (type == "pwl") {
        const double q_lo = number(jc, "q_lo", where);
        const json& segments = field(jc, "segments", where);
        if (!segments.is_array() || segments.empty())
          fail("field is not a non-empty array: " + where + "segments");
        std::vector<double> marginals;
        std::vector<double> breaks;
        marginals.reserve(segments.size());
        breaks.reserve(segments.size() + 1);
        breaks.push_back(q_lo);
        for (const json& seg : segments) {
          if (!seg.is_array() || seg.size() != 2 || !seg[0].is_number() || !seg[1].is_number())
            fail("segment is not a [c, q] pair in " + where + "segments");
          marginals.push_back(seg[0].get<double>());
          breaks.push_back(seg[1].get<double>());
        }
        scenario.costs.emplace_back(PiecewiseLinearCost(std::move(breaks), std::move(marginals)));
      } else {
        fail("unknown cost type: " + type);
      }
    } catch (const std::invalid_argument& e) {
      fail("invalid cost at " + where + ": " + e.what());
    }
    if (const auto* pwl = std::get_if<PiecewiseLinearCost>(&scenario.costs.back())) {
      if (pwl->domain_lo() > -storage.power_limit || pwl->domain_hi() < storage.power_limit)
        fail("piecewise-linear domain does not cover the power range at " + where);
    }
  }
  return scenario;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  json j;
  j["version"] = kScenarioVersion;
  j["rng"] = kRngName;
  j["family"] = scenario.family;
  j["seed"] = scenario.seed;
  j["storage"] = {{"P", scenario.storage.power_limit},
                  {"E", scenario.storage.capacity},
                  {"eta", scenario.storage.efficiency},
                  {"e0", scenario.storage.initial_soc}};
  j["T"] = scenario.horizon();
  j["terminal"] = {{"kappa", scenario.terminal.kappa},
                   {"e_ref", scenario.terminal.e_ref},
                   {"slope", scenario.terminal.slope}};
  json costs = json::array();
  for (const CostFunction& cost : scenario.costs) {
    if (const auto* quad = std::get_if<QuadraticCost>(&cost)) {
      costs.push_back({{"type", "quad"}, {"alpha", quad->alpha}, {"beta", quad->beta}});
    } else {
      const auto& pwl = std::get<PiecewiseLinearCost>(cost);
      json segments = json::array();
      for (std::size_t k = 0; k < pwl.segments(); ++k) {
        segments.push_back({pwl.marginals()[k], pwl.breaks()[k + 1]});
      }
      costs.push_back({{"type", "pwl"}, {"q_lo", pwl.domain_lo()}, {"segments", std::move(segments)}});
    }
  }
  j["costs"] = std::move(costs);

  std::ofstream out(path);
  if (!out) fail("cannot write scenario file: " + path.string());
  out << j.dump(2) << '\n';
}

void write_schedule(const Schedule& schedule, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write schedule file: " + path.string());
  out << "t,p_plus,p_minus,net,soc,theta\n";
  out << std::setprecision(17);
  for (std::size_t t = 1; t <= schedule.horizon(); ++t) {
    const Dispatch& d = schedule.controls[t - 1];
    const double theta = t - 1 < schedule.theta.size()
                             ? schedule.theta[t - 1]
                             : std::numeric_limits<double>::quiet_NaN();
    out << t << ',' << d.discharge << ',' << d.charge << ',' << d.net << ','
        << schedule.soc[t - 1] << ',' << theta << '\n';
  }
}

Schedule read_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open schedule file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail("schedule file is empty: " + path.string());
  if (line != "t,p_plus,p_minus,net,soc,theta")
    fail("unexpected schedule header: " + line);

  Schedule schedule;
  schedule.initial_soc = std::numeric_limits<double>::quiet_NaN();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::array<double, 6> vals{};
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c < 6; ++c) {
      if (!std::getline(ss, cell, ',')) fail("short schedule row " + std::to_string(row));
      try {
        vals[c] = std::stod(cell);
      } catch (...) {
        fail("unparsable value '" + cell + "' in schedule row " + std::to_string(row));
      }
    }
    if (std::getline(ss, cell, ',')) fail("extra columns in schedule row " + std::to_string(row));
    if (static_cast<std::size_t>(vals[0]) != row)
      fail("period column out of order in schedule row " + std::to_string(row));
    schedule.controls.push_back(Dispatch{vals[1], vals[2], vals[3]});
    schedule.soc.push_back(vals[4]);
    schedule.theta.push_back(vals[5]);
  }
  if (schedule.controls.empty()) fail("schedule has no rows: " + path.string());
  return schedule;
}

}  // namespace stordual
