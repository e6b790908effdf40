#pragma once

#include <vector>

#include "stordual/storage.hpp"

namespace stordual {

/// Full-horizon trajectory: per-period controls, end-of-period states of
/// charge, the dual trace, and the objective value. `theta[t]` is the
/// multiplier of the state-of-charge dynamics at the end of period t
/// (theta[0] governs period 1); it is left empty by solvers that do not
/// produce duals.
struct Schedule {
  double initial_soc = 0.0;
  std::vector<Dispatch> controls;  // periods 1..T
  std::vector<double> soc;         // e_1..e_T
  std::vector<double> theta;       // theta_0..theta_T, or empty
  double objective = 0.0;

  std::size_t horizon() const { return controls.size(); }
};

}  // namespace stordual
