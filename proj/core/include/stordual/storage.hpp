#pragma once

#include <cstddef>

namespace stordual {

/// Physical storage parameters. Immutable after construction.
struct StorageSpec {
  double power_limit;   // max energy charged or discharged per period, > 0
  double capacity;      // max stored energy, > 0
  double efficiency;    // one-way charge/discharge efficiency, in (0, 1]
  double initial_soc;   // state of charge entering period 1, in [0, capacity]

  StorageSpec(double power_limit_, double capacity_, double efficiency_, double initial_soc_);
};

/// One period's control split into its discharge and charge components.
/// Both components may be active at once only under the relaxed policy with
/// a negative dual.
struct Dispatch {
  double discharge = 0.0;  // in [0, power_limit]
  double charge = 0.0;     // in [0, power_limit]
  double net = 0.0;        // discharge - charge, exactly

  static Dispatch of(double discharge, double charge) {
    return Dispatch{discharge, charge, discharge - charge};
  }
};

/// Tie-breaking rule applied when the policy produces both a charge and a
/// discharge component. The one-sided variants bound the duals of every
/// admissible charge-status assignment.
enum class PolicyVariant {
  Relaxed,              // keep both components
  ChargePreferring,     // drop the discharge component when charging
  DischargePreferring,  // drop the charge component when discharging
};

}  // namespace stordual
