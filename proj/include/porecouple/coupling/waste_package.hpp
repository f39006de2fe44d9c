#pragma once

#include "porecouple/core/types.hpp"

namespace porecouple::coupling {

/// 0D source: an inventory released by first-order degradation into one host cell.
struct WastePackageState {
  VectorXd inventory;  ///< mol per transported species
  double rate = 0.0;   ///< k, 1/s
  Index host_cell = 0;
};

struct WastePackageRelease {
  WastePackageState state;
  VectorXd source;  ///< mol/s per species, constant over the step
};

/// m' = m exp(-k dt); the released moles arrive at the constant rate (m - m')/dt.
WastePackageRelease waste_package_step(const WastePackageState& wp, double dt);

}  // namespace porecouple::coupling
