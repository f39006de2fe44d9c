#include "porecouple/coupling/waste_package.hpp"

#include <cmath>

#include "porecouple/core/error.hpp"

namespace porecouple::coupling {

WastePackageRelease waste_package_step(const WastePackageState& wp, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("waste_package_step: dt must be positive");
  if (!(wp.rate >= 0.0)) throw InvalidArgument("waste_package_step: negative rate constant");
  if ((wp.inventory.array() < 0.0).any()) throw InvalidArgument("waste_package_step: negative inventory");
  WastePackageRelease out;
  out.state = wp;
  out.state.inventory = wp.inventory * std::exp(-wp.rate * dt);
  out.source = (wp.inventory - out.state.inventory) / dt;
  return out;
}

}  // namespace porecouple::coupling
