#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "porecouple/meshfield/field.hpp"
#include "porecouple/meshfield/mesh.hpp"

namespace porecouple::transport {

using meshfield::Field;
using meshfield::Mesh;

struct SpeciesParams {
  std::string name;
  double diffusion = 0.0;    ///< effective diffusion d_e, m2/s
  double retardation = 1.0;  ///< R >= 1
  double decay_rate = 0.0;   ///< lambda, 1/s
  std::optional<Index> parent;
};

struct TransportParams {
  std::shared_ptr<const Mesh> mesh;
  Field face_flux;  ///< FACES, m3/s along the face normal
  Field porosity;   ///< CELLS, in (0, 1]
  std::vector<SpeciesParams> species;
  double dispersivity = 0.0;  ///< longitudinal alpha_L, m
  double theta = 1.0;
  /// Fixed concentration per species on the listed boundary tags. Applied to inflow
  /// advection and to diffusion across those faces; untagged faces have zero
  /// diffusive flux and admit clean water on inflow.
  std::map<std::string, VectorXd> boundary_concentrations;
  double linear_tolerance = 1e-13;
  int max_linear_iterations = 20000;
};

struct TransportState {
  Field conc;  ///< CELLS, one component per species, mol/m3 of water; conc.time is the time
};

struct TransportStep {
  TransportState state;
  MatrixXd decayed;  ///< moles removed by decay per cell and species over the step
  MatrixXd boundary_inflow;  ///< net moles entering each cell through boundary faces
};

/// d_e + alpha_L |v|.
double dispersion_coefficient(double v, double d_e, double alpha_L);

/// Throws InvalidArgument when the parameters violate their invariants.
void validate(const TransportParams& params);

/// Species indices with every parent before its daughter. Throws InvalidArgument on a
/// cycle, an out-of-range parent or a parent with more than one daughter.
std::vector<Index> decay_order(const std::vector<SpeciesParams>& species);

/// Largest dt the explicit part admits: min over cells of phi R V / sum of outflow.
double cfl_limit(const TransportParams& params);

/// One theta-scheme step of upwind advection, two-point diffusion/dispersion,
/// decay and ingrowth for every species. `source` is mol/(m3 bulk s), CELLS.
/// Throws StepRejected (theta < 1 beyond the CFL limit) or NoConvergence.
TransportStep transport_step(const TransportState& state, double dt, const TransportParams& params,
                             const Field& source);

/// Sum over cells of phi R V c for species `s`.
double species_inventory(const TransportParams& params, const Field& conc, Index s);

}  // namespace porecouple::transport
