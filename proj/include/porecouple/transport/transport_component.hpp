#pragma once

#include "porecouple/component/component.hpp"
#include "porecouple/transport/transport.hpp"

namespace porecouple::transport {

/// Parses the "species" array: [{name, diffusion, retardation, decay_rate, parent}].
std::vector<SpeciesParams> species_from_config(const component::ConfigTree& species);

/// Application "transport", implementation "fv-reference".
///
/// Config: species, dispersivity, theta (default 1), porosity (number or per-cell),
/// boundary_concentrations ({tag: {species: value}}), initial ({species: value} or
/// per-cell rows), linear_tolerance.
///
/// Inputs: flux (FACES), porosity (CELLS), source (CELLS x species, mol/(m3 s)) and
/// conc, which replaces the current state. Outputs: conc, decayed (moles lost to decay
/// per cell during the last step) and boundary_inflow (net moles that entered each cell
/// through boundary faces during the last step). Each compute_time_step advances the state.
class TransportComponent : public component::NumericalComponent {
 protected:
  void do_initialize(const component::ConfigTree& config) override;
  void do_set_input(const std::string& name, const Field& field) override;
  component::ComponentStatus do_compute(double t, double dt) override;
  Field do_get_output(const std::string& name) const override;
  std::vector<component::FieldSpec> do_inputs() const override;
  std::vector<component::FieldSpec> do_outputs() const override;

 private:
  std::vector<std::string> species_names() const;

  TransportParams params_;
  TransportState state_;
  Field source_;
  Field decayed_;
  Field boundary_;
};

}  // namespace porecouple::transport
