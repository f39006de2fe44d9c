#pragma once

#include "porecouple/chemistry/equilibrium.hpp"
#include "porecouple/component/component.hpp"

namespace porecouple::chemistry {

/// Application "chemistry", implementation "equilibrium-reference".
///
/// Config: primaries, complexes, minerals (see chemical_system_from_config), porosity
/// (number or per-cell), initial_totals and initial_minerals ({name: value} or per-cell
/// rows), tolerance (default 1e-12). Every cell is equilibrated during initialize; the
/// result is the initial condition and the porosity reference state.
///
/// Inputs: totals (dissolved, per primary), minerals (mol/m3 bulk) and porosity, which
/// sets the water/bulk conversion. Outputs: totals (equilibrated dissolved), minerals and
/// porosity updated from the mineral volume change.
class EquilibriumComponent : public component::NumericalComponent {
 public:
  const ChemicalSystem& system() const { return *system_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 protected:
  void do_initialize(const component::ConfigTree& config) override;
  void do_set_input(const std::string& name, const meshfield::Field& field) override;
  component::ComponentStatus do_compute(double t, double dt) override;
  meshfield::Field do_get_output(const std::string& name) const override;
  std::vector<component::FieldSpec> do_inputs() const override;
  std::vector<component::FieldSpec> do_outputs() const override;

 private:
  std::unique_ptr<ChemicalSystem> system_;
  double tolerance_ = 1e-12;
  std::vector<ChemState> cells_;
  VectorXd reference_porosity_;
  MatrixXd reference_minerals_;
  meshfield::Field totals_;
  meshfield::Field minerals_;
  meshfield::Field porosity_out_;
  std::vector<std::string> warnings_;
};

}  // namespace porecouple::chemistry
