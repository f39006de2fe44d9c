#pragma once

#include "porecouple/component/component.hpp"
#include "porecouple/flow/darcy.hpp"

namespace porecouple::flow {

/// Application "flow", implementation "darcy-reference".
///
/// Config: conductivity (number or per-cell array, m/s), boundary_heads ({tag: head}),
/// reference_porosity (number or per-cell array, default 1), tolerance (default 1e-13).
/// Input "porosity" rescales the conductivity with Kozeny-Carman against the reference
/// porosity; the next compute_time_step re-solves. The steady solution for the initial
/// conductivity is available right after initialize.
class DarcyComponent final : public component::NumericalComponent {
 protected:
  void do_initialize(const component::ConfigTree& config) override;
  void do_set_input(const std::string& name, const Field& field) override;
  component::ComponentStatus do_compute(double t, double dt) override;
  Field do_get_output(const std::string& name) const override;
  std::vector<component::FieldSpec> do_inputs() const override;
  std::vector<component::FieldSpec> do_outputs() const override;

 private:
  void solve();

  Field base_conductivity_;
  VectorXd reference_porosity_;
  VectorXd porosity_;
  std::map<std::string, double> heads_;
  double tolerance_ = 1e-13;
  FlowSolution solution_;
  double time_ = 0.0;
};

}  // namespace porecouple::flow
