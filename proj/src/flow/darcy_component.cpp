#include "porecouple/flow/darcy_component.hpp"

#include "porecouple/component/config.hpp"
#include "porecouple/core/error.hpp"

namespace porecouple::flow {

using component::ComponentStatus;
using component::FieldSpec;
using meshfield::Support;

void DarcyComponent::do_initialize(const component::ConfigTree& config) {
  const Index n = mesh().n_cells();
  if (!config.contains("conductivity")) throw InvalidArgument("flow: missing 'conductivity'");
  base_conductivity_ = meshfield::make_field("conductivity", Support::Cells, n, {"K"}, "m/s");
  base_conductivity_.values.col(0) =
      component::uniform_or_array(config.at("conductivity"), n, "flow.conductivity");
  reference_porosity_ = config.contains("reference_porosity")
                            ? component::uniform_or_array(config.at("reference_porosity"), n,
                                                          "flow.reference_porosity")
                            : VectorXd::Ones(n);
  if ((reference_porosity_.array() <= 0.0).any() || (reference_porosity_.array() > 1.0).any()) {
    throw InvalidArgument("flow.reference_porosity must lie in (0, 1]");
  }
  porosity_ = reference_porosity_;
  heads_.clear();
  if (config.contains("boundary_heads")) {
    for (const auto& [tag, value] : config.at("boundary_heads").items()) {
      if (!value.is_number()) throw InvalidArgument("flow.boundary_heads." + tag + ": expected a number");
      heads_[tag] = value.get<double>();
    }
  }
  tolerance_ = component::number_or(config, "tolerance", 1e-13);
  solve();
}

void DarcyComponent::solve() {
  FlowProblem problem{mesh_ptr(), base_conductivity_, heads_};
  for (Index c = 0; c < mesh().n_cells(); ++c) {
    problem.conductivity.values(c, 0) =
        kozeny_carman(base_conductivity_.values(c, 0), porosity_[c], reference_porosity_[c]);
  }
  solution_ = solve_darcy(problem, tolerance_);
  solution_.head.time = time_;
  solution_.face_flux.time = time_;
}

void DarcyComponent::do_set_input(const std::string& name, const Field& field) {
  if (name == "porosity") {
    if ((field.values.array() <= 0.0).any() || (field.values.array() > 1.0).any()) {
      throw InvalidArgument("flow: porosity must lie in (0, 1]");
    }
    porosity_ = field.values.col(0);
  }
}

ComponentStatus DarcyComponent::do_compute(double t, double dt) {
  time_ = t + dt;
  try {
    solve();
  } catch (const NoConvergence& e) {
    return ComponentStatus::failure(std::string("darcy: ") + e.what());
  }
  return ComponentStatus::success();
}

Field DarcyComponent::do_get_output(const std::string& name) const {
  return name == "head" ? solution_.head : solution_.face_flux;
}

std::vector<FieldSpec> DarcyComponent::do_inputs() const {
  return {{"porosity", Support::Cells, 1}};
}

std::vector<FieldSpec> DarcyComponent::do_outputs() const {
  return {{"head", Support::Cells, 1}, {"flux", Support::Faces, 1}};
}

}  // namespace porecouple::flow
