#include "porecouple/component/component.hpp"

#include <algorithm>

#include "porecouple/core/error.hpp"

namespace porecouple::component {

namespace {

const FieldSpec* find_spec(const std::vector<FieldSpec>& specs, const std::string& name) {
  auto it = std::find_if(specs.begin(), specs.end(),
                         [&](const FieldSpec& s) { return s.name == name; });
  return it == specs.end() ? nullptr : &*it;
}

std::string names_of(const std::vector<FieldSpec>& specs) {
  std::string out;
  for (const auto& s : specs) {
    if (!out.empty()) out += ", ";
    out += s.name;
  }
  return out;
}

}  // namespace

void NumericalComponent::require_ready(const char* call) const {
  if (state_ == Lifecycle::Finalized) {
    throw ComponentError(std::string(call) + ": component has been finalized");
  }
  if (state_ == Lifecycle::Created) {
    throw ComponentError(std::string(call) + ": component is not initialized");
  }
}

void NumericalComponent::initialize(const ConfigTree& config, std::shared_ptr<const Mesh> mesh) {
  if (state_ == Lifecycle::Finalized) {
    throw ComponentError("initialize: component has been finalized");
  }
  if (!mesh) throw InvalidArgument("initialize: null mesh");
  mesh_ = std::move(mesh);
  do_initialize(config);
  state_ = Lifecycle::Ready;
}

void NumericalComponent::set_input_field(const std::string& name, const Field& field) {
  require_ready("set_input_field");
  const auto inputs = do_inputs();
  const FieldSpec* spec = find_spec(inputs, name);
  if (!spec) {
    throw ComponentError("set_input_field: '" + name + "' is not a declared input (declared: " +
                         names_of(inputs) + ")");
  }
  if (field.support != spec->support || field.n_components() != spec->n_components) {
    throw ComponentError("set_input_field: '" + name + "' expects " + to_string(spec->support) +
                         " with " + std::to_string(spec->n_components) + " components");
  }
  meshfield::check_field(field, *mesh_);
  do_set_input(name, field);
}

ComponentStatus NumericalComponent::compute_time_step(double t, double dt) {
  require_ready("compute_time_step");
  if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t)) {
    throw InvalidArgument("compute_time_step: dt must be positive and finite");
  }
  return do_compute(t, dt);
}

Field NumericalComponent::get_output_field(const std::string& name) const {
  require_ready("get_output_field");
  const auto outputs = do_outputs();
  if (!find_spec(outputs, name)) {
    throw ComponentError("get_output_field: '" + name + "' is not a declared output (declared: " +
                         names_of(outputs) + ")");
  }
  return do_get_output(name);
}

std::vector<FieldSpec> NumericalComponent::declared_inputs() const {
  require_ready("declared_inputs");
  return do_inputs();
}

std::vector<FieldSpec> NumericalComponent::declared_outputs() const {
  require_ready("declared_outputs");
  return do_outputs();
}

void NumericalComponent::finalize() {
  if (state_ == Lifecycle::Ready) do_finalize();
  state_ = Lifecycle::Finalized;
}

}  // namespace porecouple::component
