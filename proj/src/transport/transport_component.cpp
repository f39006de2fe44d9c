#include "porecouple/transport/transport_component.hpp"

#include <algorithm>

#include "porecouple/component/config.hpp"
#include "porecouple/core/error.hpp"

namespace porecouple::transport {

using component::ComponentStatus;
using component::ConfigTree;
using component::FieldSpec;
using meshfield::Support;

std::vector<SpeciesParams> species_from_config(const ConfigTree& species) {
  if (!species.is_array() || species.empty()) {
    throw InvalidArgument("transport.species must be a non-empty array");
  }
  std::vector<SpeciesParams> out;
  std::vector<std::string> parents;
  for (const auto& entry : species) {
    if (!entry.is_object() || !entry.contains("name") || !entry.at("name").is_string()) {
      throw InvalidArgument("transport.species entries need a 'name'");
    }
    SpeciesParams s;
    s.name = entry.at("name").get<std::string>();
    s.diffusion = component::number_or(entry, "diffusion", 0.0);
    s.retardation = component::number_or(entry, "retardation", 1.0);
    s.decay_rate = component::number_or(entry, "decay_rate", 0.0);
    parents.push_back(entry.contains("parent") && entry.at("parent").is_string()
                          ? entry.at("parent").get<std::string>()
                          : std::string());
    out.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (parents[i].empty()) continue;
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SpeciesParams& s) { return s.name == parents[i]; });
    if (it == out.end()) {
      throw InvalidArgument("transport.species '" + out[i].name + "' has unknown parent '" +
                            parents[i] + "'");
    }
    out[i].parent = static_cast<Index>(it - out.begin());
  }
  return out;
}

std::vector<std::string> TransportComponent::species_names() const {
  std::vector<std::string> names;
  for (const auto& s : params_.species) names.push_back(s.name);
  return names;
}

void TransportComponent::do_initialize(const ConfigTree& config) {
  const Index n = mesh().n_cells();
  params_ = TransportParams{};
  params_.mesh = mesh_ptr();
  if (!config.contains("species")) throw InvalidArgument("transport: missing 'species'");
  params_.species = species_from_config(config.at("species"));
  const auto names = species_names();
  params_.dispersivity = component::number_or(config, "dispersivity", 0.0);
  params_.theta = component::number_or(config, "theta", 1.0);
  params_.linear_tolerance = component::number_or(config, "linear_tolerance", 1e-13);
  params_.max_linear_iterations = component::integer_or(config, "max_linear_iterations", 20000);

  params_.porosity = meshfield::make_field("porosity", Support::Cells, n, {"porosity"});
  params_.porosity.values.col(0) =
      config.contains("porosity")
          ? component::uniform_or_array(config.at("porosity"), n, "transport.porosity")
          : VectorXd::Ones(n);
  params_.face_flux = meshfield::make_field("flux", Support::Faces, mesh().n_faces(), {"flux"}, "m3/s");

  if (config.contains("boundary_concentrations")) {
    for (const auto& [tag, values] : config.at("boundary_concentrations").items()) {
      const MatrixXd row = component::rows_by_name(values, 1, names,
                                                   "transport.boundary_concentrations." + tag);
      params_.boundary_concentrations[tag] = row.row(0).transpose();
    }
  }
  validate(params_);

  state_.conc = meshfield::make_field("conc", Support::Cells, n, names, "mol/m3");
  if (config.contains("initial")) {
    state_.conc.values = component::rows_by_name(config.at("initial"), n, names, "transport.initial");
  }
  meshfield::check_field(state_.conc, mesh());
  source_ = meshfield::make_field("source", Support::Cells, n, names, "mol/m3/s");
  decayed_ = meshfield::make_field("decayed", Support::Cells, n, names, "mol");
  boundary_ = meshfield::make_field("boundary_inflow", Support::Cells, n, names, "mol");
}

void TransportComponent::do_set_input(const std::string& name, const Field& field) {
  if (name == "flux") {
    params_.face_flux.values = field.values;
    params_.face_flux.time = field.time;
  } else if (name == "porosity") {
    if ((field.values.array() <= 0.0).any() || (field.values.array() > 1.0).any()) {
      throw InvalidArgument("transport: porosity must lie in (0, 1]");
    }
    params_.porosity.values = field.values;
  } else if (name == "source") {
    source_.values = field.values;
  } else if (name == "conc") {
    state_.conc.values = field.values;
    state_.conc.time = field.time;
  }
}

ComponentStatus TransportComponent::do_compute(double t, double dt) {
  TransportState start = state_;
  start.conc.time = t;
  try {
    auto step = transport_step(start, dt, params_, source_);
    state_ = std::move(step.state);
    decayed_.values = step.decayed;
    decayed_.time = state_.conc.time;
    boundary_.values = step.boundary_inflow;
    boundary_.time = state_.conc.time;
  } catch (const StepRejected& e) {
    return ComponentStatus::failure(e.what(), e.suggested_dt());
  } catch (const NoConvergence& e) {
    return ComponentStatus::failure(std::string("transport: ") + e.what());
  }
  return ComponentStatus::success();
}

Field TransportComponent::do_get_output(const std::string& name) const {
  if (name == "conc") return state_.conc;
  if (name == "decayed") return decayed_;
  return boundary_;
}

std::vector<FieldSpec> TransportComponent::do_inputs() const {
  const auto ns = static_cast<Index>(params_.species.size());
  return {{"flux", Support::Faces, 1},
          {"porosity", Support::Cells, 1},
          {"source", Support::Cells, ns},
          {"conc", Support::Cells, ns}};
}

std::vector<FieldSpec> TransportComponent::do_outputs() const {
  const auto ns = static_cast<Index>(params_.species.size());
  return {{"conc", Support::Cells, ns},
          {"decayed", Support::Cells, ns},
          {"boundary_inflow", Support::Cells, ns}};
}

}  // namespace porecouple::transport
