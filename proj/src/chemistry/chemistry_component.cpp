#include "porecouple/chemistry/chemistry_component.hpp"

#include "porecouple/component/config.hpp"
#include "porecouple/core/error.hpp"

namespace porecouple::chemistry {

using component::ComponentStatus;
using component::FieldSpec;
using meshfield::Field;
using meshfield::Support;

void EquilibriumComponent::do_initialize(const component::ConfigTree& config) {
  system_ = std::make_unique<ChemicalSystem>(chemical_system_from_config(config));
  const ChemicalSystem& sys = *system_;
  const Index n = mesh().n_cells();
  const Index nc = sys.n_primaries();
  const Index nm = sys.n_minerals();
  tolerance_ = component::number_or(config, "tolerance", 1e-12);

  reference_porosity_ = config.contains("porosity")
                            ? component::uniform_or_array(config.at("porosity"), n, "chemistry.porosity")
                            : VectorXd::Ones(n);
  if ((reference_porosity_.array() <= 0.0).any() || (reference_porosity_.array() > 1.0).any()) {
    throw InvalidArgument("chemistry.porosity must lie in (0, 1]");
  }
  if (!config.contains("initial_totals")) throw InvalidArgument("chemistry: missing 'initial_totals'");
  const MatrixXd t0 =
      component::rows_by_name(config.at("initial_totals"), n, sys.primaries(), "chemistry.initial_totals");
  const MatrixXd m0 = config.contains("initial_minerals")
                          ? component::rows_by_name(config.at("initial_minerals"), n, sys.mineral_names(),
                                                    "chemistry.initial_minerals")
                          : MatrixXd::Zero(n, nm);
  if ((m0.array() < 0.0).any()) throw InvalidArgument("chemistry.initial_minerals must be non-negative");

  cells_.assign(static_cast<std::size_t>(n), ChemState{});
  totals_ = meshfield::make_field("totals", Support::Cells, n, sys.primaries(), "mol/m3");
  minerals_ = meshfield::make_field("minerals", Support::Cells, n, sys.mineral_names(), "mol/m3");
  porosity_out_ = meshfield::make_field("porosity", Support::Cells, n, {"porosity"});
  reference_minerals_ = MatrixXd::Zero(n, nm);
  for (Index c = 0; c < n; ++c) {
    ChemState s;
    s.porosity = reference_porosity_[c];
    s.mineral_moles = m0.row(c).transpose();
    s.ln_c = VectorXd::Constant(nc, kLnConcentrationFloor);
    const VectorXd dissolved = t0.row(c).transpose();
    VectorXd content = dissolved + mineral_bound_totals(sys, s);
    s.ln_c = dissolved.cwiseMax(1e-300).array().log().matrix();
    Equilibrium eq;
    try {
      eq = equilibrate_cell(sys, content, s, tolerance_);
    } catch (const Error& e) {
      throw InvalidArgument("chemistry: initial state of cell " + std::to_string(c) + ": " + e.what());
    }
    cells_[static_cast<std::size_t>(c)] = eq.state;
    totals_.values.row(c) = eq.dissolved.transpose();
    minerals_.values.row(c) = eq.state.mineral_moles.transpose();
    reference_minerals_.row(c) = eq.state.mineral_moles.transpose();
    porosity_out_.values(c, 0) = reference_porosity_[c];
  }
}

void EquilibriumComponent::do_set_input(const std::string& name, const Field& field) {
  const Index n = mesh().n_cells();
  if (name == "totals") {
    totals_.values = field.values;
    totals_.time = field.time;
  } else if (name == "minerals") {
    if ((field.values.array() < 0.0).any()) throw InvalidArgument("chemistry: negative mineral amounts");
    minerals_.values = field.values;
    for (Index c = 0; c < n; ++c) cells_[static_cast<std::size_t>(c)].mineral_moles = field.values.row(c).transpose();
  } else if (name == "porosity") {
    if ((field.values.array() <= 0.0).any() || (field.values.array() > 1.0).any()) {
      throw InvalidArgument("chemistry: porosity must lie in (0, 1]");
    }
    for (Index c = 0; c < n; ++c) cells_[static_cast<std::size_t>(c)].porosity = field.values(c, 0);
  }
}

ComponentStatus EquilibriumComponent::do_compute(double t, double dt) {
  const ChemicalSystem& sys = *system_;
  const Index n = mesh().n_cells();
  std::vector<ChemState> next(cells_.size());
  Field totals = totals_;
  Field minerals = minerals_;
  Field porosity = porosity_out_;
  std::vector<std::string> warnings;
  for (Index c = 0; c < n; ++c) {
    const ChemState& current = cells_[static_cast<std::size_t>(c)];
    const VectorXd content = totals_.values.row(c).transpose() + mineral_bound_totals(sys, current);
    try {
      auto eq = equilibrate_cell(sys, content, current, tolerance_);
      totals.values.row(c) = eq.dissolved.transpose();
      minerals.values.row(c) = eq.state.mineral_moles.transpose();
      const auto phi = update_porosity(sys, eq.state, reference_porosity_[c],
                                       reference_minerals_.row(c).transpose());
      if (phi.clamped) warnings.push_back("cell " + std::to_string(c) + ": " + phi.warning);
      porosity.values(c, 0) = phi.porosity;
      next[static_cast<std::size_t>(c)] = std::move(eq.state);
    } catch (const Error& e) {
      return ComponentStatus::failure("chemistry: cell " + std::to_string(c) + " at t=" + std::to_string(t) +
                                      ": " + e.what());
    }
  }
  cells_ = std::move(next);
  totals_ = std::move(totals);
  minerals_ = std::move(minerals);
  porosity_out_ = std::move(porosity);
  totals_.time = minerals_.time = porosity_out_.time = t + dt;
  warnings_.insert(warnings_.end(), warnings.begin(), warnings.end());
  return ComponentStatus::success();
}

Field EquilibriumComponent::do_get_output(const std::string& name) const {
  if (name == "totals") return totals_;
  if (name == "minerals") return minerals_;
  return porosity_out_;
}

std::vector<FieldSpec> EquilibriumComponent::do_inputs() const {
  return {{"totals", Support::Cells, system_->n_primaries()},
          {"minerals", Support::Cells, system_->n_minerals()},
          {"porosity", Support::Cells, 1}};
}

std::vector<FieldSpec> EquilibriumComponent::do_outputs() const {
  return {{"totals", Support::Cells, system_->n_primaries()},
          {"minerals", Support::Cells, system_->n_minerals()},
          {"porosity", Support::Cells, 1}};
}

}  // namespace porecouple::chemistry
