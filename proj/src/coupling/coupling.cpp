#include "porecouple/coupling/coupling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "porecouple/core/error.hpp"

namespace porecouple::coupling {

namespace {

constexpr double kResidualFloor = 1e-30;

meshfield::Field cell_field(const std::string& name, const MatrixXd& values, double time) {
  meshfield::Field f;
  f.name = name;
  f.support = meshfield::Support::Cells;
  f.values = values;
  f.time = time;
  for (Index c = 0; c < values.cols(); ++c) f.component_names.push_back(std::to_string(c));
  return f;
}

struct ChemistryResult {
  ComponentStatus status;
  MatrixXd totals;
  MatrixXd minerals;
  VectorXd porosity;
};

ComponentStatus transport_pass(NumericalComponent& transport, const CoupledState& state, double dt,
                               const MatrixXd& source) {
  transport.set_input_field("conc", cell_field("conc", state.totals, state.time));
  transport.set_input_field("porosity", cell_field("porosity", state.porosity, state.time));
  transport.set_input_field("source", cell_field("source", source, state.time));
  return transport.compute_time_step(state.time, dt);
}

ChemistryResult chemistry_pass(NumericalComponent* chemistry, const CoupledState& state, double dt,
                               const MatrixXd& totals) {
  ChemistryResult out;
  if (!chemistry) {
    out.totals = totals;
    out.minerals = state.minerals;
    out.porosity = state.porosity;
    return out;
  }
  chemistry->set_input_field("totals", cell_field("totals", totals, state.time + dt));
  chemistry->set_input_field("minerals", cell_field("minerals", state.minerals, state.time));
  chemistry->set_input_field("porosity", cell_field("porosity", state.porosity, state.time));
  out.status = chemistry->compute_time_step(state.time, dt);
  if (!out.status.ok) return out;
  out.totals = chemistry->get_output_field("totals").values;
  out.minerals = chemistry->get_output_field("minerals").values;
  out.porosity = chemistry->get_output_field("porosity").values.col(0);
  return out;
}

StepOutcome failed(ComponentStatus status, const std::string& where, double t) {
  StepOutcome out;
  status.message = where + " failed at t=" + std::to_string(t) + ": " + status.message;
  out.status = std::move(status);
  out.report.converged = false;
  return out;
}

void accept(StepOutcome& out, NumericalComponent& transport, const CoupledState& state, double dt,
            ChemistryResult&& chem, MatrixXd rate) {
  out.state.time = state.time + dt;
  out.state.totals = std::move(chem.totals);
  out.state.minerals = std::move(chem.minerals);
  out.state.porosity = state.porosity;
  out.state.reaction_rate = std::move(rate);
  out.porosity = std::move(chem.porosity);
  out.decayed = transport.get_output_field("decayed").values;
  out.boundary_inflow = transport.get_output_field("boundary_inflow").values;
}

}  // namespace

const char* to_string(SplittingMode mode) { return mode == SplittingMode::SNIA ? "SNIA" : "SIA"; }

SplittingMode splitting_mode_from_string(const std::string& text) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (upper == "SNIA") return SplittingMode::SNIA;
  if (upper == "SIA") return SplittingMode::SIA;
  throw InvalidArgument("unknown coupling mode '" + text + "' (expected SNIA or SIA)");
}

void validate(const CouplingConfig& c) {
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw InvalidArgument("coupling.dt must be positive");
  if (!(c.t_end >= c.dt) || !std::isfinite(c.t_end)) throw InvalidArgument("coupling.t_end must be at least dt");
  if (!(c.sia_tol > 0.0)) throw InvalidArgument("coupling.sia_tol must be positive");
  if (c.sia_max_iters < 1) throw InvalidArgument("coupling.sia_max_iters must be at least 1");
  if (!(c.reflow_threshold > 0.0)) throw InvalidArgument("coupling.reflow_threshold must be positive");
}

StepOutcome snia_step(NumericalComponent& transport, NumericalComponent* chemistry,
                      const CoupledState& state, double dt, const MatrixXd& sources) {
  auto status = transport_pass(transport, state, dt, sources);
  if (!status.ok) return failed(std::move(status), "transport", state.time);
  const MatrixXd transported = transport.get_output_field("conc").values;
  auto chem = chemistry_pass(chemistry, state, dt, transported);
  if (!chem.status.ok) return failed(std::move(chem.status), "chemistry", state.time);

  StepOutcome out;
  out.report = {1, 0.0, true};
  accept(out, transport, state, dt, std::move(chem), MatrixXd::Zero(state.totals.rows(), state.totals.cols()));
  return out;
}

StepOutcome sia_step(NumericalComponent& transport, NumericalComponent* chemistry,
                     const CoupledState& state, double dt, const CouplingConfig& config,
                     const MatrixXd& sources) {
  MatrixXd rate = MatrixXd::Zero(state.totals.rows(), state.totals.cols());
  if (config.sia_warm_start && state.reaction_rate.rows() == rate.rows() &&
      state.reaction_rate.cols() == rate.cols()) {
    rate = state.reaction_rate;
  }
  SiaReport report;
  report.converged = false;
  ChemistryResult chem;
  for (int k = 1; k <= config.sia_max_iters; ++k) {
    const bool reacting = !rate.isZero(0.0);
    const MatrixXd source = reacting ? MatrixXd(sources + state.porosity.asDiagonal() * rate) : sources;
    auto status = transport_pass(transport, state, dt, source);
    if (!status.ok) return failed(std::move(status), "transport", state.time);
    const MatrixXd transported = transport.get_output_field("conc").values;
    // Clipping cannot move a fixed point: there T_in = T_tr - dt r >= 0 holds exactly.
    const MatrixXd input = reacting ? MatrixXd((transported - dt * rate).cwiseMax(0.0)) : transported;

    chem = chemistry_pass(chemistry, state, dt, input);
    if (!chem.status.ok) return failed(std::move(chem.status), "chemistry", state.time);

    rate = (chem.totals - input) / dt;
    report.iterations = k;
    report.residual = (chem.totals - transported).norm() / std::max(transported.norm(), kResidualFloor);
    if (report.residual <= config.sia_tol) {
      report.converged = true;
      break;
    }
  }
  StepOutcome out;
  out.report = report;
  accept(out, transport, state, dt, std::move(chem), std::move(rate));
  return out;
}

}  // namespace porecouple::coupling
