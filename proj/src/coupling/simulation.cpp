#include "porecouple/coupling/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "porecouple/chemistry/system.hpp"
#include "porecouple/component/config.hpp"
#include "porecouple/core/error.hpp"
#include "porecouple/meshfield/mff.hpp"

namespace porecouple::coupling {

namespace {

using component::ConfigTree;
using meshfield::Field;
using meshfield::Mesh;
using meshfield::Support;

constexpr int kMaxHalvings = 5;
constexpr int kMaxNonConvergedSteps = 3;
constexpr double kPorosityFloor = 1e-4;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Ledger inputs that come from the scenario rather than from component state.
struct LedgerModel {
  VectorXd retardation;
  std::vector<std::optional<Index>> parent;
  MatrixXd mineral_stoichiometry;  // Nm x Ns, empty when unknown
};

class LedgerTracker {
 public:
  LedgerTracker(LedgerModel model, std::vector<std::string> species, const Mesh& mesh)
      : model_(std::move(model)), volume_(mesh.n_cells()) {
    ledger_.species = std::move(species);
    for (Index c = 0; c < mesh.n_cells(); ++c) volume_[c] = mesh.cell(c).volume;
    const auto ns = static_cast<Index>(ledger_.species.size());
    decayed_ = VectorXd::Zero(ns);
    boundary_ = VectorXd::Zero(ns);
    scale_ = VectorXd::Zero(ns);
  }

  void record(const CoupledState& state, const VectorXd& package) {
    const VectorXd water = content(state);
    VectorXd balance = water + decayed_ + package - boundary_;
    for (Index s = 0; s < balance.size(); ++s) {
      if (const auto& p = model_.parent[static_cast<std::size_t>(s)]) balance[s] -= decayed_[*p];
    }
    scale_ = scale_.cwiseMax(water.cwiseAbs())
                 .cwiseMax(package.cwiseAbs())
                 .cwiseMax(decayed_.cwiseAbs())
                 .cwiseMax(boundary_.cwiseAbs());
    if (ledger_.initial.size() == 0) ledger_.initial = balance;
    ledger_.current = balance;
    for (Index s = 0; s < balance.size(); ++s) {
      if (scale_[s] > 0.0) {
        ledger_.max_relative_error =
            std::max(ledger_.max_relative_error, std::abs(balance[s] - ledger_.initial[s]) / scale_[s]);
      }
    }
  }

  void add_step(const MatrixXd& decayed, const MatrixXd& boundary_inflow) {
    decayed_ += decayed.colwise().sum().transpose();
    boundary_ += boundary_inflow.colwise().sum().transpose();
  }

  const MassLedger& ledger() const { return ledger_; }

 private:
  VectorXd content(const CoupledState& state) const {
    const auto ns = static_cast<Index>(ledger_.species.size());
    VectorXd out = VectorXd::Zero(ns);
    const VectorXd pool = state.porosity.cwiseProduct(volume_);
    for (Index s = 0; s < ns; ++s) out[s] = model_.retardation[s] * pool.dot(state.totals.col(s));
    if (model_.mineral_stoichiometry.rows() > 0 && state.minerals.cols() == model_.mineral_stoichiometry.rows()) {
      out += (state.minerals * model_.mineral_stoichiometry).transpose() * volume_;
    }
    return out;
  }

  LedgerModel model_;
  VectorXd volume_;
  VectorXd decayed_;
  VectorXd boundary_;
  VectorXd scale_;
  MassLedger ledger_;
};

LedgerModel ledger_model(const ConfigTree& transport, const std::optional<ConfigTree>& chemistry,
                         const std::vector<std::string>& species) {
  LedgerModel m;
  const auto ns = static_cast<Index>(species.size());
  m.retardation = VectorXd::Ones(ns);
  m.parent.assign(species.size(), std::nullopt);
  if (transport.contains("species") && transport.at("species").is_array()) {
    const auto& entries = transport.at("species");
    for (std::size_t i = 0; i < entries.size() && i < species.size(); ++i) {
      m.retardation[static_cast<Index>(i)] = component::number_or(entries[i], "retardation", 1.0);
      if (entries[i].contains("parent") && entries[i].at("parent").is_string()) {
        const auto name = entries[i].at("parent").get<std::string>();
        auto it = std::find(species.begin(), species.end(), name);
        if (it != species.end()) m.parent[i] = static_cast<Index>(it - species.begin());
      }
    }
  }
  if (chemistry) {
    try {
      const auto system = chemistry::chemical_system_from_config(*chemistry);
      if (system.primaries() == species) m.mineral_stoichiometry = system.mineral_stoichiometry();
    } catch (const Error&) {
      // Not a reaction-database config; minerals stay out of the ledger.
    }
  }
  return m;
}

class OutputWriter {
 public:
  OutputWriter(const OutputConfig& config, std::shared_ptr<const Mesh> mesh,
               std::vector<std::string> species, std::vector<std::string> minerals)
      : config_(config), mesh_(std::move(mesh)), species_(std::move(species)), minerals_(std::move(minerals)) {
    if (!enabled()) return;
    std::filesystem::create_directories(config_.directory);
    log_.open(config_.directory / "run.log", std::ios::out | std::ios::trunc);
    if (config_.csv) {
      csv_.open(config_.directory / "timeseries.csv", std::ios::out | std::ios::trunc);
      csv_ << "time,cell,component,value\n";
      files_.push_back(config_.directory / "timeseries.csv");
    }
    files_.push_back(config_.directory / "run.log");
  }

  bool enabled() const { return !config_.directory.empty(); }

  void snapshot(Index step, const CoupledState& state) {
    if (!enabled() || step == last_written_) return;
    last_written_ = step;
    if (config_.csv) {
      const std::string t = format_double(state.time);
      for (Index c = 0; c < mesh_->n_cells(); ++c) {
        const std::string prefix = t + "," + std::to_string(c) + ",";
        for (Index s = 0; s < state.totals.cols(); ++s) {
          csv_ << prefix << species_[static_cast<std::size_t>(s)] << "," << format_double(state.totals(c, s)) << "\n";
        }
        for (Index k = 0; k < state.minerals.cols(); ++k) {
          csv_ << prefix << minerals_[static_cast<std::size_t>(k)] << "," << format_double(state.minerals(c, k))
               << "\n";
        }
        csv_ << prefix << "porosity," << format_double(state.porosity[c]) << "\n";
      }
      csv_.flush();
    }
    if (config_.mff) {
      meshfield::MffDocument doc{meshfield::kMffFormatVersion, *mesh_, {}};
      auto totals = meshfield::make_field("totals", Support::Cells, mesh_->n_cells(), species_, "mol/m3", state.time);
      totals.values = state.totals;
      auto minerals =
          meshfield::make_field("minerals", Support::Cells, mesh_->n_cells(), minerals_, "mol/m3", state.time);
      minerals.values = state.minerals;
      auto porosity = meshfield::make_field("porosity", Support::Cells, mesh_->n_cells(), {"porosity"}, "", state.time);
      porosity.values.col(0) = state.porosity;
      doc.fields = {std::move(totals), std::move(porosity)};
      if (!minerals_.empty()) doc.fields.push_back(std::move(minerals));
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%06lld.mff", static_cast<long long>(step));
      meshfield::write_mff(config_.directory / name, doc);
      files_.push_back(config_.directory / name);
    }
  }

  void log(const std::string& line) {
    if (!enabled()) return;
    log_ << line << "\n";
    log_.flush();
  }

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  OutputConfig config_;
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::string> species_;
  std::vector<std::string> minerals_;
  std::ofstream csv_;
  std::ofstream log_;
  Index last_written_ = -1;
  std::vector<std::filesystem::path> files_;
};

std::string step_line(Index step, double t, double dt, SplittingMode mode, const SiaReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "step=%lld t=%.17g dt=%.17g mode=%s iterations=%d residual=%.6e converged=%d",
                static_cast<long long>(step), t, dt, to_string(mode), r.iterations, r.residual,
                r.converged ? 1 : 0);
  return buf;
}

Field cell_values(const std::string& name, const VectorXd& values, double time) {
  Field f = meshfield::make_field(name, Support::Cells, values.size(), {name}, "", time);
  f.values.col(0) = values;
  return f;
}

}  // namespace

SimulationResult run_simulation(const SimulationSetup& setup, const component::Registry& registry,
                                const StepObserver& observer) {
  validate(setup.coupling);
  const CouplingConfig& cfg = setup.coupling;
  if (setup.output.cadence < 1) throw InvalidArgument("output.cadence must be at least 1");
  auto mesh = std::make_shared<const Mesh>(meshfield::build_structured_mesh(setup.nx, setup.ny, setup.dx, setup.dy));
  const Index n = mesh->n_cells();

  const VectorXd phi0 = setup.transport.contains("porosity")
                            ? component::uniform_or_array(setup.transport.at("porosity"), n, "transport.porosity")
                            : VectorXd::Ones(n);

  std::unique_ptr<component::NumericalComponent> flow;
  if (setup.flow) {
    ConfigTree fc = *setup.flow;
    if (!fc.contains("reference_porosity") && setup.transport.contains("porosity")) {
      fc["reference_porosity"] = setup.transport.at("porosity");
    }
    flow = registry.create("flow", setup.flow_impl, fc, mesh);
  }
  auto transport = registry.create("transport", setup.transport_impl, setup.transport, mesh);
  if (flow) transport->set_input_field("flux", flow->get_output_field("flux"));

  std::unique_ptr<component::NumericalComponent> chemistry;
  if (setup.chemistry) {
    ConfigTree cc = *setup.chemistry;
    if (!cc.contains("porosity") && setup.transport.contains("porosity")) cc["porosity"] = setup.transport.at("porosity");
    chemistry = registry.create("chemistry", setup.chemistry_impl, cc, mesh);
  }

  const Field conc0 = transport->get_output_field("conc");
  const std::vector<std::string> species = conc0.component_names;
  const auto ns = static_cast<Index>(species.size());

  CoupledState state;
  state.time = 0.0;
  std::vector<std::string> mineral_names;
  if (chemistry) {
    const Field totals = chemistry->get_output_field("totals");
    if (totals.component_names != species) {
      throw InvalidArgument("chemistry primaries must match the transported species in name and order");
    }
    const Field minerals = chemistry->get_output_field("minerals");
    mineral_names = minerals.component_names;
    state.totals = totals.values;
    state.minerals = minerals.values;
    state.porosity = chemistry->get_output_field("porosity").values.col(0);
  } else {
    state.totals = conc0.values;
    state.minerals = MatrixXd::Zero(n, 0);
    state.porosity = phi0;
  }
  state.reaction_rate = MatrixXd::Zero(n, ns);

  std::vector<WastePackageState> packages = setup.packages;
  for (const auto& wp : packages) {
    if (wp.host_cell < 0 || wp.host_cell >= n) throw InvalidArgument("waste package host cell out of range");
    if (wp.inventory.size() != ns) throw InvalidArgument("waste package inventory must list every species");
    if (!(wp.rate >= 0.0) || (wp.inventory.array() < 0.0).any()) {
      throw InvalidArgument("waste package rate and inventory must be non-negative");
    }
  }
  auto package_total = [&]() {
    VectorXd total = VectorXd::Zero(ns);
    for (const auto& wp : packages) total += wp.inventory;
    return total;
  };

  SimulationResult result;
  LedgerTracker ledger(ledger_model(setup.transport, setup.chemistry, species), species, *mesh);
  ledger.record(state, package_total());
  OutputWriter writer(setup.output, mesh, species, mineral_names);
  writer.snapshot(0, state);
  if (observer) observer({0, 0.0, &state, SiaReport{}, &ledger.ledger()});

  VectorXd flow_porosity = phi0;
  double dt_next = cfg.dt;
  int non_converged = 0;
  Index step = 0;
  const double t_slack = 1e-9 * cfg.dt;

  auto abort_run = [&](const std::string& message) {
    result.ok = false;
    result.message = message;
    writer.log("abort: " + message);
    writer.snapshot(step, state);
  };

  try {
    while (cfg.t_end - state.time > t_slack) {
      const double remaining = cfg.t_end - state.time;
      double h = std::min(dt_next, remaining);
      if (remaining - h <= t_slack) h = remaining;

      StepOutcome outcome;
      std::vector<WastePackageState> released;
      for (int halvings = 0;; ++halvings) {
        MatrixXd sources = MatrixXd::Zero(n, ns);
        released.clear();
        for (const auto& wp : packages) {
          auto rel = waste_package_step(wp, h);
          sources.row(wp.host_cell) += rel.source.transpose() / mesh->cell(wp.host_cell).volume;
          released.push_back(std::move(rel.state));
        }
        outcome = cfg.mode == SplittingMode::SNIA
                      ? snia_step(*transport, chemistry.get(), state, h, sources)
                      : sia_step(*transport, chemistry.get(), state, h, cfg, sources);
        if (outcome.status.ok) break;
        writer.log("retry: " + outcome.status.message);
        if (halvings == kMaxHalvings) break;
        h = std::min(outcome.status.suggested_dt.value_or(h / 2.0), h / 2.0);
      }
      if (!outcome.status.ok) {
        abort_run("step " + std::to_string(step + 1) + " failed after " + std::to_string(kMaxHalvings) +
                  " halvings: " + outcome.status.message);
        break;
      }

      ++step;
      packages = std::move(released);
      ledger.add_step(outcome.decayed, outcome.boundary_inflow);
      const VectorXd old_porosity = state.porosity;
      state = std::move(outcome.state);
      if (cfg.t_end - state.time <= t_slack) state.time = cfg.t_end;

      if (cfg.porosity_feedback && chemistry) {
        const VectorXd& phi = outcome.porosity;
        for (Index c = 0; c < n; ++c) {
          if (phi[c] <= kPorosityFloor && old_porosity[c] > kPorosityFloor) {
            result.warnings.push_back("porosity clamped at " + format_double(kPorosityFloor) + " in cell " +
                                      std::to_string(c) + " at t=" + format_double(state.time));
          }
        }
        state.totals.array().colwise() *= (old_porosity.array() / phi.array());
        state.porosity = phi;
        if (flow) {
          const double change = ((phi - flow_porosity).cwiseAbs().array() / flow_porosity.array()).maxCoeff();
          if (change > cfg.reflow_threshold) {
            flow->set_input_field("porosity", cell_values("porosity", phi, state.time));
            const auto status = flow->compute_time_step(state.time - h, h);
            if (!status.ok) {
              abort_run("flow re-solve failed: " + status.message);
              break;
            }
            transport->set_input_field("flux", flow->get_output_field("flux"));
            flow_porosity = phi;
            ++result.reflows;
            writer.log("reflow at t=" + format_double(state.time) + " max relative porosity change " +
                       format_double(change));
          }
        }
      }

      ledger.record(state, package_total());
      result.reports.push_back(outcome.report);
      writer.log(step_line(step, state.time, h, cfg.mode, outcome.report));
      const bool last = state.time >= cfg.t_end;
      if (last || step % setup.output.cadence == 0) writer.snapshot(step, state);
      if (observer) observer({step, h, &state, outcome.report, &ledger.ledger()});

      if (cfg.mode == SplittingMode::SIA && cfg.sia_max_iters > 1 && !outcome.report.converged) {
        result.warnings.push_back("SIA did not converge at step " + std::to_string(step) +
                                  " (residual " + format_double(outcome.report.residual) + ")");
        if (++non_converged >= kMaxNonConvergedSteps) {
          abort_run("SIA failed to converge on " + std::to_string(kMaxNonConvergedSteps) + " consecutive steps");
          break;
        }
        dt_next = h / 2.0;
      } else {
        non_converged = 0;
        dt_next = std::min(2.0 * h, cfg.dt);
      }
    }
  } catch (const Error& e) {
    abort_run(e.what());
  }

  transport->finalize();
  if (chemistry) chemistry->finalize();
  if (flow) flow->finalize();

  result.steps = step;
  result.final_state = state;
  result.ledger = ledger.ledger();
  result.files = writer.files();
  return result;
}

}  // namespace porecouple::coupling
