#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "porecouple/component/registry.hpp"
#include "porecouple/coupling/coupling.hpp"
#include "porecouple/coupling/waste_package.hpp"

namespace porecouple::coupling {

struct OutputConfig {
  int cadence = 1;                  ///< write every n-th step; step 0 and the last step always
  std::filesystem::path directory;  ///< empty: nothing is written
  bool csv = true;
  bool mff = true;
};

/// Everything run_simulation needs. Component configs are passed through unchanged,
/// except that porosity missing from the chemistry or flow config is taken from the
/// transport config.
struct SimulationSetup {
  Index nx = 1;
  Index ny = 1;
  double dx = 1.0;
  double dy = 1.0;
  std::optional<component::ConfigTree> flow;
  component::ConfigTree transport;
  std::optional<component::ConfigTree> chemistry;
  std::string flow_impl = "darcy-reference";
  std::string transport_impl = "fv-reference";
  std::string chemistry_impl = "equilibrium-reference";
  CouplingConfig coupling;
  std::vector<WastePackageState> packages;
  OutputConfig output;
};

/// Per-species mass balance: water + mineral + package + decayed - ingrowth - boundary
/// inflow, compared with its initial value.
struct MassLedger {
  std::vector<std::string> species;
  VectorXd initial;
  VectorXd current;
  double max_relative_error = 0.0;
};

struct StepRecord {
  Index step = 0;
  double dt = 0.0;
  const CoupledState* state = nullptr;
  SiaReport report;
  const MassLedger* ledger = nullptr;
};

struct SimulationResult {
  bool ok = true;
  std::string message;
  Index steps = 0;
  Index reflows = 0;
  CoupledState final_state;
  std::vector<SiaReport> reports;
  std::vector<std::string> warnings;
  MassLedger ledger;
  std::vector<std::filesystem::path> files;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// Builds the mesh and components, solves the initial flow, then time-loops the chosen
/// splitting with waste-package sources and porosity feedback. Writes CSV
/// ("time,cell,component,value"), MFF snapshots and run.log when an output directory is
/// set. Failures end the run with ok == false after writing the last good snapshot.
/// Configuration errors throw before any step is taken.
SimulationResult run_simulation(const SimulationSetup& setup,
                                const component::Registry& registry = component::builtin_registry(),
                                const StepObserver& observer = {});

}  // namespace porecouple::coupling
