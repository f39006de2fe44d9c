#pragma once

#include <string>

#include "porecouple/component/component.hpp"
#include "porecouple/core/types.hpp"

namespace porecouple::coupling {

using component::ComponentStatus;
using component::NumericalComponent;

enum class SplittingMode { SNIA, SIA };

const char* to_string(SplittingMode mode);
/// Accepts "SNIA" and "SIA" (case-insensitive).
SplittingMode splitting_mode_from_string(const std::string& text);

struct CouplingConfig {
  SplittingMode mode = SplittingMode::SIA;
  int sia_max_iters = 50;
  double sia_tol = 1e-8;
  double dt = 1.0;
  double t_end = 1.0;
  bool porosity_feedback = false;
  double reflow_threshold = 1e-3;
  /// Seed the SIA reaction source with the previous step's value instead of zero.
  bool sia_warm_start = false;
};

/// Throws InvalidArgument when the invariants fail.
void validate(const CouplingConfig& config);

/// Driver-owned state between steps. All matrices are cells x components.
struct CoupledState {
  double time = 0.0;
  MatrixXd totals;         ///< dissolved totals, mol/m3 water
  MatrixXd minerals;       ///< mol/m3 bulk
  VectorXd porosity;
  MatrixXd reaction_rate;  ///< last SIA reaction source, mol/(m3 water s)
};

struct SiaReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

struct StepOutcome {
  ComponentStatus status;
  CoupledState state;        ///< valid when status.ok; porosity is not yet updated
  VectorXd porosity;         ///< porosity reported by chemistry for the new state
  MatrixXd decayed;          ///< moles, from the accepted transport pass
  MatrixXd boundary_inflow;  ///< moles, from the accepted transport pass
  SiaReport report;
};

/// Transport one step with the external sources (mol/(m3 bulk s)), then equilibrate.
/// `chemistry` may be null (no reactions).
StepOutcome snia_step(NumericalComponent& transport, NumericalComponent* chemistry,
                      const CoupledState& state, double dt, const MatrixXd& sources);

/// Fixed point between transport and chemistry. Iteration k transports the step-start
/// totals with source sources + phi r^k, removes dt r^k to get the transport-only totals
/// (clipped at zero), equilibrates them against the step-start minerals and sets r^{k+1}
/// from the change.
/// The residual is ||T_eq - T_transported|| / max(||T_transported||, 1e-30).
StepOutcome sia_step(NumericalComponent& transport, NumericalComponent* chemistry,
                     const CoupledState& state, double dt, const CouplingConfig& config,
                     const MatrixXd& sources);

}  // namespace porecouple::coupling
