#pragma once

#include <string>
#include <vector>

#include "porecouple/chemistry/system.hpp"

namespace porecouple::chemistry {

/// ln c never drops below this (c = e^-80 guards underflow).
inline constexpr double kLnConcentrationFloor = -80.0;
/// Saturation-index tolerance (log10 units) of the mineral active set.
inline constexpr double kSaturationTolerance = 1e-8;
inline constexpr double kMinPorosity = 1e-4;
inline constexpr int kNewtonMaxIterations = 200;

/// Per-cell speciation state.
struct ChemState {
  VectorXd ln_c;           ///< free primary concentrations, ln(mol/m3 water)
  VectorXd mineral_moles;  ///< mol/m3 bulk
  double porosity = 1.0;
};

/// Complex concentrations c_j = K_j prod c_i^S_ji.
VectorXd complex_concentrations(const ChemicalSystem& system, const VectorXd& ln_c);

/// log10(Q_k) - log10(Ksp_k) per mineral.
VectorXd saturation_indices(const ChemicalSystem& system, const VectorXd& ln_c);

/// Dissolved totals T_i = c_i + sum_j S_ji c_j, with ln c floored.
VectorXd totals_from_state(const ChemicalSystem& system, const ChemState& state);

/// Mineral-bound content per m3 of water: sum_k M_ki m_k / porosity.
VectorXd mineral_bound_totals(const ChemicalSystem& system, const ChemState& state);

/// Mass-action/mass-balance equations in unknowns x = (ln c, y) where y holds the
/// moles per m3 water of the active minerals. Mass rows are scaled by 1/max(T_i, 1e-20);
/// mineral rows are ln Q_k - ln Ksp_k. Round-off negative totals are read as zero.
class EquilibriumEquations {
 public:
  EquilibriumEquations(const ChemicalSystem& system, VectorXd totals, std::vector<Index> active);

  Index size() const;
  VectorXd residual(const VectorXd& x) const;
  MatrixXd jacobian(const VectorXd& x) const;
  const std::vector<Index>& active() const { return active_; }
  const VectorXd& totals() const { return totals_; }

 private:
  const ChemicalSystem& system_;
  VectorXd totals_;
  VectorXd scale_;
  std::vector<Index> active_;
};

/// Aqueous speciation without minerals. `totals` must be non-negative; a zero total
/// leaves its primary at the concentration floor. Newton runs from the
/// guess, then from three perturbed restarts; throws SpeciationFailure if all fail.
ChemState speciate(const ChemicalSystem& system, const VectorXd& totals, const ChemState& guess,
                   double tol);

struct Equilibrium {
  ChemState state;
  VectorXd dissolved;  ///< dissolved totals per m3 water
  int passes = 0;      ///< active-set passes used
};

/// Equilibrium with minerals. `total_content` includes mineral-bound totals per m3 water
/// (at state.porosity). Minerals with moles > 0 in `state` start active.
Equilibrium equilibrate_cell(const ChemicalSystem& system, const VectorXd& total_content,
                             const ChemState& state, double tol);

struct PorosityUpdate {
  double porosity = 1.0;
  bool clamped = false;
  std::string warning;
};

/// phi0 - sum_k V_k (m_k - m0_k), clamped to [1e-4, 1] with a warning.
PorosityUpdate update_porosity(const ChemicalSystem& system, const ChemState& state, double phi0,
                               const VectorXd& mineral_moles0);

}  // namespace porecouple::chemistry
