#include "porecouple/chemistry/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "porecouple/core/error.hpp"
#include "porecouple/numerics/newton.hpp"

namespace porecouple::chemistry {

namespace {

const double kLn10 = std::log(10.0);

void clamp_floor(VectorXd& ln_c) { ln_c = ln_c.cwiseMax(kLnConcentrationFloor); }

std::string describe(const VectorXd& v) {
  std::ostringstream out;
  out.precision(6);
  out << '[';
  for (Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  out << ']';
  return out.str();
}

// Totals below this are solved against an absolute rather than relative residual.
constexpr double kTotalsScaleFloor = 1e-20;
// Round-off negatives up to this fraction of the largest total are read as zero.
constexpr double kNegativeSlack = 1e-9;

/// Checks length and sign, returns the totals with round-off negatives set to zero.
VectorXd checked_totals(const VectorXd& totals, Index n) {
  if (totals.size() != n) throw InvalidArgument("totals have the wrong length");
  if (!totals.allFinite()) throw InvalidArgument("totals must be finite, got " + describe(totals));
  const double slack = kNegativeSlack * totals.cwiseAbs().maxCoeff() + kTotalsScaleFloor;
  if ((totals.array() < -slack).any()) {
    throw InvalidArgument("totals must be non-negative, got " + describe(totals));
  }
  return totals.cwiseMax(0.0);
}

VectorXd safe_log(const VectorXd& totals) {
  return totals.cwiseMax(kTotalsScaleFloor).array().log().matrix().cwiseMax(kLnConcentrationFloor);
}

/// Newton from a sequence of starting points; the first that converges wins.
struct SolveOutcome {
  VectorXd x;
  bool converged = false;
  double residual = 0.0;
};

SolveOutcome solve_with_restarts(const EquilibriumEquations& eq, const std::vector<VectorXd>& starts,
                                 Index n_primaries, double tol) {
  auto project = [n_primaries](VectorXd& x) {
    auto ln_c = x.head(n_primaries);
    ln_c = ln_c.cwiseMax(kLnConcentrationFloor);
  };
  SolveOutcome best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    try {
      auto result = numerics::newton_solve<double>(
          [&](const VectorXd& x) { return eq.residual(x); },
          [&](const VectorXd& x) { return eq.jacobian(x); }, start, tol, kNewtonMaxIterations, project);
      return {std::move(result.x), true, result.report.final_residual_norm};
    } catch (const numerics::NewtonFailure<double>& e) {
      if (e.report().final_residual_norm < best.residual) {
        best.residual = e.report().final_residual_norm;
        best.x = e.last_iterate();
      }
    }
  }
  return best;
}

}  // namespace

VectorXd complex_concentrations(const ChemicalSystem& system, const VectorXd& ln_c) {
  if (system.n_complexes() == 0) return VectorXd::Zero(0);
  return (system.ln_k() + system.complex_stoichiometry() * ln_c).array().exp().matrix();
}

VectorXd saturation_indices(const ChemicalSystem& system, const VectorXd& ln_c) {
  if (system.n_minerals() == 0) return VectorXd::Zero(0);
  return (system.mineral_stoichiometry() * ln_c - system.ln_ksp()) / kLn10;
}

VectorXd totals_from_state(const ChemicalSystem& system, const ChemState& state) {
  VectorXd ln_c = state.ln_c;
  clamp_floor(ln_c);
  VectorXd totals = ln_c.array().exp().matrix();
  if (system.n_complexes() > 0) {
    totals += system.complex_stoichiometry().transpose() * complex_concentrations(system, ln_c);
  }
  return totals;
}

VectorXd mineral_bound_totals(const ChemicalSystem& system, const ChemState& state) {
  if (system.n_minerals() == 0) return VectorXd::Zero(system.n_primaries());
  return system.mineral_stoichiometry().transpose() * state.mineral_moles / state.porosity;
}

EquilibriumEquations::EquilibriumEquations(const ChemicalSystem& system, VectorXd totals,
                                           std::vector<Index> active)
    : system_(system), totals_(checked_totals(totals, system.n_primaries())), active_(std::move(active)) {
  scale_ = totals_.cwiseMax(kTotalsScaleFloor);
}

Index EquilibriumEquations::size() const {
  return system_.n_primaries() + static_cast<Index>(active_.size());
}

VectorXd EquilibriumEquations::residual(const VectorXd& x) const {
  const Index nc = system_.n_primaries();
  const auto ln_c = x.head(nc);
  VectorXd r(size());
  VectorXd dissolved = ln_c.array().exp().matrix();
  if (system_.n_complexes() > 0) {
    dissolved += system_.complex_stoichiometry().transpose() * complex_concentrations(system_, ln_c);
  }
  for (std::size_t a = 0; a < active_.size(); ++a) {
    dissolved += system_.mineral_stoichiometry().row(active_[a]).transpose() * x[nc + static_cast<Index>(a)];
  }
  r.head(nc) = (dissolved - totals_).cwiseQuotient(scale_);
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const Index k = active_[a];
    r[nc + static_cast<Index>(a)] = system_.mineral_stoichiometry().row(k).dot(ln_c) - system_.ln_ksp()[k];
  }
  return r;
}

MatrixXd EquilibriumEquations::jacobian(const VectorXd& x) const {
  const Index nc = system_.n_primaries();
  const auto ln_c = x.head(nc);
  MatrixXd J = MatrixXd::Zero(size(), size());
  J.topLeftCorner(nc, nc).diagonal() = ln_c.array().exp().matrix();
  if (system_.n_complexes() > 0) {
    const MatrixXd& S = system_.complex_stoichiometry();
    const VectorXd cx = complex_concentrations(system_, ln_c);
    J.topLeftCorner(nc, nc) += S.transpose() * cx.asDiagonal() * S;
  }
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const Index col = nc + static_cast<Index>(a);
    J.block(0, col, nc, 1) = system_.mineral_stoichiometry().row(active_[a]).transpose();
    J.block(col, 0, 1, nc) = system_.mineral_stoichiometry().row(active_[a]);
  }
  for (Index i = 0; i < nc; ++i) J.row(i) /= scale_[i];
  return J;
}

ChemState speciate(const ChemicalSystem& system, const VectorXd& totals, const ChemState& guess,
                   double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("speciate: tolerance must be positive");
  const Index nc = system.n_primaries();
  EquilibriumEquations eq(system, totals, {});
  const VectorXd ln_t = safe_log(eq.totals());
  std::vector<VectorXd> starts;
  if (guess.ln_c.size() == nc && guess.ln_c.allFinite()) starts.push_back(guess.ln_c.cwiseMax(kLnConcentrationFloor));
  starts.push_back(ln_t);
  starts.push_back((ln_t.array() - 2.0).matrix());
  starts.push_back((ln_t.array() - 5.0).matrix());
  auto outcome = solve_with_restarts(eq, starts, nc, tol);
  if (!outcome.converged) {
    throw SpeciationFailure("speciation did not converge for totals " + describe(totals) +
                            " (best residual " + std::to_string(outcome.residual) + ")");
  }
  ChemState out = guess;
  out.ln_c = outcome.x;
  clamp_floor(out.ln_c);
  if (out.mineral_moles.size() != system.n_minerals()) out.mineral_moles = VectorXd::Zero(system.n_minerals());
  return out;
}

Equilibrium equilibrate_cell(const ChemicalSystem& system, const VectorXd& total_content,
                             const ChemState& state, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("equilibrate_cell: tolerance must be positive");
  if (!(state.porosity > 0.0)) throw InvalidArgument("equilibrate_cell: porosity must be positive");
  const Index nc = system.n_primaries();
  const Index nm = system.n_minerals();
  const VectorXd content = checked_totals(total_content, nc);

  VectorXd moles = state.mineral_moles.size() == nm ? state.mineral_moles : VectorXd::Zero(nm);
  std::vector<Index> active;
  for (Index k = 0; k < nm; ++k) {
    if (moles[k] > 0.0) active.push_back(k);
  }
  VectorXd ln_c = (state.ln_c.size() == nc && state.ln_c.allFinite())
                      ? VectorXd(state.ln_c.cwiseMax(kLnConcentrationFloor))
                      : safe_log(content);
  VectorXd per_water = moles / state.porosity;

  const int max_passes = 2 * static_cast<int>(nm) + 2;
  for (int pass = 1; pass <= max_passes; ++pass) {
    EquilibriumEquations eq(system, total_content, active);
    const auto na = static_cast<Index>(active.size());
    auto pack = [&](const VectorXd& ln) {
      VectorXd x(nc + na);
      x.head(nc) = ln;
      for (Index a = 0; a < na; ++a) x[nc + a] = per_water[active[static_cast<std::size_t>(a)]];
      return x;
    };
    const VectorXd ln_t = safe_log(content);
    std::vector<VectorXd> starts = {pack(ln_c), pack(ln_t), pack((ln_t.array() - 2.0).matrix()),
                                    pack((ln_t.array() - 5.0).matrix())};
    auto outcome = solve_with_restarts(eq, starts, nc, tol);
    if (!outcome.converged) {
      throw SpeciationFailure("equilibrium did not converge for total content " +
                              describe(total_content) + " with " + std::to_string(na) +
                              " active minerals (best residual " + std::to_string(outcome.residual) + ")");
    }
    ln_c = outcome.x.head(nc);
    per_water.setZero();
    for (Index a = 0; a < na; ++a) per_water[active[static_cast<std::size_t>(a)]] = outcome.x[nc + a];

    // Drop the most negative present mineral.
    Index worst = -1;
    for (const Index k : active) {
      if (per_water[k] < 0.0 && (worst < 0 || per_water[k] < per_water[worst])) worst = k;
    }
    if (worst >= 0) {
      active.erase(std::find(active.begin(), active.end(), worst));
      per_water[worst] = 0.0;
      continue;
    }
    // Add the most supersaturated absent mineral.
    const VectorXd si = saturation_indices(system, ln_c);
    Index best = -1;
    for (Index k = 0; k < nm; ++k) {
      if (std::find(active.begin(), active.end(), k) != active.end()) continue;
      if (si[k] > kSaturationTolerance && (best < 0 || si[k] > si[best])) best = k;
    }
    if (best >= 0) {
      active.push_back(best);
      std::sort(active.begin(), active.end());
      continue;
    }

    Equilibrium out;
    out.state.ln_c = ln_c;
    clamp_floor(out.state.ln_c);
    out.state.mineral_moles = per_water * state.porosity;
    out.state.porosity = state.porosity;
    // Mass balance closes exactly: whatever the active minerals hold is not dissolved.
    out.dissolved = total_content;
    if (nm > 0) out.dissolved -= system.mineral_stoichiometry().transpose() * per_water;
    out.passes = pass;
    return out;
  }
  throw SpeciationFailure("mineral active set did not settle within " + std::to_string(max_passes) +
                          " passes for total content " + describe(total_content));
}

PorosityUpdate update_porosity(const ChemicalSystem& system, const ChemState& state, double phi0,
                               const VectorXd& mineral_moles0) {
  PorosityUpdate out;
  double phi = phi0;
  if (system.n_minerals() > 0) {
    phi -= system.molar_volumes().dot(state.mineral_moles - mineral_moles0);
  }
  if (phi < kMinPorosity || phi > 1.0) {
    out.clamped = true;
    std::ostringstream msg;
    msg << "porosity " << phi << " clamped to [" << kMinPorosity << ", 1]";
    out.warning = msg.str();
    phi = std::clamp(phi, kMinPorosity, 1.0);
  }
  out.porosity = phi;
  return out;
}

}  // namespace porecouple::chemistry
