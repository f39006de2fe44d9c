#include <cmath>

#include <gtest/gtest.h>

#include "porecouple/chemistry/equilibrium.hpp"
#include "porecouple/component/registry.hpp"
#include "porecouple/core/error.hpp"
#include "porecouple/coupling/coupling.hpp"
#include "porecouple/coupling/simulation.hpp"
#include "porecouple/coupling/waste_package.hpp"
#include "porecouple/transport/transport.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "support/test_components.hpp"

using namespace porecouple;
using namespace porecouple::coupling;
using component::ConfigTree;
namespace pt = porecouple::testing;

namespace {

std::shared_ptr<const meshfield::Mesh> grid(Index nx, Index ny, double dx) {
  return std::make_shared<const meshfield::Mesh>(meshfield::build_structured_mesh(nx, ny, dx, 1.0));
}

CoupledState state_from(const component::NumericalComponent& chem) {
  CoupledState s;
  s.totals = chem.get_output_field("totals").values;
  s.minerals = chem.get_output_field("minerals").values;
  s.porosity = chem.get_output_field("porosity").values.col(0);
  s.reaction_rate = MatrixXd::Zero(s.totals.rows(), s.totals.cols());
  return s;
}

// Primary A with dimer A2 (K) and mineral A(s) capping free A at Ksp.
ConfigTree capped_dimer_chemistry(double log_k, double log_ksp, double molar_volume = 1e-5) {
  ConfigTree c;
  c["primaries"] = {"A"};
  c["complexes"] = ConfigTree::array({{{"name", "A2"}, {"stoichiometry", {{"A", 2}}}, {"logK", log_k}}});
  c["minerals"] = ConfigTree::array(
      {{{"name", "A(s)"}, {"stoichiometry", {{"A", 1}}}, {"logKsp", log_ksp}, {"molar_volume", molar_volume}}});
  return c;
}

// Closed 1D column: A on the left, B on the right, AB(s) precipitating where they mix.
SimulationSetup closed_column(SplittingMode mode) {
  SimulationSetup s;
  s.nx = 12;
  s.dx = 0.1;
  s.transport = ConfigTree::parse(
      R"json({"species": [{"name": "A", "diffusion": 1e-3}, {"name": "B", "diffusion": 1e-3}], "porosity": 0.4})json");
  ConfigTree chem;
  chem["primaries"] = {"A", "B"};
  chem["complexes"] = ConfigTree::array({{{"name", "AB(aq)"}, {"stoichiometry", {{"A", 1}, {"B", 1}}}, {"logK", 1}}});
  chem["minerals"] = ConfigTree::array({{{"name", "AB(s)"},
                                         {"stoichiometry", {{"A", 1}, {"B", 1}}},
                                         {"logKsp", -4},
                                         {"molar_volume", 0.5}}});
  std::vector<std::vector<double>> totals;
  for (int i = 0; i < 12; ++i) totals.push_back(i < 6 ? std::vector<double>{0.05, 1e-6} : std::vector<double>{1e-6, 0.05});
  chem["initial_totals"] = totals;
  s.chemistry = chem;
  s.coupling.mode = mode;
  s.coupling.dt = 2.0;
  s.coupling.t_end = 40.0;
  s.coupling.sia_tol = 1e-12;
  return s;
}

}  // namespace

TEST(WastePackage, NoDegradation) {
  const auto r = waste_package_step({(VectorXd(2) << 1.0, 3.0).finished(), 0.0, 4}, 10.0);
  EXPECT_EQ(r.state.inventory, (VectorXd(2) << 1.0, 3.0).finished());
  EXPECT_TRUE(r.source.isZero(0.0));
  EXPECT_EQ(r.state.host_cell, 4);
}

TEST(WastePackage, HalfLife) {
  const double dt = 3.0;
  const auto r = waste_package_step({VectorXd::Ones(1), std::log(2.0) / dt, 0}, dt);
  EXPECT_NEAR(r.state.inventory[0], 0.5, 1e-15);
  EXPECT_NEAR(r.source[0], 0.5 / dt, 1e-15);
}

TEST(WastePackage, ReleaseTelescopes) {
  WastePackageState wp{VectorXd::Constant(1, 2.0), 1e-3, 0};
  double released = 0.0, t = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double dt = 1.0 + (i % 7);
    auto r = waste_package_step(wp, dt);
    released += r.source[0] * dt;
    t += dt;
    wp = r.state;
  }
  EXPECT_NEAR(released, 2.0 * (1.0 - std::exp(-1e-3 * t)), 1e-13);
  EXPECT_NEAR(released + wp.inventory[0], 2.0, 1e-14);
}

TEST(WastePackage, RejectsBadStep) {
  EXPECT_THROW(waste_package_step({VectorXd::Ones(1), 1.0, 0}, 0.0), InvalidArgument);
}

TEST(Splitting, ModeNames) {
  EXPECT_EQ(splitting_mode_from_string("snia"), SplittingMode::SNIA);
  EXPECT_EQ(splitting_mode_from_string("SIA"), SplittingMode::SIA);
  EXPECT_THROW(splitting_mode_from_string("GIA"), InvalidArgument);
  CouplingConfig c;
  c.t_end = 0.5;
  EXPECT_THROW(validate(c), InvalidArgument);
}

TEST(Snia, NoChemistryIsTransport) {
  auto mesh = grid(10, 1, 0.1);
  auto tr = component::builtin_registry().create(
      "transport", "fv-reference",
      ConfigTree::parse(R"json({"species": [{"name": "A", "diffusion": 1e-3, "decay_rate": 0.01}], "porosity": 0.3,
                                "boundary_concentrations": {"LEFT": {"A": 1.0}}})json"),
      mesh);
  tr->set_input_field("flux", pt::uniform_x_flux(*mesh, 0.02));
  CoupledState s;
  s.totals = VectorXd::LinSpaced(10, 0.0, 0.9);
  s.minerals = MatrixXd::Zero(10, 0);
  s.porosity = VectorXd::Constant(10, 0.3);
  MatrixXd src = MatrixXd::Zero(10, 1);
  src(3, 0) = 0.2;

  const auto out = snia_step(*tr, nullptr, s, 0.5, src);
  ASSERT_TRUE(out.status.ok);

  auto p = pt::basic_params(mesh, 0.3, {{"A", 1e-3, 1.0, 0.01}});
  p.face_flux = pt::uniform_x_flux(*mesh, 0.02);
  p.boundary_concentrations["LEFT"] = VectorXd::Ones(1);
  auto srcf = meshfield::make_field("source", meshfield::Support::Cells, 10, {"A"});
  srcf.values = src;
  const auto direct = transport::transport_step(pt::state_of(*mesh, s.totals, {"A"}), 0.5, p, srcf);
  EXPECT_EQ(out.state.totals, direct.state.conc.values);

  CouplingConfig cfg;
  const auto sia = sia_step(*tr, nullptr, s, 0.5, cfg, src);
  EXPECT_EQ(sia.report.iterations, 1);
  EXPECT_TRUE(sia.report.converged);
  EXPECT_EQ(sia.state.totals, direct.state.conc.values);
}

TEST(Snia, StaticCellReducesToChemistry) {
  auto mesh = grid(1, 1, 1.0);
  auto chem_cfg = capped_dimer_chemistry(2.0, -3.0);
  chem_cfg["porosity"] = 0.5;
  chem_cfg["initial_totals"] = {{"A", 1e-4}};
  const auto reg = component::builtin_registry();
  auto chem = reg.create("chemistry", "equilibrium-reference", chem_cfg, mesh);
  auto tr = reg.create("transport", "fv-reference",
                       ConfigTree::parse(R"json({"species": [{"name": "A"}], "porosity": 0.5})json"), mesh);
  CoupledState s = state_from(*chem);
  s.totals(0, 0) = 0.05;

  const auto out = snia_step(*tr, chem.get(), s, 1.0, MatrixXd::Zero(1, 1));
  ASSERT_TRUE(out.status.ok);
  const auto sys = chemistry::chemical_system_from_config(chem_cfg);
  const auto eq = chemistry::equilibrate_cell(sys, VectorXd::Constant(1, 0.05), {VectorXd::Zero(1), VectorXd::Zero(1), 0.5},
                                              1e-12);
  EXPECT_NEAR(out.state.totals(0, 0), eq.dissolved[0], 1e-14);
  EXPECT_NEAR(out.state.minerals(0, 0), eq.state.mineral_moles[0], 1e-14);
  const double cap = 1e-3 + 2.0 * 100.0 * 1e-6;
  EXPECT_NEAR(out.state.totals(0, 0), cap, 1e-13);
  EXPECT_NEAR(out.state.minerals(0, 0), 0.5 * (0.05 - cap), 1e-13);
}

TEST(Snia, TwoCellHandComposition) {
  auto mesh = grid(2, 1, 1.0);
  const double phi = 0.5, q = 0.25, c_in = 0.03, dt = 0.8, K = 10.0, ksp = 1e-2;
  const double cap = ksp + 2.0 * K * ksp * ksp;
  auto chem_cfg = capped_dimer_chemistry(std::log10(K), std::log10(ksp));
  chem_cfg["porosity"] = phi;
  chem_cfg["initial_totals"] = {{0.012}, {0.004}};
  chem_cfg["initial_minerals"] = {{0.0}, {0.0}};
  const auto reg = component::builtin_registry();
  auto chem = reg.create("chemistry", "equilibrium-reference", chem_cfg, mesh);
  auto tr = reg.create("transport", "fv-reference",
                       ConfigTree::parse(R"json({"species": [{"name": "A"}], "porosity": 0.5,
                                                 "boundary_concentrations": {"LEFT": {"A": 0.03}}})json"),
                       mesh);
  tr->set_input_field("flux", pt::uniform_x_flux(*mesh, q));

  CoupledState s = state_from(*chem);
  // Initial content 0.012 exceeds the cap: cell 0 starts with mineral.
  double c0 = cap, c1 = 0.004, m0 = phi * (0.012 - cap), m1 = 0.0;
  ASSERT_NEAR(s.totals(0, 0), c0, 1e-14);
  ASSERT_NEAR(s.minerals(0, 0), m0, 1e-14);

  for (int step = 0; step < 4; ++step) {
    // Implicit upwind on two unit cells, by hand.
    const double a = phi / dt + q;
    const double t0 = (phi / dt * c0 + q * c_in) / a;
    const double t1 = (phi / dt * c1 + q * t0) / a;
    // Equilibrium with the capped dimer, by hand.
    auto settle = [&](double t, double m, double& c, double& mineral) {
      const double content = t + m / phi;
      c = std::min(content, cap);
      mineral = phi * (content - c);
    };
    settle(t0, m0, c0, m0);
    settle(t1, m1, c1, m1);

    const auto out = snia_step(*tr, chem.get(), s, dt, MatrixXd::Zero(2, 1));
    ASSERT_TRUE(out.status.ok);
    s = out.state;
    EXPECT_NEAR(s.totals(0, 0), c0, 1e-12);
    EXPECT_NEAR(s.totals(1, 0), c1, 1e-12);
    EXPECT_NEAR(s.minerals(0, 0), m0, 1e-12);
    EXPECT_NEAR(s.minerals(1, 0), m1, 1e-12);
  }
  EXPECT_GT(m1, 0.0);
}

TEST(Sia, LinearPartitionMatchesMonolithic) {
  auto mesh = grid(1, 1, 1.0);
  const double phi = 0.4, lambda = 0.05, dt = 2.0;
  const auto reg = pt::test_registry();
  auto chem = reg.create("chemistry", "linear-partition", ConfigTree::object(), mesh);
  auto tr = reg.create("transport", "fv-reference",
                       ConfigTree::parse(R"json({"species": [{"name": "A", "decay_rate": 0.05}], "porosity": 0.4})json"),
                       mesh);
  CoupledState s;
  s.totals = MatrixXd::Constant(1, 1, 1.0);
  s.minerals = MatrixXd::Constant(1, 1, phi);
  s.porosity = VectorXd::Constant(1, phi);
  CouplingConfig cfg;
  cfg.sia_tol = 1e-13;
  cfg.sia_max_iters = 200;
  double c = 1.0, sorbed = phi;
  for (int step = 0; step < 5; ++step) {
    const auto out = sia_step(*tr, chem.get(), s, dt, cfg, MatrixXd::Zero(1, 1));
    ASSERT_TRUE(out.status.ok);
    EXPECT_TRUE(out.report.converged);
    std::tie(c, sorbed) = pt::partition_decay_step(c, sorbed, phi, lambda, dt);
    EXPECT_NEAR(out.state.totals(0, 0), c, 1e-8 * c);
    EXPECT_NEAR(out.state.minerals(0, 0), sorbed, 1e-8 * sorbed);
    s = out.state;
  }
}

TEST(Sia, IdentityChemistryConvergesInOneIteration) {
  auto mesh = grid(5, 1, 1.0);
  const auto reg = component::builtin_registry();
  ConfigTree chem_cfg;
  chem_cfg["primaries"] = {"A", "B"};
  chem_cfg["complexes"] = ConfigTree::array({{{"name", "AB"}, {"stoichiometry", {{"A", 1}, {"B", 1}}}, {"logK", 2}}});
  chem_cfg["initial_totals"] = {{"A", 0.1}, {"B", 0.2}};
  auto chem = reg.create("chemistry", "equilibrium-reference", chem_cfg, mesh);
  auto tr = reg.create("transport", "fv-reference",
                       ConfigTree::parse(R"json({"species": [{"name": "A", "diffusion": 0.1}, {"name": "B"}]})json"),
                       mesh);
  tr->set_input_field("flux", pt::uniform_x_flux(*mesh, 0.3));
  CoupledState s = state_from(*chem);
  CouplingConfig cfg;
  const auto sia = sia_step(*tr, chem.get(), s, 1.0, cfg, MatrixXd::Zero(5, 2));
  EXPECT_EQ(sia.report.iterations, 1);
  EXPECT_EQ(sia.report.residual, 0.0);
  const auto snia = snia_step(*tr, chem.get(), s, 1.0, MatrixXd::Zero(5, 2));
  EXPECT_EQ(sia.state.totals, snia.state.totals);
}

TEST(Sia, WarmAndColdStartAgree) {
  auto cold = closed_column(SplittingMode::SIA);
  cold.coupling.sia_tol = 1e-10;
  auto warm = cold;
  warm.coupling.sia_warm_start = true;
  const auto a = run_simulation(cold), b = run_simulation(warm);
  ASSERT_TRUE(a.ok && b.ok);
  const double rel = (a.final_state.totals - b.final_state.totals).norm() / a.final_state.totals.norm();
  EXPECT_LE(rel, 10 * 1e-10);
  int cold_iters = 0, warm_iters = 0;
  for (const auto& r : a.reports) cold_iters += r.iterations;
  for (const auto& r : b.reports) warm_iters += r.iterations;
  EXPECT_LE(warm_iters, cold_iters);
}

TEST(Sia, SingleIterationEqualsSnia) {
  auto snia = closed_column(SplittingMode::SNIA);
  auto sia = closed_column(SplittingMode::SIA);
  sia.coupling.sia_max_iters = 1;
  snia.coupling.porosity_feedback = sia.coupling.porosity_feedback = true;
  const auto a = run_simulation(snia), b = run_simulation(sia);
  ASSERT_TRUE(a.ok && b.ok);
  EXPECT_EQ(a.final_state.totals, b.final_state.totals);
  EXPECT_EQ(a.final_state.minerals, b.final_state.minerals);
  EXPECT_EQ(a.final_state.porosity, b.final_state.porosity);
  EXPECT_EQ(a.steps, b.steps);
}

TEST(Sia, PersistentNonConvergenceAborts) {
  auto s = closed_column(SplittingMode::SIA);
  s.coupling.sia_max_iters = 2;
  s.coupling.sia_tol = 1e-300;
  const auto r = run_simulation(s);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.steps, 3);
  EXPECT_EQ(r.warnings.size(), 3u);
  EXPECT_NE(r.message.find("3 consecutive"), std::string::npos);
}

TEST(Simulation, NullPhysicsSingleStep) {
  SimulationSetup s;
  s.nx = 4;
  s.transport = ConfigTree::parse(R"json({"species": [{"name": "A"}], "initial": {"A": 0.7}})json");
  s.coupling.dt = s.coupling.t_end = 3.0;
  const auto r = run_simulation(s);
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.steps, 1);
  EXPECT_EQ(r.final_state.time, 3.0);
  EXPECT_TRUE((r.final_state.totals.array() == 0.7).all());
}

TEST(Simulation, ClosedSystemConservation) {
  for (auto mode : {SplittingMode::SNIA, SplittingMode::SIA}) {
    auto s = closed_column(mode);
    s.coupling.porosity_feedback = true;
    double worst = 0.0;
    const auto r = run_simulation(s, component::builtin_registry(),
                                  [&](const StepRecord& rec) { worst = std::max(worst, rec.ledger->max_relative_error); });
    ASSERT_TRUE(r.ok) << r.message;
    EXPECT_LE(worst, 1e-8);
    EXPECT_GT(r.final_state.minerals.maxCoeff(), 0.0) << "no precipitation front";
  }
}

TEST(Simulation, LedgerWithDecayPackageAndInflow) {
  SimulationSetup s;
  s.nx = 10;
  s.dx = 0.1;
  s.flow = ConfigTree::parse(R"json({"conductivity": 1e-2, "boundary_heads": {"LEFT": 1, "RIGHT": 0}})json");
  s.transport = ConfigTree::parse(R"json({
    "species": [{"name": "P", "diffusion": 1e-4, "decay_rate": 1e-2, "retardation": 3},
                {"name": "D", "diffusion": 1e-4, "decay_rate": 5e-3, "parent": "P"}],
    "porosity": 0.3, "boundary_concentrations": {"LEFT": {"P": 0.5, "D": 0.1}}})json");
  s.packages.push_back({(VectorXd(2) << 2.0, 0.0).finished(), 0.05, 3});
  s.coupling.mode = SplittingMode::SNIA;
  s.coupling.dt = 1.0;
  s.coupling.t_end = 30.0;
  const auto r = run_simulation(s);
  ASSERT_TRUE(r.ok);
  EXPECT_LE(r.ledger.max_relative_error, 1e-10);
}

TEST(Simulation, PrecipitationNeverRaisesPorosity) {
  auto s = closed_column(SplittingMode::SIA);
  s.coupling.porosity_feedback = true;
  MatrixXd prev_minerals;
  VectorXd prev_phi;
  int precipitating = 0;
  const auto sys = chemistry::chemical_system_from_config(*s.chemistry);
  run_simulation(s, component::builtin_registry(), [&](const StepRecord& rec) {
    if (rec.step > 0) {
      for (Index c = 0; c < rec.state->minerals.rows(); ++c) {
        const double dv = (rec.state->minerals.row(c) - prev_minerals.row(c)).dot(sys.molar_volumes());
        if (dv > 0.0) {
          ++precipitating;
          EXPECT_LE(rec.state->porosity[c], prev_phi[c]) << "cell " << c << " step " << rec.step;
        }
      }
    }
    prev_minerals = rec.state->minerals;
    prev_phi = rec.state->porosity;
  });
  EXPECT_GT(precipitating, 0);
}

TEST(Simulation, SwappedTransportIsIdentical) {
  auto base = closed_column(SplittingMode::SIA);
  base.coupling.porosity_feedback = true;
  auto swapped = base;
  swapped.transport_impl = "fv-mirror";
  const auto reg = pt::test_registry();
  const auto a = run_simulation(base, reg), b = run_simulation(swapped, reg);
  ASSERT_TRUE(a.ok && b.ok);
  EXPECT_EQ(a.final_state.totals, b.final_state.totals);
  EXPECT_EQ(a.final_state.minerals, b.final_state.minerals);
  EXPECT_EQ(a.final_state.porosity, b.final_state.porosity);
}

TEST(Simulation, ConfigurationErrorsThrow) {
  auto s = closed_column(SplittingMode::SIA);
  s.transport_impl = "nope";
  EXPECT_THROW(run_simulation(s), UnknownImplementation);
  s = closed_column(SplittingMode::SIA);
  s.packages.push_back({VectorXd::Ones(2), 1.0, 99});
  EXPECT_THROW(run_simulation(s), InvalidArgument);
}
