#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "porecouple/chemistry/chemistry_component.hpp"
#include "porecouple/chemistry/equilibrium.hpp"
#include "porecouple/component/registry.hpp"
#include "porecouple/core/error.hpp"
#include "support/oracles.hpp"

using namespace porecouple;
using namespace porecouple::chemistry;
namespace pt = porecouple::testing;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ChemState start(Index n_primaries, Index n_minerals = 0, double porosity = 1.0) {
  return {VectorXd::Zero(n_primaries), VectorXd::Zero(n_minerals), porosity};
}

ChemicalSystem dimer(double K) { return ChemicalSystem({"A"}, {{"A2", vec({2.0}), std::log10(K)}}, {}); }

ChemicalSystem solid_a(double ksp, double molar_volume = 1e-5) {
  return ChemicalSystem({"A"}, {}, {{"A(s)", vec({1.0}), std::log10(ksp), molar_volume}});
}

// Two or three primaries, a few complexes and minerals with random small-integer
// stoichiometry.
ChemicalSystem random_system(std::mt19937_64& rng, Index n_minerals) {
  std::uniform_int_distribution<int> nu(0, 2);
  std::uniform_real_distribution<double> logk(-2.0, 3.0);
  const Index nc = 2 + static_cast<Index>(rng() % 2);
  std::vector<std::string> primaries;
  for (Index i = 0; i < nc; ++i) primaries.push_back("P" + std::to_string(i));
  std::vector<AqueousComplex> complexes;
  for (int j = 0; j < 3; ++j) {
    VectorXd s(nc);
    for (Index i = 0; i < nc; ++i) s[i] = nu(rng);
    if (s.sum() < 2) s[j % nc] += 2;
    complexes.push_back({"X" + std::to_string(j), s, logk(rng)});
  }
  std::vector<MineralPhase> minerals;
  for (Index k = 0; k < n_minerals; ++k) {
    VectorXd s = VectorXd::Zero(nc);
    s[k % nc] = 1.0;
    s[(k + 1) % nc] += nu(rng);
    minerals.push_back({"M" + std::to_string(k), s, logk(rng) - 4.0, 1e-5});
  }
  return ChemicalSystem(primaries, complexes, minerals);
}

VectorXd random_totals(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> e(-4.0, 0.0);
  VectorXd t(n);
  for (Index i = 0; i < n; ++i) t[i] = std::pow(10.0, e(rng));
  return t;
}

}  // namespace

TEST(Speciate, NoComplexesIsIdentity) {
  const ChemicalSystem sys({"A", "B"}, {}, {});
  const auto s = speciate(sys, vec({0.3, 2e-6}), start(2), 1e-12);
  EXPECT_NEAR(std::exp(s.ln_c[0]), 0.3, 1e-12 * 0.3);
  EXPECT_NEAR(std::exp(s.ln_c[1]), 2e-6, 1e-12 * 2e-6);
}

TEST(Speciate, Dimer) {
  const auto sys = dimer(100.0);
  const auto s = speciate(sys, vec({0.01}), start(1), 1e-13);
  const double c = std::exp(s.ln_c[0]);
  EXPECT_NEAR(c, pt::dimer_free(100.0, 0.01), 1e-12);
  EXPECT_NEAR(c, 5.0e-3, 1e-12);
  EXPECT_NEAR(complex_concentrations(sys, s.ln_c)[0], 2.5e-3, 1e-12);
  EXPECT_NEAR(totals_from_state(sys, s)[0], 0.01, 1e-13);
}

TEST(Speciate, DimerAcrossScales) {
  for (double K : {1e-3, 1.0, 1e4}) {
    for (double T : {1e-6, 1e-2, 10.0}) {
      const auto s = speciate(dimer(K), vec({T}), start(1), 1e-13);
      EXPECT_NEAR(std::exp(s.ln_c[0]), pt::dimer_free(K, T), 1e-10 * T) << K << " " << T;
    }
  }
}

TEST(Speciate, IndependentPrimariesDecouple) {
  const ChemicalSystem both({"A", "B"}, {{"A2", vec({2, 0}), 2.0}, {"B3", vec({0, 3}), 1.0}}, {});
  const ChemicalSystem a({"A"}, {{"A2", vec({2}), 2.0}}, {});
  const ChemicalSystem b({"B"}, {{"B3", vec({3}), 1.0}}, {});
  const auto sb = speciate(both, vec({0.05, 0.7}), start(2), 1e-13);
  EXPECT_NEAR(sb.ln_c[0], speciate(a, vec({0.05}), start(1), 1e-13).ln_c[0], 1e-11);
  EXPECT_NEAR(sb.ln_c[1], speciate(b, vec({0.7}), start(1), 1e-13).ln_c[0], 1e-11);
}

TEST(Speciate, RejectsNegativeTotals) {
  EXPECT_THROW(speciate(dimer(1.0), vec({-1.0}), start(1), 1e-12), InvalidArgument);
}

TEST(Speciate, ZeroTotalSitsAtFloor) {
  const ChemicalSystem sys({"A", "B"}, {{"AB", vec({1, 1}), 1.0}}, {});
  const auto s = speciate(sys, vec({0.1, 0.0}), start(2), 1e-12);
  EXPECT_GE(s.ln_c[1], kLnConcentrationFloor);
  EXPECT_LE(std::exp(s.ln_c[1]), 1e-30);
  EXPECT_NEAR(std::exp(s.ln_c[0]), 0.1, 1e-12);
}

TEST(TotalsFromState, FloorBehaviour) {
  const auto sys = dimer(10.0);
  ChemState s{vec({-1000.0}), VectorXd(), 1.0};
  const double floor = std::exp(kLnConcentrationFloor);
  EXPECT_NEAR(totals_from_state(sys, s)[0], floor + 2.0 * 10.0 * floor * floor, 1e-300);
}

TEST(EquilibrateCell, SolubilityCap) {
  const auto sys = solid_a(1e-4);
  const auto eq = equilibrate_cell(sys, vec({1e-3}), start(1, 1), 1e-13);
  EXPECT_NEAR(std::exp(eq.state.ln_c[0]), 1e-4, 1e-15);
  EXPECT_NEAR(eq.dissolved[0], 1e-4, 1e-15);
  EXPECT_NEAR(eq.state.mineral_moles[0], 9e-4, 1e-15);
}

TEST(EquilibrateCell, Undersaturated) {
  const auto sys = solid_a(1e-4);
  auto guess = start(1, 1);
  guess.mineral_moles[0] = 1.0;
  const auto eq = equilibrate_cell(sys, vec({5e-5}), guess, 1e-13);
  EXPECT_EQ(eq.state.mineral_moles[0], 0.0);
  EXPECT_NEAR(std::exp(eq.state.ln_c[0]), 5e-5, 1e-17);
}

TEST(EquilibrateCell, MineralsPerBulk) {
  const auto sys = solid_a(1e-4);
  const auto eq = equilibrate_cell(sys, vec({1e-3}), start(1, 1, 0.25), 1e-13);
  EXPECT_NEAR(eq.state.mineral_moles[0], 9e-4 * 0.25, 1e-15);
  EXPECT_NEAR(mineral_bound_totals(sys, eq.state)[0], 9e-4, 1e-15);
}

TEST(EquilibrateCell, NoMineralsMatchesSpeciate) {
  const ChemicalSystem sys({"A", "B"}, {{"AB", vec({1, 1}), 1.5}, {"A2B", vec({2, 1}), 3.0}}, {});
  const auto T = vec({0.02, 0.03});
  const auto eq = equilibrate_cell(sys, T, start(2), 1e-13);
  const auto sp = speciate(sys, T, start(2), 1e-13);
  EXPECT_LE((eq.state.ln_c - sp.ln_c).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(eq.dissolved, T);
}

TEST(ChemistryProperties, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sys = random_system(rng, 2);
    std::vector<Index> active;
    if (trial % 3 != 0) active.push_back(0);
    if (trial % 2 == 0) active.push_back(1);
    const EquilibriumEquations eqs(sys, random_totals(rng, sys.n_primaries()), active);
    VectorXd x(eqs.size());
    for (Index i = 0; i < x.size(); ++i) x[i] = i < sys.n_primaries() ? u(rng) : std::exp(u(rng));
    const MatrixXd J = eqs.jacobian(x);
    MatrixXd fd(J.rows(), J.cols());
    for (Index j = 0; j < x.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      fd.col(j) = (eqs.residual(xp) - eqs.residual(xm)) / (2 * h);
    }
    for (Index r = 0; r < J.rows(); ++r) {
      const double scale = std::max(J.row(r).cwiseAbs().maxCoeff(), 1e-300);
      EXPECT_LE((J.row(r) - fd.row(r)).cwiseAbs().maxCoeff() / scale, 1e-6) << "trial " << trial << " row " << r;
    }
  }
}

TEST(ChemistryProperties, GuessInvariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = random_system(rng, 0);
    const auto T = random_totals(rng, sys.n_primaries());
    const auto ref = speciate(sys, T, start(sys.n_primaries()), 1e-13);
    for (int g = 0; g < 10; ++g) {
      auto guess = ref;
      for (Index i = 0; i < guess.ln_c.size(); ++i) guess.ln_c[i] += shift(rng);
      const auto s = speciate(sys, T, guess, 1e-13);
      EXPECT_LE((s.ln_c - ref.ln_c).cwiseAbs().maxCoeff(), 1e-9) << "trial " << trial;
    }
  }
}

TEST(ChemistryProperties, MassBalanceAndComplementarity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> phi(0.05, 1.0);
  int with_mineral = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto sys = random_system(rng, 1 + static_cast<Index>(trial % 3));
    const auto T = random_totals(rng, sys.n_primaries());
    const auto eq = equilibrate_cell(sys, T, start(sys.n_primaries(), sys.n_minerals(), phi(rng)), 1e-13);
    const VectorXd content = eq.dissolved + mineral_bound_totals(sys, eq.state);
    for (Index i = 0; i < T.size(); ++i) EXPECT_NEAR(content[i], T[i], 1e-10 * T[i]);
    EXPECT_LE((totals_from_state(sys, eq.state) - eq.dissolved).cwiseQuotient(T).cwiseAbs().maxCoeff(), 1e-10);
    const VectorXd si = saturation_indices(sys, eq.state.ln_c);
    for (Index k = 0; k < sys.n_minerals(); ++k) {
      EXPECT_GE(eq.state.mineral_moles[k], 0.0);
      if (eq.state.mineral_moles[k] > 0.0) {
        ++with_mineral;
        EXPECT_LE(std::abs(si[k]), kSaturationTolerance) << "trial " << trial;
      } else {
        EXPECT_LE(si[k], kSaturationTolerance) << "trial " << trial;
      }
    }
  }
  EXPECT_GT(with_mineral, 10);
}

TEST(Porosity, Examples) {
  const auto sys = solid_a(1e-4, 1e-5);
  ChemState s{vec({0.0}), vec({10.0}), 0.3};
  EXPECT_DOUBLE_EQ(update_porosity(sys, s, 0.3, vec({10.0})).porosity, 0.3);
  const auto up = update_porosity(sys, s, 0.3, vec({0.0}));
  EXPECT_NEAR(up.porosity, 0.2999, 1e-15);
  EXPECT_FALSE(up.clamped);

  const auto clamp_hi = update_porosity(sys, s, 0.9, vec({2e4}));
  EXPECT_EQ(clamp_hi.porosity, 1.0);
  EXPECT_TRUE(clamp_hi.clamped);
  EXPECT_FALSE(clamp_hi.warning.empty());

  ChemState heavy{vec({0.0}), vec({1e6}), 0.3};
  const auto clamp_lo = update_porosity(sys, heavy, 0.3, vec({0.0}));
  EXPECT_EQ(clamp_lo.porosity, kMinPorosity);
  EXPECT_TRUE(clamp_lo.clamped);
}

TEST(ChemicalSystemCheck, RejectsBadDefinitions) {
  EXPECT_THROW(ChemicalSystem({"A"}, {{"X", vec({1, 1}), 0.0}}, {}), InvalidArgument);
  EXPECT_THROW(ChemicalSystem({"A"}, {{"X", vec({1}), INFINITY}}, {}), InvalidArgument);
  EXPECT_THROW(ChemicalSystem({"A"}, {}, {{"M", vec({1}), 0.0, 0.0}}), InvalidArgument);
}

TEST(EquilibriumComponent, PrecipitatesAndUpdatesPorosity) {
  auto mesh = std::make_shared<const meshfield::Mesh>(meshfield::build_structured_mesh(2, 1, 1.0, 1.0));
  const auto config = component::ConfigTree::parse(R"json({
    "primaries": ["A"],
    "minerals": [{"name": "A(s)", "stoichiometry": {"A": 1}, "logKsp": -4, "molar_volume": 1e-2}],
    "porosity": 0.5,
    "initial_totals": {"A": 5e-5}
  })json");
  auto c = component::builtin_registry().create("chemistry", "equilibrium-reference", config, mesh);
  auto totals = c->get_output_field("totals");
  EXPECT_NEAR(totals.values(0, 0), 5e-5, 1e-18);
  totals.values(1, 0) = 1e-3;
  c->set_input_field("totals", totals);
  ASSERT_TRUE(c->compute_time_step(0.0, 1.0).ok);
  const auto out = c->get_output_field("totals");
  const auto minerals = c->get_output_field("minerals");
  const auto phi = c->get_output_field("porosity");
  EXPECT_NEAR(out.values(0, 0), 5e-5, 1e-18);
  EXPECT_NEAR(out.values(1, 0), 1e-4, 1e-16);
  EXPECT_EQ(minerals.values(0, 0), 0.0);
  EXPECT_NEAR(minerals.values(1, 0), 9e-4 * 0.5, 1e-16);
  EXPECT_EQ(phi.values(0, 0), 0.5);
  EXPECT_NEAR(phi.values(1, 0), 0.5 - 1e-2 * 4.5e-4, 1e-15);
}
