#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "porecouple/core/types.hpp"

namespace porecouple::chemistry {

/// Aqueous complex formed from primaries: c = 10^log10_k * prod c_i^stoichiometry_i.
struct AqueousComplex {
  std::string name;
  VectorXd stoichiometry;
  double log10_k = 0.0;
};

/// Mineral dissolving into primaries: equilibrium when prod c_i^stoichiometry_i = Ksp.
struct MineralPhase {
  std::string name;
  VectorXd stoichiometry;
  double log10_ksp = 0.0;
  double molar_volume = 0.0;  ///< m3/mol
};

/// Reaction database. Immutable after construction.
class ChemicalSystem {
 public:
  ChemicalSystem(std::vector<std::string> primaries, std::vector<AqueousComplex> complexes,
                 std::vector<MineralPhase> minerals);

  Index n_primaries() const { return static_cast<Index>(primaries_.size()); }
  Index n_complexes() const { return static_cast<Index>(complexes_.size()); }
  Index n_minerals() const { return static_cast<Index>(minerals_.size()); }

  const std::vector<std::string>& primaries() const { return primaries_; }
  const std::vector<AqueousComplex>& complexes() const { return complexes_; }
  const std::vector<MineralPhase>& minerals() const { return minerals_; }
  std::vector<std::string> mineral_names() const;

  /// n_complexes x n_primaries.
  const MatrixXd& complex_stoichiometry() const { return complex_stoich_; }
  /// Natural-log formation constants.
  const VectorXd& ln_k() const { return ln_k_; }
  /// n_minerals x n_primaries.
  const MatrixXd& mineral_stoichiometry() const { return mineral_stoich_; }
  const VectorXd& ln_ksp() const { return ln_ksp_; }
  const VectorXd& molar_volumes() const { return molar_volumes_; }

  std::optional<Index> primary_index(const std::string& name) const;

 private:
  std::vector<std::string> primaries_;
  std::vector<AqueousComplex> complexes_;
  std::vector<MineralPhase> minerals_;
  MatrixXd complex_stoich_;
  VectorXd ln_k_;
  MatrixXd mineral_stoich_;
  VectorXd ln_ksp_;
  VectorXd molar_volumes_;
};

/// Reads {primaries, complexes: [{name, stoichiometry: {primary: nu}, logK}],
/// minerals: [{name, stoichiometry, logKsp, molar_volume}]}.
ChemicalSystem chemical_system_from_config(const nlohmann::json& config);

}  // namespace porecouple::chemistry
