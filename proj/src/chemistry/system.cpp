#include "porecouple/chemistry/system.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "porecouple/core/error.hpp"

namespace porecouple::chemistry {

namespace {

const double kLn10 = std::log(10.0);

VectorXd stoichiometry_from_config(const nlohmann::json& node, const std::vector<std::string>& primaries,
                                   const std::string& owner) {
  if (!node.is_object()) throw InvalidArgument(owner + ".stoichiometry must be an object");
  VectorXd nu = VectorXd::Zero(static_cast<Index>(primaries.size()));
  for (const auto& [name, value] : node.items()) {
    auto it = std::find(primaries.begin(), primaries.end(), name);
    if (it == primaries.end()) {
      throw InvalidArgument(owner + " references unknown primary '" + name + "'");
    }
    if (!value.is_number()) throw InvalidArgument(owner + ".stoichiometry." + name + " must be a number");
    nu[it - primaries.begin()] = value.get<double>();
  }
  return nu;
}

}  // namespace

ChemicalSystem::ChemicalSystem(std::vector<std::string> primaries,
                               std::vector<AqueousComplex> complexes,
                               std::vector<MineralPhase> minerals)
    : primaries_(std::move(primaries)), complexes_(std::move(complexes)), minerals_(std::move(minerals)) {
  if (primaries_.empty()) throw InvalidArgument("chemical system needs at least one primary");
  std::set<std::string> names(primaries_.begin(), primaries_.end());
  if (names.size() != primaries_.size()) throw InvalidArgument("duplicate primary name");
  const Index nc = n_primaries();

  complex_stoich_.resize(n_complexes(), nc);
  ln_k_.resize(n_complexes());
  for (Index j = 0; j < n_complexes(); ++j) {
    const auto& cx = complexes_[static_cast<std::size_t>(j)];
    if (cx.stoichiometry.size() != nc) throw InvalidArgument("complex '" + cx.name + "' stoichiometry has wrong length");
    if (!std::isfinite(cx.log10_k)) throw InvalidArgument("complex '" + cx.name + "' has non-finite logK");
    if (!names.insert(cx.name).second) throw InvalidArgument("duplicate species name '" + cx.name + "'");
    complex_stoich_.row(j) = cx.stoichiometry.transpose();
    ln_k_[j] = kLn10 * cx.log10_k;
  }

  mineral_stoich_.resize(n_minerals(), nc);
  ln_ksp_.resize(n_minerals());
  molar_volumes_.resize(n_minerals());
  for (Index k = 0; k < n_minerals(); ++k) {
    const auto& m = minerals_[static_cast<std::size_t>(k)];
    if (m.stoichiometry.size() != nc) throw InvalidArgument("mineral '" + m.name + "' stoichiometry has wrong length");
    if (!std::isfinite(m.log10_ksp)) throw InvalidArgument("mineral '" + m.name + "' has non-finite logKsp");
    if (!(m.molar_volume > 0.0)) throw InvalidArgument("mineral '" + m.name + "' needs a positive molar volume");
    if (!names.insert(m.name).second) throw InvalidArgument("duplicate species name '" + m.name + "'");
    mineral_stoich_.row(k) = m.stoichiometry.transpose();
    ln_ksp_[k] = kLn10 * m.log10_ksp;
    molar_volumes_[k] = m.molar_volume;
  }
}

std::vector<std::string> ChemicalSystem::mineral_names() const {
  std::vector<std::string> out;
  for (const auto& m : minerals_) out.push_back(m.name);
  return out;
}

std::optional<Index> ChemicalSystem::primary_index(const std::string& name) const {
  auto it = std::find(primaries_.begin(), primaries_.end(), name);
  if (it == primaries_.end()) return std::nullopt;
  return static_cast<Index>(it - primaries_.begin());
}

ChemicalSystem chemical_system_from_config(const nlohmann::json& config) try {
  if (!config.contains("primaries") || !config.at("primaries").is_array()) {
    throw InvalidArgument("chemistry.primaries must be an array of names");
  }
  const auto primaries = config.at("primaries").get<std::vector<std::string>>();
  std::vector<AqueousComplex> complexes;
  if (config.contains("complexes")) {
    for (const auto& c : config.at("complexes")) {
      AqueousComplex cx;
      cx.name = c.at("name").get<std::string>();
      cx.stoichiometry = stoichiometry_from_config(c.at("stoichiometry"), primaries, "complex '" + cx.name + "'");
      cx.log10_k = c.at("logK").get<double>();
      complexes.push_back(std::move(cx));
    }
  }
  std::vector<MineralPhase> minerals;
  if (config.contains("minerals")) {
    for (const auto& m : config.at("minerals")) {
      MineralPhase mp;
      mp.name = m.at("name").get<std::string>();
      mp.stoichiometry = stoichiometry_from_config(m.at("stoichiometry"), primaries, "mineral '" + mp.name + "'");
      mp.log10_ksp = m.at("logKsp").get<double>();
      mp.molar_volume = m.at("molar_volume").get<double>();
      minerals.push_back(std::move(mp));
    }
  }
  return ChemicalSystem(primaries, std::move(complexes), std::move(minerals));
} catch (const nlohmann::json::exception& e) {
  throw InvalidArgument(std::string("malformed chemistry block: ") + e.what());
}

}  // namespace porecouple::chemistry
