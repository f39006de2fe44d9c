#include "porecouple/component/registry.hpp"

#include "porecouple/chemistry/chemistry_component.hpp"
#include "porecouple/core/error.hpp"
#include "porecouple/flow/darcy_component.hpp"
#include "porecouple/transport/transport_component.hpp"

namespace porecouple::component {

void Registry::register_factory(const std::string& application, const std::string& impl_name,
                                ComponentFactory factory) {
  if (!factory) throw InvalidArgument("register_factory: empty factory");
  auto [it, inserted] = factories_.emplace(std::make_pair(application, impl_name), std::move(factory));
  if (!inserted) {
    throw DuplicateKey("component (" + application + ", " + impl_name + ") is already registered");
  }
}

std::unique_ptr<NumericalComponent> Registry::create(const std::string& application,
                                                     const std::string& impl_name,
                                                     const ConfigTree& config,
                                                     std::shared_ptr<const Mesh> mesh) const {
  auto it = factories_.find({application, impl_name});
  if (it == factories_.end()) {
    std::string known;
    for (const auto& [key, _] : factories_) {
      if (key.first != application) continue;
      if (!known.empty()) known += ", ";
      known += key.second;
    }
    throw UnknownImplementation("no implementation '" + impl_name + "' for application '" +
                                application + "' (registered: " +
                                (known.empty() ? std::string("none") : known) + ")");
  }
  auto component = it->second();
  component->initialize(config, std::move(mesh));
  return component;
}

bool Registry::contains(const std::string& application, const std::string& impl_name) const {
  return factories_.count({application, impl_name}) != 0;
}

std::vector<std::pair<std::string, std::string>> Registry::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(factories_.size());
  for (const auto& [key, _] : factories_) out.push_back(key);
  return out;
}

void register_builtin_components(Registry& registry) {
  registry.register_factory("flow", "darcy-reference",
                            [] { return std::make_unique<flow::DarcyComponent>(); });
  registry.register_factory("transport", "fv-reference",
                            [] { return std::make_unique<transport::TransportComponent>(); });
  registry.register_factory("chemistry", "equilibrium-reference",
                            [] { return std::make_unique<chemistry::EquilibriumComponent>(); });
}

Registry builtin_registry() {
  Registry registry;
  register_builtin_components(registry);
  return registry;
}

}  // namespace porecouple::component
