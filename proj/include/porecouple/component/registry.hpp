#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "porecouple/component/component.hpp"

namespace porecouple::component {

using ComponentFactory = std::function<std::unique_ptr<NumericalComponent>()>;

/// Maps (application, implementation name) to a component factory.
class Registry {
 public:
  /// Throws DuplicateKey when the pair is already present.
  void register_factory(const std::string& application, const std::string& impl_name,
                        ComponentFactory factory);

  /// Builds and initializes a component. Throws UnknownImplementation listing the
  /// registered names, or whatever the component's initialize raises.
  std::unique_ptr<NumericalComponent> create(const std::string& application,
                                             const std::string& impl_name,
                                             const ConfigTree& config,
                                             std::shared_ptr<const Mesh> mesh) const;

  bool contains(const std::string& application, const std::string& impl_name) const;

  /// Registered pairs in lexicographic order.
  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  std::map<std::pair<std::string, std::string>, ComponentFactory> factories_;
};

/// Registers flow/darcy-reference, transport/fv-reference, chemistry/equilibrium-reference.
void register_builtin_components(Registry& registry);

/// A registry holding the built-in components.
Registry builtin_registry();

}  // namespace porecouple::component
