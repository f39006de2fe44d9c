#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "porecouple/meshfield/field.hpp"
#include "porecouple/meshfield/mesh.hpp"

namespace porecouple::component {

/// Hierarchical key-value configuration, deserialized from the scenario file.
using ConfigTree = nlohmann::json;

using meshfield::Field;
using meshfield::Mesh;
using meshfield::Support;

struct ComponentStatus {
  bool ok = true;
  std::string message;
  std::optional<double> suggested_dt;

  static ComponentStatus success() { return {}; }
  static ComponentStatus failure(std::string message,
                                 std::optional<double> suggested_dt = std::nullopt) {
    if (message.empty()) message = "unspecified failure";
    return {false, std::move(message), suggested_dt};
  }
};

/// Name and shape of a field a component accepts or produces.
struct FieldSpec {
  std::string name;
  Support support = Support::Cells;
  Index n_components = 1;
};

/// Uniform interface of a numerical component. The public methods enforce the
/// lifecycle and the declared-field contract, then defer to the do_* hooks.
///
/// Fields cross the interface by value: set_input_field copies in, get_output_field
/// copies out.
class NumericalComponent {
 public:
  virtual ~NumericalComponent() = default;

  NumericalComponent() = default;
  NumericalComponent(const NumericalComponent&) = delete;
  NumericalComponent& operator=(const NumericalComponent&) = delete;

  void initialize(const ConfigTree& config, std::shared_ptr<const Mesh> mesh);
  void set_input_field(const std::string& name, const Field& field);
  ComponentStatus compute_time_step(double t, double dt);
  Field get_output_field(const std::string& name) const;
  std::vector<FieldSpec> declared_inputs() const;
  std::vector<FieldSpec> declared_outputs() const;
  void finalize();

  bool initialized() const { return state_ == Lifecycle::Ready; }
  bool finalized() const { return state_ == Lifecycle::Finalized; }

 protected:
  virtual void do_initialize(const ConfigTree& config) = 0;
  virtual void do_set_input(const std::string& name, const Field& field) = 0;
  virtual ComponentStatus do_compute(double t, double dt) = 0;
  virtual Field do_get_output(const std::string& name) const = 0;
  virtual std::vector<FieldSpec> do_inputs() const = 0;
  virtual std::vector<FieldSpec> do_outputs() const = 0;
  virtual void do_finalize() {}

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

 private:
  enum class Lifecycle { Created, Ready, Finalized };

  void require_ready(const char* call) const;

  Lifecycle state_ = Lifecycle::Created;
  std::shared_ptr<const Mesh> mesh_;
};

}  // namespace porecouple::component
