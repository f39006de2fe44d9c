#pragma once

// Components that exist only for tests: a linear partition "chemistry" and a second
// registration of the reference transport.

#include <memory>

#include "porecouple/component/registry.hpp"
#include "porecouple/transport/transport_component.hpp"

namespace porecouple::testing {

using component::ComponentStatus;
using component::ConfigTree;
using component::FieldSpec;
using meshfield::Field;
using meshfield::Support;

/// Splits the total content N = T + s/phi of one species evenly: c = N/2, s = phi N/2.
class LinearPartition : public component::NumericalComponent {
 protected:
  void do_initialize(const ConfigTree&) override {
    const Index n = mesh().n_cells();
    totals_ = meshfield::make_field("totals", Support::Cells, n, {"A"});
    sorbed_ = meshfield::make_field("minerals", Support::Cells, n, {"S"});
    porosity_ = meshfield::make_field("porosity", Support::Cells, n, {"porosity"});
    porosity_.values.setOnes();
  }
  void do_set_input(const std::string& name, const Field& f) override {
    if (name == "totals") totals_.values = f.values;
    if (name == "minerals") sorbed_.values = f.values;
    if (name == "porosity") porosity_.values = f.values;
  }
  ComponentStatus do_compute(double, double) override {
    const auto phi = porosity_.values.col(0).array();
    const Eigen::ArrayXd content = totals_.values.col(0).array() + sorbed_.values.col(0).array() / phi;
    totals_.values.col(0) = (0.5 * content).matrix();
    sorbed_.values.col(0) = (0.5 * content * phi).matrix();
    return ComponentStatus::success();
  }
  Field do_get_output(const std::string& name) const override {
    if (name == "totals") return totals_;
    if (name == "minerals") return sorbed_;
    return porosity_;
  }
  std::vector<FieldSpec> do_inputs() const override {
    return {{"totals", Support::Cells, 1}, {"minerals", Support::Cells, 1}, {"porosity", Support::Cells, 1}};
  }
  std::vector<FieldSpec> do_outputs() const override { return do_inputs(); }

 private:
  Field totals_, sorbed_, porosity_;
};

/// The reference transport under another name, for swap tests.
class MirrorTransport final : public transport::TransportComponent {};

inline component::Registry test_registry() {
  auto r = component::builtin_registry();
  r.register_factory("transport", "fv-mirror", [] { return std::make_unique<MirrorTransport>(); });
  r.register_factory("chemistry", "linear-partition", [] { return std::make_unique<LinearPartition>(); });
  return r;
}

}  // namespace porecouple::testing
