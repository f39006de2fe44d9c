#pragma once

#include <memory>

#include "porecouple/meshfield/mesh.hpp"
#include "porecouple/transport/transport.hpp"

namespace porecouple::testing {

/// Face flux q*area along +x on every x-normal face, zero elsewhere.
inline meshfield::Field uniform_x_flux(const meshfield::Mesh& mesh, double darcy_velocity) {
  auto f = meshfield::make_field("flux", meshfield::Support::Faces, mesh.n_faces(), {"flux"}, "m3/s");
  for (Index i = 0; i < mesh.n_faces(); ++i) {
    const auto& face = mesh.face(i);
    if (std::abs(face.normal.x()) > 0.5) f.values(i, 0) = darcy_velocity * face.area * face.normal.x();
  }
  return f;
}

/// Transport parameters on `mesh` with uniform porosity and zero flux.
inline transport::TransportParams basic_params(std::shared_ptr<const meshfield::Mesh> mesh, double porosity,
                                               std::vector<transport::SpeciesParams> species) {
  transport::TransportParams p;
  p.porosity = meshfield::make_field("porosity", meshfield::Support::Cells, mesh->n_cells(), {"porosity"});
  p.porosity.values.setConstant(porosity);
  p.face_flux = meshfield::make_field("flux", meshfield::Support::Faces, mesh->n_faces(), {"flux"});
  p.species = std::move(species);
  p.mesh = std::move(mesh);
  return p;
}

inline transport::TransportState state_of(const meshfield::Mesh& mesh, const MatrixXd& conc,
                                          std::vector<std::string> names) {
  transport::TransportState s;
  s.conc = meshfield::make_field("conc", meshfield::Support::Cells, mesh.n_cells(), std::move(names));
  s.conc.values = conc;
  return s;
}

}  // namespace porecouple::testing
