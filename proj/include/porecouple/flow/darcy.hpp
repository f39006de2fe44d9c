#pragma once

#include <map>
#include <memory>
#include <string>

#include "porecouple/meshfield/field.hpp"
#include "porecouple/meshfield/mesh.hpp"

namespace porecouple::flow {

using meshfield::Field;
using meshfield::Mesh;

/// Steady saturated flow. Boundary tags listed in `fixed_heads` carry a Dirichlet head;
/// every other boundary face is no-flow.
struct FlowProblem {
  std::shared_ptr<const Mesh> mesh;
  Field conductivity;  ///< CELLS, 1 component, m/s
  std::map<std::string, double> fixed_heads;
};

struct FlowSolution {
  Field head;       ///< CELLS, m
  Field face_flux;  ///< FACES, m3/s, signed along the face normal
};

/// Two-point flux approximation with distance-weighted harmonic face conductivity.
/// Throws IllPosedProblem without any fixed-head boundary face.
FlowSolution solve_darcy(const FlowProblem& problem, double tol);

/// Kozeny-Carman conductivity K0 (phi/phi0)^3 ((1-phi0)/(1-phi))^2.
double kozeny_carman(double k0, double phi, double phi0);

}  // namespace porecouple::flow
