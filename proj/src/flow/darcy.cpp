#include "porecouple/flow/darcy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "porecouple/core/error.hpp"
#include "porecouple/numerics/sparse.hpp"

namespace porecouple::flow {

namespace {

constexpr int kMaxLinearIterations = 20000;

// Porosity is capped below one so the Kozeny-Carman denominator stays finite.
constexpr double kMaxPorosity = 1.0 - 1e-6;

}  // namespace

FlowSolution solve_darcy(const FlowProblem& problem, double tol) {
  if (!problem.mesh) throw InvalidArgument("solve_darcy: missing mesh");
  const Mesh& mesh = *problem.mesh;
  const Field& k = problem.conductivity;
  meshfield::check_field(k, mesh);
  if (k.support != meshfield::Support::Cells || k.n_components() != 1) {
    throw InvalidArgument("solve_darcy: conductivity must be a 1-component cell field");
  }
  if ((k.values.array() <= 0.0).any()) {
    throw InvalidArgument("solve_darcy: conductivity must be positive everywhere");
  }
  bool any_dirichlet = false;
  for (const auto& [tag, head] : problem.fixed_heads) {
    if (!mesh.has_tag(tag)) {
      throw InvalidArgument("solve_darcy: unknown boundary tag '" + tag + "'");
    }
    if (!std::isfinite(head)) throw InvalidArgument("solve_darcy: non-finite head on " + tag);
    any_dirichlet = any_dirichlet || !mesh.boundary_faces(tag).empty();
  }
  if (!any_dirichlet) {
    throw IllPosedProblem("solve_darcy: no fixed-head boundary, the head is undetermined");
  }

  const Index n = mesh.n_cells();
  const Index nf = mesh.n_faces();
  auto conductivity = [&](Index c) { return k.values(c, 0); };

  // Transmissibility per face and the Dirichlet head on boundary faces.
  std::vector<double> trans(static_cast<std::size_t>(nf), 0.0);
  std::vector<double> boundary_head(static_cast<std::size_t>(nf), 0.0);
  std::vector<bool> dirichlet(static_cast<std::size_t>(nf), false);
  for (Index f = 0; f < nf; ++f) {
    const auto& face = mesh.face(f);
    const double dl = (face.centroid - mesh.cell(face.left).centroid).norm();
    if (face.right) {
      const double dr = (face.centroid - mesh.cell(*face.right).centroid).norm();
      trans[f] = face.area / (dl / conductivity(face.left) + dr / conductivity(*face.right));
    } else {
      auto it = problem.fixed_heads.find(face.boundary_tag);
      if (it != problem.fixed_heads.end()) {
        trans[f] = face.area * conductivity(face.left) / dl;
        boundary_head[f] = it->second;
        dirichlet[f] = true;
      }
    }
  }

  std::vector<numerics::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(3 * nf));
  VectorXd rhs = VectorXd::Zero(n);
  for (Index f = 0; f < nf; ++f) {
    const auto& face = mesh.face(f);
    const double t = trans[f];
    const int l = static_cast<int>(face.left);
    if (face.right) {
      const int r = static_cast<int>(*face.right);
      triplets.emplace_back(l, l, t);
      triplets.emplace_back(l, r, -t);
      triplets.emplace_back(r, r, t);
      triplets.emplace_back(r, l, -t);
    } else if (dirichlet[f]) {
      triplets.emplace_back(l, l, t);
      rhs[l] += t * boundary_head[f];
    }
  }
  numerics::SparseMatrix<double> A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();

  VectorXd h;
  if (rhs.norm() == 0.0) {
    h = VectorXd::Zero(n);  // all imposed heads are zero
  } else {
    h = numerics::solve_sparse<double>(A, rhs, tol, kMaxLinearIterations);
  }

  FlowSolution sol;
  sol.head = meshfield::make_field("head", meshfield::Support::Cells, n, {"head"}, "m");
  sol.head.values.col(0) = h;
  sol.face_flux = meshfield::make_field("flux", meshfield::Support::Faces, nf, {"flux"}, "m3/s");
  for (Index f = 0; f < nf; ++f) {
    const auto& face = mesh.face(f);
    double q = 0.0;
    if (face.right) {
      q = trans[f] * (h[face.left] - h[*face.right]);
    } else if (dirichlet[f]) {
      q = trans[f] * (h[face.left] - boundary_head[f]);
    }
    sol.face_flux.values(f, 0) = q;
  }
  return sol;
}

double kozeny_carman(double k0, double phi, double phi0) {
  const double p = std::min(phi, kMaxPorosity);
  const double ratio = p / phi0;
  const double shape = (1.0 - phi0) / (1.0 - p);
  return k0 * ratio * ratio * ratio * shape * shape;
}

}  // namespace porecouple::flow
