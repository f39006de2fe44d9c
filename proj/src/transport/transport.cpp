#include "porecouple/transport/transport.hpp"

#include <cmath>
#include <limits>

#include "porecouple/core/error.hpp"
#include "porecouple/numerics/sparse.hpp"

namespace porecouple::transport {

namespace {

using meshfield::Support;

// Slack on the CFL comparison so that an exact Courant-one step passes.
constexpr double kCflSlack = 1e-12;

struct FaceCoefficients {
  double flux = 0.0;  // signed along the normal
  double diffusive = 0.0;
  bool dirichlet = false;
  const VectorXd* boundary_conc = nullptr;
};

/// Per-face diffusive transmissibility for one species.
double face_transmissibility(const Mesh& mesh, const meshfield::Face& face, double q,
                             const TransportParams& p, double d_e) {
  auto side = [&](Index cell) {
    const double phi = p.porosity.values(cell, 0);
    const double v = q / (phi * face.area);
    return phi * dispersion_coefficient(v, d_e, p.dispersivity);
  };
  const double dl = (face.centroid - mesh.cell(face.left).centroid).norm();
  const double kl = side(face.left);
  if (face.right) {
    const double dr = (face.centroid - mesh.cell(*face.right).centroid).norm();
    const double kr = side(*face.right);
    if (kl == 0.0 || kr == 0.0) return 0.0;
    return face.area / (dl / kl + dr / kr);
  }
  return face.area * kl / dl;
}

}  // namespace

double dispersion_coefficient(double v, double d_e, double alpha_L) {
  return d_e + alpha_L * std::abs(v);
}

std::vector<Index> decay_order(const std::vector<SpeciesParams>& species) {
  const auto n = static_cast<Index>(species.size());
  std::vector<int> daughters(species.size(), 0);
  for (Index s = 0; s < n; ++s) {
    const auto& parent = species[static_cast<std::size_t>(s)].parent;
    if (!parent) continue;
    if (*parent < 0 || *parent >= n || *parent == s) {
      throw InvalidArgument("species '" + species[static_cast<std::size_t>(s)].name +
                            "' has an invalid decay parent");
    }
    if (++daughters[static_cast<std::size_t>(*parent)] > 1) {
      throw InvalidArgument("species '" + species[static_cast<std::size_t>(*parent)].name +
                            "' is the decay parent of more than one species");
    }
  }
  std::vector<Index> order;
  std::vector<int> mark(species.size(), 0);  // 0 new, 1 visiting, 2 done
  auto visit = [&](auto&& self, Index s) -> void {
    auto& m = mark[static_cast<std::size_t>(s)];
    if (m == 2) return;
    if (m == 1) throw InvalidArgument("decay chain contains a cycle");
    m = 1;
    if (const auto& parent = species[static_cast<std::size_t>(s)].parent) self(self, *parent);
    m = 2;
    order.push_back(s);
  };
  for (Index s = 0; s < n; ++s) visit(visit, s);
  return order;
}

void validate(const TransportParams& p) {
  if (!p.mesh) throw InvalidArgument("transport: missing mesh");
  const Mesh& mesh = *p.mesh;
  meshfield::check_field(p.face_flux, mesh);
  meshfield::check_field(p.porosity, mesh);
  if (p.face_flux.support != Support::Faces || p.face_flux.n_components() != 1) {
    throw InvalidArgument("transport: face_flux must be a 1-component face field");
  }
  if (p.porosity.support != Support::Cells || p.porosity.n_components() != 1) {
    throw InvalidArgument("transport: porosity must be a 1-component cell field");
  }
  if ((p.porosity.values.array() <= 0.0).any() || (p.porosity.values.array() > 1.0).any()) {
    throw InvalidArgument("transport: porosity must lie in (0, 1]");
  }
  if (p.species.empty()) throw InvalidArgument("transport: no species");
  for (const auto& s : p.species) {
    if (!(s.retardation >= 1.0)) throw InvalidArgument("transport: retardation of '" + s.name + "' below 1");
    if (!(s.decay_rate >= 0.0)) throw InvalidArgument("transport: negative decay rate for '" + s.name + "'");
    if (!(s.diffusion >= 0.0)) throw InvalidArgument("transport: negative diffusion for '" + s.name + "'");
  }
  decay_order(p.species);
  if (!(p.theta >= 0.0 && p.theta <= 1.0)) throw InvalidArgument("transport: theta outside [0, 1]");
  if (!(p.dispersivity >= 0.0)) throw InvalidArgument("transport: negative dispersivity");
  for (const auto& [tag, values] : p.boundary_concentrations) {
    if (!mesh.has_tag(tag)) throw InvalidArgument("transport: unknown boundary tag '" + tag + "'");
    if (values.size() != static_cast<Index>(p.species.size())) {
      throw InvalidArgument("transport: boundary concentration on " + tag + " has wrong length");
    }
  }
}

double cfl_limit(const TransportParams& p) {
  const Mesh& mesh = *p.mesh;
  double r_min = std::numeric_limits<double>::infinity();
  for (const auto& s : p.species) r_min = std::min(r_min, s.retardation);
  VectorXd outflow = VectorXd::Zero(mesh.n_cells());
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const auto& face = mesh.face(f);
    const double q = p.face_flux.values(f, 0);
    if (q > 0.0) {
      outflow[face.left] += q;
    } else if (q < 0.0 && face.right) {
      outflow[*face.right] -= q;
    }
  }
  double limit = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    if (outflow[c] > 0.0) {
      limit = std::min(limit, p.porosity.values(c, 0) * r_min * mesh.cell(c).volume / outflow[c]);
    }
  }
  return limit;
}

TransportStep transport_step(const TransportState& state, double dt, const TransportParams& p,
                             const Field& source) {
  validate(p);
  const Mesh& mesh = *p.mesh;
  const Index n = mesh.n_cells();
  const auto ns = static_cast<Index>(p.species.size());
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("transport_step: dt must be positive");
  meshfield::check_field(state.conc, mesh);
  meshfield::check_field(source, mesh);
  if (state.conc.support != Support::Cells || state.conc.n_components() != ns) {
    throw InvalidArgument("transport_step: concentration field must be CELLS x n_species");
  }
  if (source.support != Support::Cells || source.n_components() != ns) {
    throw InvalidArgument("transport_step: source field must be CELLS x n_species");
  }
  if (p.theta < 1.0) {
    const double limit = cfl_limit(p);
    if (dt > limit * (1.0 + kCflSlack)) {
      throw StepRejected("transport_step: dt " + std::to_string(dt) + " exceeds the CFL limit " +
                             std::to_string(limit) + " for theta < 1",
                         limit);
    }
  }

  // Species-independent face data.
  std::vector<FaceCoefficients> faces(static_cast<std::size_t>(mesh.n_faces()));
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const auto& face = mesh.face(f);
    auto& fc = faces[static_cast<std::size_t>(f)];
    fc.flux = p.face_flux.values(f, 0);
    if (!face.right) {
      auto it = p.boundary_concentrations.find(face.boundary_tag);
      if (it != p.boundary_concentrations.end()) {
        fc.dirichlet = true;
        fc.boundary_conc = &it->second;
      }
    }
  }

  const double theta = p.theta;
  const double explicit_weight = 1.0 - theta;

  TransportStep out;
  out.state.conc = state.conc;
  out.state.conc.time = state.conc.time + dt;
  out.decayed = MatrixXd::Zero(n, ns);
  out.boundary_inflow = MatrixXd::Zero(n, ns);

  for (const Index s : decay_order(p.species)) {
    const auto& sp = p.species[static_cast<std::size_t>(s)];
    const VectorXd c_old = state.conc.values.col(s);

    // Spatial operator L (net outflow per cell, mol/s) and its boundary forcing.
    std::vector<numerics::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(4 * mesh.n_faces() + n));
    VectorXd boundary = VectorXd::Zero(n);
    VectorXd boundary_loss = VectorXd::Zero(n);  // coefficient on the cell value, per second
    for (Index f = 0; f < mesh.n_faces(); ++f) {
      const auto& face = mesh.face(f);
      const auto& fc = faces[static_cast<std::size_t>(f)];
      const int l = static_cast<int>(face.left);
      const double q = fc.flux;
      if (face.right) {
        const int r = static_cast<int>(*face.right);
        if (q > 0.0) {
          triplets.emplace_back(l, l, q);
          triplets.emplace_back(r, l, -q);
        } else if (q < 0.0) {
          triplets.emplace_back(r, r, -q);
          triplets.emplace_back(l, r, q);
        }
        const double t = face_transmissibility(mesh, face, q, p, sp.diffusion);
        if (t > 0.0) {
          triplets.emplace_back(l, l, t);
          triplets.emplace_back(l, r, -t);
          triplets.emplace_back(r, r, t);
          triplets.emplace_back(r, l, -t);
        }
      } else {
        if (q > 0.0) {
          triplets.emplace_back(l, l, q);
          boundary_loss[l] += q;
        } else if (q < 0.0 && fc.dirichlet) {
          boundary[l] += -q * (*fc.boundary_conc)[s];
        }
        if (fc.dirichlet) {
          const double t = face_transmissibility(mesh, face, q, p, sp.diffusion);
          if (t > 0.0) {
            triplets.emplace_back(l, l, t);
            boundary_loss[l] += t;
            boundary[l] += t * (*fc.boundary_conc)[s];
          }
        }
      }
    }
    VectorXd storage(n);  // phi R V / dt
    VectorXd decay_weight(n);  // lambda phi R V
    for (Index c = 0; c < n; ++c) {
      const double pool = p.porosity.values(c, 0) * sp.retardation * mesh.cell(c).volume;
      storage[c] = pool / dt;
      decay_weight[c] = sp.decay_rate * pool;
      if (decay_weight[c] > 0.0) triplets.emplace_back(static_cast<int>(c), static_cast<int>(c), decay_weight[c]);
    }
    VectorXd rhs = storage.cwiseProduct(c_old) + boundary;
    if (explicit_weight > 0.0) {
      numerics::SparseMatrix<double> L(n, n);
      L.setFromTriplets(triplets.begin(), triplets.end());
      rhs -= explicit_weight * (L * c_old);
    }
    for (Index c = 0; c < n; ++c) rhs[c] += mesh.cell(c).volume * source.values(c, s);
    if (sp.parent) {
      // The parent has already been advanced; what it lost to decay feeds this species.
      rhs += out.decayed.col(*sp.parent) / dt;
    }

    for (auto& t : triplets) t = numerics::Triplet<double>(t.row(), t.col(), theta * t.value());
    for (Index c = 0; c < n; ++c) {
      triplets.emplace_back(static_cast<int>(c), static_cast<int>(c), storage[c]);
    }
    numerics::SparseMatrix<double> A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();

    const VectorXd c_new =
        numerics::solve_sparse<double>(A, rhs, p.linear_tolerance, p.max_linear_iterations);
    out.state.conc.values.col(s) = c_new;
    const VectorXd c_mid = theta * c_new + explicit_weight * c_old;
    out.decayed.col(s) = dt * decay_weight.cwiseProduct(c_mid);
    out.boundary_inflow.col(s) = dt * (boundary - boundary_loss.cwiseProduct(c_mid));
  }
  return out;
}

double species_inventory(const TransportParams& p, const Field& conc, Index s) {
  const Mesh& mesh = *p.mesh;
  const double r = p.species[static_cast<std::size_t>(s)].retardation;
  double total = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    total += p.porosity.values(c, 0) * r * mesh.cell(c).volume * conc.values(c, s);
  }
  return total;
}

}  // namespace porecouple::transport
