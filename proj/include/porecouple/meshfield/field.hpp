#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "porecouple/core/error.hpp"
#include "porecouple/core/types.hpp"
#include "porecouple/meshfield/mesh.hpp"

namespace porecouple::meshfield {

enum class Support { Cells, Faces };

enum class NormKind { L2, LInf };

const char* to_string(Support support);
Support support_from_string(const std::string& text);

inline Index n_entities(const Mesh& mesh, Support support) {
  return support == Support::Cells ? mesh.n_cells() : mesh.n_faces();
}

/// Named multi-component values on mesh cells or faces.
/// `values` is n_entities x n_components, row-major.
template <typename Scalar>
struct BasicField {
  std::string name;
  Support support = Support::Cells;
  std::vector<std::string> component_names;
  RowMatrix<Scalar> values;
  double time = 0.0;
  std::string unit;

  Index n_entities() const { return values.rows(); }
  Index n_components() const { return values.cols(); }

  /// Component `c` of every entity.
  auto component(Index c) { return values.col(c); }
  auto component(Index c) const { return values.col(c); }
};

using Field = BasicField<double>;

/// Zero-initialised field with one column per component name.
template <typename Scalar = double>
BasicField<Scalar> make_field(std::string name, Support support, Index n_entities,
                              std::vector<std::string> component_names, std::string unit = {},
                              double time = 0.0) {
  BasicField<Scalar> f;
  f.name = std::move(name);
  f.support = support;
  f.values = RowMatrix<Scalar>::Zero(n_entities, static_cast<Index>(component_names.size()));
  f.component_names = std::move(component_names);
  f.unit = std::move(unit);
  f.time = time;
  return f;
}

/// Throws InvalidArgument when shape metadata or values are inconsistent.
template <typename Scalar>
void check_field(const BasicField<Scalar>& f) {
  if (static_cast<Index>(f.component_names.size()) != f.n_components()) {
    throw InvalidArgument("field '" + f.name + "': component_names length " +
                          std::to_string(f.component_names.size()) + " != n_components " +
                          std::to_string(f.n_components()));
  }
  if (!f.values.allFinite()) {
    throw InvalidArgument("field '" + f.name + "' holds non-finite values");
  }
}

/// As above, plus the entity count must match `mesh`.
template <typename Scalar>
void check_field(const BasicField<Scalar>& f, const Mesh& mesh) {
  check_field(f);
  if (f.n_entities() != n_entities(mesh, f.support)) {
    throw InvalidArgument("field '" + f.name + "' has " + std::to_string(f.n_entities()) +
                          " entities, mesh has " +
                          std::to_string(n_entities(mesh, f.support)) + " " +
                          to_string(f.support));
  }
}

/// alpha * x + y, with metadata taken from y.
template <typename Scalar>
BasicField<Scalar> field_axpy(Scalar alpha, const BasicField<Scalar>& x,
                              const BasicField<Scalar>& y) {
  if (x.support != y.support || x.n_entities() != y.n_entities() ||
      x.n_components() != y.n_components()) {
    throw IncompatibleFields("field_axpy: '" + x.name + "' and '" + y.name +
                             "' differ in support or shape");
  }
  BasicField<Scalar> out = y;
  out.values = alpha * x.values + y.values;
  return out;
}

template <typename Scalar>
Scalar field_norm(const BasicField<Scalar>& x, NormKind kind) {
  if (x.values.size() == 0) {
    throw InvalidArgument("field_norm of empty field '" + x.name + "'");
  }
  if (kind == NormKind::L2) {
    return x.values.norm();
  }
  return x.values.cwiseAbs().maxCoeff();
}

}  // namespace porecouple::meshfield
