#include "porecouple/meshfield/vtk.hpp"

#include <fstream>
#include <iomanip>

#include "porecouple/core/error.hpp"

namespace porecouple::meshfield {

namespace {

std::string sanitize(std::string name) {
  for (auto& ch : name) {
    if (ch == ' ' || ch == '\t' || ch == '\n') ch = '_';
  }
  return name;
}

}  // namespace

void write_vtk(std::ostream& out, const MffDocument& doc) {
  const Mesh& mesh = doc.mesh;
  out << "# vtk DataFile Version 3.0\n";
  out << "porecouple cell fields\n";
  out << "ASCII\n";
  out << std::setprecision(17);
  if (const auto& s = mesh.structured()) {
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << s->nx + 1 << ' ' << s->ny + 1 << " 1\n";
    out << "ORIGIN 0 0 0\n";
    out << "SPACING " << s->dx << ' ' << s->dy << " 1\n";
  } else {
    const auto n = mesh.n_cells();
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << n << " double\n";
    for (const auto& c : mesh.cells()) {
      out << c.centroid.x() << ' ' << c.centroid.y() << " 0\n";
    }
    out << "CELLS " << n << ' ' << 2 * n << '\n';
    for (Index i = 0; i < n; ++i) out << "1 " << i << '\n';
    out << "CELL_TYPES " << n << '\n';
    for (Index i = 0; i < n; ++i) out << "1\n";
  }
  out << "CELL_DATA " << mesh.n_cells() << '\n';
  for (const auto& f : doc.fields) {
    if (f.support != Support::Cells) continue;
    for (Index c = 0; c < f.n_components(); ++c) {
      out << "SCALARS " << sanitize(f.name + "." + f.component_names[static_cast<std::size_t>(c)])
          << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (Index e = 0; e < f.n_entities(); ++e) out << f.values(e, c) << '\n';
    }
  }
}

void write_vtk(const std::filesystem::path& path, const MffDocument& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_vtk(out, doc);
}

}  // namespace porecouple::meshfield
