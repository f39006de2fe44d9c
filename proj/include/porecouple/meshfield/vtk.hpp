#pragma once

#include <filesystem>
#include <ostream>

#include "porecouple/meshfield/mff.hpp"

namespace porecouple::meshfield {

/// Legacy-ASCII VTK of the document's cell fields, one scalar array per component.
/// Structured meshes are written as STRUCTURED_POINTS; others as a vertex cloud at
/// cell centroids.
void write_vtk(std::ostream& out, const MffDocument& doc);
void write_vtk(const std::filesystem::path& path, const MffDocument& doc);

}  // namespace porecouple::meshfield
