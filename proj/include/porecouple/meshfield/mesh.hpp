#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "porecouple/core/types.hpp"

namespace porecouple::meshfield {

struct Cell {
  Point2d centroid = Point2d::Zero();
  double volume = 0.0;
};

/// A face between `left` and `right`, or a boundary face of `left` when `right` is empty.
/// The unit normal points from `left` towards `right` (outward on the boundary).
struct Face {
  double area = 0.0;
  Point2d normal = Point2d::Zero();
  Point2d centroid = Point2d::Zero();
  Index left = 0;
  std::optional<Index> right;
  std::string boundary_tag;

  bool is_boundary() const { return !right.has_value(); }
};

/// Grid parameters kept when a mesh came from build_structured_mesh.
struct StructuredInfo {
  Index nx = 0;
  Index ny = 0;
  double dx = 0.0;
  double dy = 0.0;
};

/// Cell/face finite-volume mesh. Immutable after construction.
class Mesh {
 public:
  /// Validates the topology and geometry; throws InvalidArgument on violation.
  Mesh(int dim, std::vector<Cell> cells, std::vector<Face> faces,
       std::optional<StructuredInfo> structured = std::nullopt);

  int dim() const { return dim_; }
  Index n_cells() const { return static_cast<Index>(cells_.size()); }
  Index n_faces() const { return static_cast<Index>(faces_.size()); }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Cell& cell(Index i) const { return cells_[static_cast<std::size_t>(i)]; }
  const Face& face(Index i) const { return faces_[static_cast<std::size_t>(i)]; }

  /// Faces grouped by boundary tag, ascending face ids.
  const std::map<std::string, std::vector<Index>>& boundary_tags() const { return tags_; }
  const std::vector<Index>& boundary_faces(const std::string& tag) const;
  bool has_tag(const std::string& tag) const { return tags_.count(tag) != 0; }

  /// Face ids adjacent to each cell.
  const std::vector<Index>& cell_faces(Index cell) const {
    return cell_faces_[static_cast<std::size_t>(cell)];
  }

  double total_volume() const;
  const std::optional<StructuredInfo>& structured() const { return structured_; }

 private:
  int dim_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::optional<StructuredInfo> structured_;
  std::map<std::string, std::vector<Index>> tags_;
  std::vector<std::vector<Index>> cell_faces_;
};

/// Rectilinear nx-by-ny grid with unit depth, cells ordered x-fastest.
/// Faces: all x-normal faces first (row by row), then y-normal faces.
/// Boundary tags LEFT, RIGHT, BOTTOM, TOP. ny == 1 yields a 1D mesh.
Mesh build_structured_mesh(Index nx, Index ny, double dx, double dy);

/// Distance between the centroids of the two cells of an interior face, or from the
/// cell centroid to the face centroid for a boundary face.
double face_distance(const Mesh& mesh, const Face& face);

}  // namespace porecouple::meshfield
