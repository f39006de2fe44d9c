#include "porecouple/meshfield/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "porecouple/core/error.hpp"

namespace porecouple::meshfield {

namespace {

constexpr double kNormalTolerance = 1e-12;

}  // namespace

Mesh::Mesh(int dim, std::vector<Cell> cells, std::vector<Face> faces,
           std::optional<StructuredInfo> structured)
    : dim_(dim), cells_(std::move(cells)), faces_(std::move(faces)), structured_(structured) {
  if (dim_ != 1 && dim_ != 2) {
    throw InvalidArgument("mesh dimension must be 1 or 2, got " + std::to_string(dim_));
  }
  if (cells_.empty()) {
    throw InvalidArgument("mesh has no cells");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& c = cells_[i];
    if (!(c.volume > 0.0) || !std::isfinite(c.volume)) {
      throw InvalidArgument("cell " + std::to_string(i) + " has non-positive volume");
    }
    if (!c.centroid.allFinite()) {
      throw InvalidArgument("cell " + std::to_string(i) + " has a non-finite centroid");
    }
  }
  cell_faces_.assign(cells_.size(), {});
  const auto n_cells = static_cast<Index>(cells_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    const std::string where = "face " + std::to_string(f);
    if (!(face.area > 0.0) || !std::isfinite(face.area)) {
      throw InvalidArgument(where + " has non-positive area");
    }
    if (std::abs(face.normal.norm() - 1.0) > kNormalTolerance) {
      throw InvalidArgument(where + " normal is not unit length");
    }
    if (face.left < 0 || face.left >= n_cells) {
      throw InvalidArgument(where + " references a missing cell");
    }
    if (face.right) {
      if (*face.right < 0 || *face.right >= n_cells || *face.right == face.left) {
        throw InvalidArgument(where + " must join two distinct existing cells");
      }
      if (!face.boundary_tag.empty()) {
        throw InvalidArgument(where + " is interior but carries a boundary tag");
      }
      cell_faces_[static_cast<std::size_t>(*face.right)].push_back(static_cast<Index>(f));
    } else {
      if (face.boundary_tag.empty()) {
        throw InvalidArgument(where + " is a boundary face without a tag");
      }
      tags_[face.boundary_tag].push_back(static_cast<Index>(f));
    }
    cell_faces_[static_cast<std::size_t>(face.left)].push_back(static_cast<Index>(f));
  }
  for (auto& list : cell_faces_) {
    std::sort(list.begin(), list.end());
  }
}

const std::vector<Index>& Mesh::boundary_faces(const std::string& tag) const {
  static const std::vector<Index> empty;
  auto it = tags_.find(tag);
  return it == tags_.end() ? empty : it->second;
}

double Mesh::total_volume() const {
  double total = 0.0;
  for (const auto& c : cells_) total += c.volume;
  return total;
}

Mesh build_structured_mesh(Index nx, Index ny, double dx, double dy) {
  if (nx < 1 || ny < 1) {
    throw InvalidArgument("structured mesh needs nx >= 1 and ny >= 1");
  }
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw InvalidArgument("structured mesh needs dx > 0 and dy > 0");
  }
  auto id = [nx](Index i, Index j) { return j * nx + i; };

  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(nx * ny));
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      cells.push_back({Point2d((i + 0.5) * dx, (j + 0.5) * dy), dx * dy});
    }
  }

  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>((nx + 1) * ny + nx * (ny + 1)));
  // x-normal faces
  for (Index j = 0; j < ny; ++j) {
    const double yc = (j + 0.5) * dy;
    for (Index i = 0; i <= nx; ++i) {
      Face f;
      f.area = dy;
      f.centroid = Point2d(i * dx, yc);
      if (i == 0) {
        f.left = id(0, j);
        f.normal = Point2d(-1.0, 0.0);
        f.boundary_tag = "LEFT";
      } else if (i == nx) {
        f.left = id(nx - 1, j);
        f.normal = Point2d(1.0, 0.0);
        f.boundary_tag = "RIGHT";
      } else {
        f.left = id(i - 1, j);
        f.right = id(i, j);
        f.normal = Point2d(1.0, 0.0);
      }
      faces.push_back(std::move(f));
    }
  }
  // y-normal faces
  for (Index j = 0; j <= ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      Face f;
      f.area = dx;
      f.centroid = Point2d((i + 0.5) * dx, j * dy);
      if (j == 0) {
        f.left = id(i, 0);
        f.normal = Point2d(0.0, -1.0);
        f.boundary_tag = "BOTTOM";
      } else if (j == ny) {
        f.left = id(i, ny - 1);
        f.normal = Point2d(0.0, 1.0);
        f.boundary_tag = "TOP";
      } else {
        f.left = id(i, j - 1);
        f.right = id(i, j);
        f.normal = Point2d(0.0, 1.0);
      }
      faces.push_back(std::move(f));
    }
  }
  return Mesh(ny == 1 ? 1 : 2, std::move(cells), std::move(faces), StructuredInfo{nx, ny, dx, dy});
}

double face_distance(const Mesh& mesh, const Face& face) {
  const Point2d& xl = mesh.cell(face.left).centroid;
  if (face.right) {
    return (mesh.cell(*face.right).centroid - xl).norm();
  }
  return (face.centroid - xl).norm();
}

}  // namespace porecouple::meshfield
