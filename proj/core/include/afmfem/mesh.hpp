#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "afmfem/error.hpp"

namespace afmfem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Conforming tetrahedral mesh of a polyhedral domain.
///
/// Vertices are 3D points, elements are 4-tuples of 0-based vertex indices
/// with positive signed volume (repaired at construction), and boundary
/// faces are derived as the faces incident to exactly one element.
/// Instances are immutable after construction and safe to share between
/// threads.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int32_t, 4>> elements;
  std::vector<std::array<std::int32_t, 3>> boundary_faces;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }

  /// Signed volume of element e (positive after finalize()).
  double element_volume(int e) const;
  double total_volume() const;

  /// Validates indices, repairs orientations (swaps two vertices of any
  /// element with negative signed volume), and derives boundary faces.
  /// Throws ConfigError on degenerate elements or out-of-range indices.
  void finalize();
};

struct MeshStats {
  double h_max = 0.0;          // max element diameter
  double h_min = 0.0;
  double shape_regularity = 0.0;  // max over elements of diameter / inradius
  int n_vertices = 0;
  int n_elements = 0;
  double total_volume = 0.0;
};

/// Structured box mesh: nx*ny*nz cells, each split into 6 tetrahedra by the
/// Kuhn (Freudenthal) subdivision. Deterministic; vertex index runs x fastest.
Mesh generate_box_mesh(int nx, int ny, int nz, const Vec3& lo, const Vec3& hi);

/// Extruded disk mesh: a ring-pattern triangulated polygon (4*n_radial
/// boundary segments, n_radial concentric rings) extruded through n_layers
/// prism layers, each prism split into 3 tetrahedra. The polygonal
/// cross-section is inscribed in the circle, so total volume is slightly
/// below pi*radius^2*thickness.
Mesh generate_disk_mesh(double radius, double thickness, int n_radial, int n_layers);

enum class MeshFormat {
  GmshMsh2Ascii,  // Gmsh MSH 2.2 ASCII ($MeshFormat "2.2 0 8")
  TetMesh,        // internal canonical dump, header "TETMESH v1", 0-based indices
};

struct MeshImportResult {
  Mesh mesh;
  int skipped_elements = 0;  // non-tetrahedral elements dropped with a warning count
};

/// Parses a mesh file. Parse errors carry the 1-based line number.
MeshImportResult import_mesh(const std::string& path, MeshFormat format);
MeshImportResult read_mesh(std::istream& in, MeshFormat format);

void export_mesh(const Mesh& mesh, const std::string& path, MeshFormat format);
void write_mesh(const Mesh& mesh, std::ostream& out, MeshFormat format);

MeshStats mesh_stats(const Mesh& mesh);

}  // namespace afmfem
