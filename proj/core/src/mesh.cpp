#include "afmfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace afmfem {

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

std::array<std::int32_t, 3> sorted_face(std::int32_t a, std::int32_t b, std::int32_t c) {
  std::array<std::int32_t, 3> f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw ConfigError("mesh parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace

double Mesh::element_volume(int e) const {
  const auto& el = elements[static_cast<std::size_t>(e)];
  return signed_volume(vertices[el[0]], vertices[el[1]], vertices[el[2]], vertices[el[3]]);
}

double Mesh::total_volume() const {
  double vol = 0.0;
  for (int e = 0; e < n_elements(); ++e) vol += element_volume(e);
  return vol;
}

void Mesh::finalize() {
  const int nv = n_vertices();
  if (nv == 0 || elements.empty()) throw ConfigError("mesh is empty");

  double vol_scale = 0.0;
  for (auto& el : elements) {
    for (int i = 0; i < 4; ++i) {
      if (el[i] < 0 || el[i] >= nv)
        throw ConfigError("element references vertex " + std::to_string(el[i]) +
                          " outside [0," + std::to_string(nv) + ")");
    }
    double v = signed_volume(vertices[el[0]], vertices[el[1]], vertices[el[2]], vertices[el[3]]);
    if (v < 0.0) {
      std::swap(el[2], el[3]);
      v = -v;
    }
    vol_scale = std::max(vol_scale, v);
    if (!(v > 0.0)) throw ConfigError("degenerate element (zero volume)");
  }
  for (const auto& el : elements) {
    const double v = signed_volume(vertices[el[0]], vertices[el[1]], vertices[el[2]], vertices[el[3]]);
    if (v < 1e-14 * vol_scale) throw ConfigError("degenerate element (near-zero volume)");
  }

  // Faces incident to exactly one element form the boundary.
  std::map<std::array<std::int32_t, 3>, int> count;
  for (const auto& el : elements) {
    ++count[sorted_face(el[0], el[1], el[2])];
    ++count[sorted_face(el[0], el[1], el[3])];
    ++count[sorted_face(el[0], el[2], el[3])];
    ++count[sorted_face(el[1], el[2], el[3])];
  }
  boundary_faces.clear();
  for (const auto& [face, n] : count) {
    if (n == 1) boundary_faces.push_back(face);
    if (n > 2) throw ConfigError("non-conforming mesh: face shared by more than two elements");
  }
}

Mesh generate_box_mesh(int nx, int ny, int nz, const Vec3& lo, const Vec3& hi) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw ConfigError("generate_box_mesh: cell counts must be >= 1");
  for (int c = 0; c < 3; ++c)
    if (!(hi[c] > lo[c])) throw ConfigError("generate_box_mesh: requires hi > lo componentwise");

  Mesh mesh;
  const int mx = nx + 1, my = ny + 1, mz = nz + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(mx) * my * mz);
  for (int k = 0; k < mz; ++k)
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i)
        mesh.vertices.emplace_back(lo[0] + (hi[0] - lo[0]) * i / nx,
                                   lo[1] + (hi[1] - lo[1]) * j / ny,
                                   lo[2] + (hi[2] - lo[2]) * k / nz);

  const auto vid = [&](int i, int j, int k) -> std::int32_t {
    return static_cast<std::int32_t>(i + mx * (j + my * k));
  };

  // Kuhn subdivision: one tetrahedron per permutation of the axes, every
  // tetrahedron containing the main diagonal of the cell. Using the same
  // pattern in global axes for all cells makes the triangulation conforming.
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  mesh.elements.reserve(static_cast<std::size_t>(nx) * ny * nz * 6);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& p : perms) {
          int d[3] = {0, 0, 0};
          std::array<std::int32_t, 4> tet;
          tet[0] = vid(i, j, k);
          for (int s = 0; s < 3; ++s) {
            d[p[s]] = 1;
            tet[s + 1] = vid(i + d[0], j + d[1], k + d[2]);
          }
          mesh.elements.push_back(tet);
        }

  mesh.finalize();
  return mesh;
}

namespace {

// Splits the vertical prism over triangle (b0,b1,b2) with top copies
// (t0,t1,t2) into 3 tetrahedra. Quad-face diagonals start at the quad's
// smallest bottom vertex index, which makes the split match between prisms
// sharing a face. Requires b0 to be the smallest of the bottom indices
// (rotate before calling).
void split_prism(std::array<std::int32_t, 3> b, std::array<std::int32_t, 3> t,
                 std::vector<std::array<std::int32_t, 4>>& out) {
  int rot = 0;
  if (b[1] < b[0] && b[1] < b[2]) rot = 1;
  if (b[2] < b[0] && b[2] < b[1]) rot = 2;
  const std::array<std::int32_t, 3> bb{b[rot], b[(rot + 1) % 3], b[(rot + 2) % 3]};
  const std::array<std::int32_t, 3> tt{t[rot], t[(rot + 1) % 3], t[(rot + 2) % 3]};
  if (bb[1] < bb[2]) {
    out.push_back({bb[0], bb[1], bb[2], tt[2]});
    out.push_back({bb[0], bb[1], tt[2], tt[1]});
    out.push_back({bb[0], tt[1], tt[2], tt[0]});
  } else {
    out.push_back({bb[0], bb[1], bb[2], tt[1]});
    out.push_back({bb[0], bb[2], tt[2], tt[1]});
    out.push_back({bb[0], tt[2], tt[1], tt[0]});
  }
}

}  // namespace

Mesh generate_disk_mesh(double radius, double thickness, int n_radial, int n_layers) {
  if (!(radius > 0.0) || !(thickness > 0.0))
    throw ConfigError("generate_disk_mesh: radius and thickness must be positive");
  if (n_radial < 2) throw ConfigError("generate_disk_mesh: n_radial must be >= 2");
  if (n_layers < 1) throw ConfigError("generate_disk_mesh: n_layers must be >= 1");

  const int n_theta = 4 * n_radial;  // boundary segments of the polygonal cross-section
  const int per_layer = 1 + n_radial * n_theta;
  const int n_z = n_layers + 1;

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(per_layer) * n_z);
  for (int l = 0; l < n_z; ++l) {
    const double z = thickness * l / n_layers;
    mesh.vertices.emplace_back(0.0, 0.0, z);
    for (int r = 1; r <= n_radial; ++r) {
      const double rho = radius * r / n_radial;
      for (int j = 0; j < n_theta; ++j) {
        const double phi = 2.0 * M_PI * j / n_theta;
        mesh.vertices.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
      }
    }
  }

  const auto vid = [&](int layer, int ring, int j) -> std::int32_t {
    // ring 0 is the center vertex
    if (ring == 0) return static_cast<std::int32_t>(layer * per_layer);
    return static_cast<std::int32_t>(layer * per_layer + 1 + (ring - 1) * n_theta + (j % n_theta));
  };

  // 2D ring-pattern triangulation: a fan around the center, then two
  // triangles per annular quad.
  std::vector<std::array<std::int32_t, 3>> tris;
  for (int j = 0; j < n_theta; ++j)
    tris.push_back({vid(0, 0, 0), vid(0, 1, j), vid(0, 1, j + 1)});
  for (int r = 1; r < n_radial; ++r)
    for (int j = 0; j < n_theta; ++j) {
      const auto a = vid(0, r, j), b = vid(0, r, j + 1);
      const auto c = vid(0, r + 1, j + 1), d = vid(0, r + 1, j);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }

  mesh.elements.reserve(tris.size() * 3 * static_cast<std::size_t>(n_layers));
  const auto offset = static_cast<std::int32_t>(per_layer);
  for (int l = 0; l < n_layers; ++l) {
    const std::int32_t base = l * offset;
    for (const auto& tri : tris) {
      const std::array<std::int32_t, 3> b{tri[0] + base, tri[1] + base, tri[2] + base};
      const std::array<std::int32_t, 3> t{b[0] + offset, b[1] + offset, b[2] + offset};
      split_prism(b, t, mesh.elements);
    }
  }

  mesh.finalize();
  return mesh;
}

MeshStats mesh_stats(const Mesh& mesh) {
  MeshStats stats;
  stats.n_vertices = mesh.n_vertices();
  stats.n_elements = mesh.n_elements();
  stats.h_min = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    const Vec3 x[4] = {mesh.vertices[el[0]], mesh.vertices[el[1]], mesh.vertices[el[2]],
                       mesh.vertices[el[3]]};
    double diam = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) diam = std::max(diam, (x[i] - x[j]).norm());
    const double vol = signed_volume(x[0], x[1], x[2], x[3]);
    double area = 0.0;
    area += 0.5 * (x[1] - x[0]).cross(x[2] - x[0]).norm();
    area += 0.5 * (x[1] - x[0]).cross(x[3] - x[0]).norm();
    area += 0.5 * (x[2] - x[0]).cross(x[3] - x[0]).norm();
    area += 0.5 * (x[2] - x[1]).cross(x[3] - x[1]).norm();
    const double inradius = 3.0 * vol / area;
    stats.h_max = std::max(stats.h_max, diam);
    stats.h_min = std::min(stats.h_min, diam);
    stats.shape_regularity = std::max(stats.shape_regularity, diam / inradius);
    stats.total_volume += vol;
  }
  return stats;
}

namespace {

MeshImportResult read_gmsh_msh2(std::istream& in) {
  MeshImportResult result;
  std::string line;
  int lineno = 0;
  const auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  std::map<long, std::int32_t> node_id_map;
  bool saw_nodes = false, saw_elements = false;

  while (next_line()) {
    if (line == "$MeshFormat") {
      if (!next_line()) parse_fail(lineno, "unexpected end of file in $MeshFormat");
      std::istringstream fs(line);
      std::string version;
      fs >> version;
      if (version.rfind("2.", 0) != 0)
        parse_fail(lineno, "unsupported MSH version '" + version + "' (need 2.x ASCII)");
      if (!next_line() || line != "$EndMeshFormat") parse_fail(lineno, "missing $EndMeshFormat");
    } else if (line == "$Nodes") {
      if (!next_line()) parse_fail(lineno, "unexpected end of file in $Nodes");
      long n_nodes = -1;
      {
        std::istringstream ns(line);
        if (!(ns >> n_nodes) || n_nodes < 0) parse_fail(lineno, "invalid node count");
      }
      result.mesh.vertices.reserve(static_cast<std::size_t>(n_nodes));
      for (long i = 0; i < n_nodes; ++i) {
        if (!next_line()) parse_fail(lineno, "unexpected end of file in $Nodes");
        std::istringstream ns(line);
        long id;
        double x, y, z;
        if (!(ns >> id >> x >> y >> z)) parse_fail(lineno, "invalid node line");
        node_id_map[id] = static_cast<std::int32_t>(result.mesh.vertices.size());
        result.mesh.vertices.emplace_back(x, y, z);
      }
      if (!next_line() || line != "$EndNodes") parse_fail(lineno, "missing $EndNodes");
      saw_nodes = true;
    } else if (line == "$Elements") {
      if (!saw_nodes) parse_fail(lineno, "$Elements section before $Nodes");
      if (!next_line()) parse_fail(lineno, "unexpected end of file in $Elements");
      long n_el = -1;
      {
        std::istringstream es(line);
        if (!(es >> n_el) || n_el < 0) parse_fail(lineno, "invalid element count");
      }
      for (long i = 0; i < n_el; ++i) {
        if (!next_line()) parse_fail(lineno, "unexpected end of file in $Elements");
        std::istringstream es(line);
        long id;
        int type, n_tags;
        if (!(es >> id >> type >> n_tags)) parse_fail(lineno, "invalid element line");
        long tag;
        for (int t = 0; t < n_tags; ++t)
          if (!(es >> tag)) parse_fail(lineno, "invalid element tags");
        if (type != 4) {  // 4 = 4-node tetrahedron; everything else is skipped
          ++result.skipped_elements;
          continue;
        }
        std::array<std::int32_t, 4> tet;
        for (int v = 0; v < 4; ++v) {
          long nid;
          if (!(es >> nid)) parse_fail(lineno, "tetrahedron with fewer than 4 nodes");
          const auto it = node_id_map.find(nid);
          if (it == node_id_map.end())
            parse_fail(lineno, "element references unknown node " + std::to_string(nid));
          tet[v] = it->second;
        }
        result.mesh.elements.push_back(tet);
      }
      if (!next_line() || line != "$EndElements") parse_fail(lineno, "missing $EndElements");
      saw_elements = true;
    }
    // unknown sections are skipped line by line
  }

  if (!saw_nodes || !saw_elements) throw ConfigError("MSH file has no $Nodes/$Elements sections");
  if (result.mesh.elements.empty()) throw ConfigError("MSH file contains no tetrahedra");
  result.mesh.finalize();
  return result;
}

MeshImportResult read_tetmesh(std::istream& in) {
  MeshImportResult result;
  std::string header;
  int lineno = 1;
  if (!std::getline(in, header) || header != "TETMESH v1")
    parse_fail(lineno, "expected header 'TETMESH v1'");
  long nv = 0;
  ++lineno;
  if (!(in >> nv) || nv <= 0) parse_fail(lineno, "invalid vertex count");
  result.mesh.vertices.resize(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    ++lineno;
    if (!(in >> result.mesh.vertices[i][0] >> result.mesh.vertices[i][1] >>
          result.mesh.vertices[i][2]))
      parse_fail(lineno, "invalid vertex line");
  }
  long ne = 0;
  ++lineno;
  if (!(in >> ne) || ne <= 0) parse_fail(lineno, "invalid element count");
  result.mesh.elements.resize(static_cast<std::size_t>(ne));
  for (long e = 0; e < ne; ++e) {
    ++lineno;
    auto& el = result.mesh.elements[static_cast<std::size_t>(e)];
    if (!(in >> el[0] >> el[1] >> el[2] >> el[3])) parse_fail(lineno, "invalid element line");
  }
  result.mesh.finalize();
  return result;
}

void write_gmsh_msh2(const Mesh& mesh, std::ostream& out) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.n_vertices() << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const auto& v = mesh.vertices[static_cast<std::size_t>(i)];
    out << (i + 1) << ' ' << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
  out << "$EndNodes\n$Elements\n" << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    out << (e + 1) << " 4 2 0 1 " << (el[0] + 1) << ' ' << (el[1] + 1) << ' ' << (el[2] + 1)
        << ' ' << (el[3] + 1) << '\n';
  }
  out << "$EndElements\n";
}

void write_tetmesh(const Mesh& mesh, std::ostream& out) {
  out << "TETMESH v1\n" << mesh.n_vertices() << "\n";
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << mesh.n_elements() << "\n";
  for (const auto& el : mesh.elements)
    out << el[0] << ' ' << el[1] << ' ' << el[2] << ' ' << el[3] << '\n';
}

}  // namespace

MeshImportResult read_mesh(std::istream& in, MeshFormat format) {
  switch (format) {
    case MeshFormat::GmshMsh2Ascii: return read_gmsh_msh2(in);
    case MeshFormat::TetMesh: return read_tetmesh(in);
  }
  throw ConfigError("unknown mesh format");
}

MeshImportResult import_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
  return read_mesh(in, format);
}

void write_mesh(const Mesh& mesh, std::ostream& out, MeshFormat format) {
  switch (format) {
    case MeshFormat::GmshMsh2Ascii: write_gmsh_msh2(mesh, out); return;
    case MeshFormat::TetMesh: write_tetmesh(mesh, out); return;
  }
  throw ConfigError("unknown mesh format");
}

void export_mesh(const Mesh& mesh, const std::string& path, MeshFormat format) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_mesh(mesh, out, format);
  if (!out) throw ConfigError("I/O failure while writing '" + path + "'");
}

}  // namespace afmfem
