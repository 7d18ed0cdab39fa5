#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "afmfem/mesh.hpp"

using namespace afmfem;

namespace {

std::array<std::int32_t, 3> sorted3(std::int32_t a, std::int32_t b, std::int32_t c) {
  std::array<std::int32_t, 3> f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

TEST_CASE("single Kuhn cube") {
  const Mesh mesh = generate_box_mesh(1, 1, 1, Vec3(0, 0, 0), Vec3(1, 1, 1));
  CHECK(mesh.n_vertices() == 8);
  CHECK(mesh.n_elements() == 6);
  CHECK(mesh.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
  // the Kuhn split produces six tetrahedra of equal volume
  for (int e = 0; e < 6; ++e)
    CHECK(mesh.element_volume(e) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  // each face of the cube is covered by two boundary triangles
  CHECK(mesh.boundary_faces.size() == 12);
}

TEST_CASE("structured box counts") {
  const Mesh mesh = generate_box_mesh(8, 8, 8, Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));
  CHECK(mesh.n_vertices() == 729);
  CHECK(mesh.n_elements() == 3072);
  CHECK(mesh.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("anisotropic box: every element has volume cell/6") {
  // brute-force enumeration of the Kuhn split volumes
  const Mesh mesh = generate_box_mesh(2, 1, 1, Vec3(0, 0, 0), Vec3(2, 1, 1));
  CHECK(mesh.n_vertices() == 12);
  CHECK(mesh.n_elements() == 12);
  for (int e = 0; e < mesh.n_elements(); ++e)
    CHECK(mesh.element_volume(e) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("box mesh is conforming and deterministic") {
  const Mesh mesh = generate_box_mesh(3, 2, 2, Vec3(0, 0, 0), Vec3(1.5, 1, 0.8));
  std::map<std::array<std::int32_t, 3>, int> faces;
  for (const auto& el : mesh.elements) {
    ++faces[sorted3(el[0], el[1], el[2])];
    ++faces[sorted3(el[0], el[1], el[3])];
    ++faces[sorted3(el[0], el[2], el[3])];
    ++faces[sorted3(el[1], el[2], el[3])];
  }
  for (const auto& [face, count] : faces) CHECK((count == 1 || count == 2));

  const Mesh again = generate_box_mesh(3, 2, 2, Vec3(0, 0, 0), Vec3(1.5, 1, 0.8));
  CHECK(mesh.vertices == again.vertices);
  CHECK(mesh.elements == again.elements);
}

TEST_CASE("mesh stats on Kuhn meshes") {
  SUBCASE("unit cube: diameter is the main diagonal") {
    const MeshStats stats = mesh_stats(generate_box_mesh(1, 1, 1, Vec3(0, 0, 0), Vec3(1, 1, 1)));
    CHECK(stats.h_max == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(stats.h_min == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(stats.total_volume == doctest::Approx(1.0));
  }
  SUBCASE("8x8x8 unit cube") {
    const MeshStats stats =
        mesh_stats(generate_box_mesh(8, 8, 8, Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)));
    CHECK(stats.h_max == doctest::Approx(std::sqrt(3.0) / 8.0).epsilon(1e-13));
    CHECK(stats.n_vertices == 729);
    CHECK(stats.n_elements == 3072);
    // the regular tetrahedron minimizes diameter/inradius at 2*sqrt(6)
    CHECK(stats.shape_regularity >= 2.0 * std::sqrt(6.0) - 1e-12);
    CHECK(stats.h_min <= stats.h_max);
  }
}

TEST_CASE("disk mesh volume against the polygon formula") {
  const Mesh mesh = generate_disk_mesh(30.0, 1.0, 8, 1);
  const int n_theta = 32;
  const double polygon_area = 0.5 * n_theta * 30.0 * 30.0 * std::sin(2.0 * M_PI / n_theta);
  CHECK(mesh.total_volume() == doctest::Approx(polygon_area).epsilon(1e-10));
  CHECK(std::abs(mesh.total_volume() - M_PI * 900.0) / (M_PI * 900.0) < 0.10);
}

TEST_CASE("smallest admissible disk is valid") {
  const Mesh mesh = generate_disk_mesh(1.0, 1.0, 2, 1);
  for (int e = 0; e < mesh.n_elements(); ++e) CHECK(mesh.element_volume(e) > 0.0);
  CHECK_THROWS_AS(generate_disk_mesh(1.0, 1.0, 1, 1), ConfigError);
}

TEST_CASE("disk volume approaches pi r^2 t monotonically under refinement") {
  double previous = 0.0;
  for (int n_radial : {4, 8, 16, 32}) {
    const double vol = generate_disk_mesh(30.0, 1.0, n_radial, 1).total_volume();
    CHECK(vol > previous);
    CHECK(vol < M_PI * 900.0);
    previous = vol;
  }
  CHECK(previous > 0.995 * M_PI * 900.0);
}

TEST_CASE("disk mesh is conforming across prisms and layers") {
  const Mesh mesh = generate_disk_mesh(5.0, 2.0, 3, 2);
  std::map<std::array<std::int32_t, 3>, int> faces;
  for (const auto& el : mesh.elements) {
    ++faces[sorted3(el[0], el[1], el[2])];
    ++faces[sorted3(el[0], el[1], el[3])];
    ++faces[sorted3(el[0], el[2], el[3])];
    ++faces[sorted3(el[1], el[2], el[3])];
  }
  for (const auto& [face, count] : faces) CHECK((count == 1 || count == 2));
  CHECK(mesh.total_volume() == doctest::Approx(generate_disk_mesh(5.0, 1.0, 3, 1).total_volume() *
                                               2.0).epsilon(1e-12));
}

TEST_CASE("gmsh import: minimal file") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
      "$Elements\n1\n1 4 2 0 1 1 2 3 4\n$EndElements\n");
  const MeshImportResult result = read_mesh(in, MeshFormat::GmshMsh2Ascii);
  CHECK(result.mesh.n_vertices() == 4);
  CHECK(result.mesh.n_elements() == 1);
  CHECK(result.skipped_elements == 0);
  CHECK(result.mesh.total_volume() == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("gmsh import: non-tet elements are skipped with a warning count") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
      "$Elements\n2\n1 2 2 0 1 1 2 3\n2 4 2 0 1 1 2 3 4\n$EndElements\n");
  const MeshImportResult result = read_mesh(in, MeshFormat::GmshMsh2Ascii);
  CHECK(result.mesh.n_elements() == 1);
  CHECK(result.skipped_elements == 1);
}

TEST_CASE("gmsh import: parse errors carry line numbers") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n2\n1 0 0 0\nbroken line\n$EndNodes\n");
  try {
    read_mesh(in, MeshFormat::GmshMsh2Ascii);
    FAIL("expected a parse error");
  } catch (const ConfigError& error) {
    CHECK(std::string(error.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("gmsh import: empty mesh is rejected") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n1\n1 0 0 0\n$EndNodes\n$Elements\n0\n$EndElements\n");
  CHECK_THROWS_AS(read_mesh(in, MeshFormat::GmshMsh2Ascii), ConfigError);
}

TEST_CASE("mesh round trips through both formats") {
  const Mesh mesh = generate_box_mesh(2, 3, 1, Vec3(-0.25, 0, 0.5), Vec3(1, 0.7, 2));
  for (MeshFormat format : {MeshFormat::GmshMsh2Ascii, MeshFormat::TetMesh}) {
    std::stringstream buffer;
    write_mesh(mesh, buffer, format);
    const MeshImportResult result = read_mesh(buffer, format);
    REQUIRE(result.mesh.n_vertices() == mesh.n_vertices());
    REQUIRE(result.mesh.n_elements() == mesh.n_elements());
    CHECK(result.mesh.vertices == mesh.vertices);  // bitwise, 17 significant digits
    CHECK(result.mesh.elements == mesh.elements);
  }
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(generate_box_mesh(0, 1, 1, Vec3(0, 0, 0), Vec3(1, 1, 1)), ConfigError);
  CHECK_THROWS_AS(generate_box_mesh(1, 1, 1, Vec3(0, 0, 0), Vec3(-1, 1, 1)), ConfigError);
  CHECK_THROWS_AS(generate_disk_mesh(-1.0, 1.0, 4, 1), ConfigError);

  Mesh broken;
  broken.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  broken.elements = {{0, 1, 2, 9}};
  CHECK_THROWS_AS(broken.finalize(), ConfigError);
}

TEST_CASE("orientation repair flips inverted elements") {
  Mesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  mesh.elements = {{0, 2, 1, 3}};  // negative signed volume as given
  mesh.finalize();
  CHECK(mesh.element_volume(0) > 0.0);
}
