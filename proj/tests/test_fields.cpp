#include <doctest.h>

#include <cmath>
#include <functional>

#include "afmfem/fields.hpp"

using namespace afmfem;

namespace {

double tet_volume(const Vec3 x[4]) {
  return std::abs((x[1] - x[0]).cross(x[2] - x[0]).dot(x[3] - x[0])) / 6.0;
}

// quadrature oracle: recursive red refinement with centroid evaluation,
// converges for the piecewise-smooth |affine| integrand
double quadrature_abs(const Vec3 x[4], const std::function<double(const Vec3&)>& g, int depth) {
  if (depth == 0) {
    const Vec3 centroid = 0.25 * (x[0] + x[1] + x[2] + x[3]);
    return tet_volume(x) * std::abs(g(centroid));
  }
  const Vec3 m01 = 0.5 * (x[0] + x[1]), m02 = 0.5 * (x[0] + x[2]), m03 = 0.5 * (x[0] + x[3]);
  const Vec3 m12 = 0.5 * (x[1] + x[2]), m13 = 0.5 * (x[1] + x[3]), m23 = 0.5 * (x[2] + x[3]);
  const Vec3 children[8][4] = {
      {x[0], m01, m02, m03}, {x[1], m01, m12, m13}, {x[2], m02, m12, m23},
      {x[3], m03, m13, m23}, {m01, m02, m03, m13},  {m01, m02, m12, m13},
      {m02, m03, m13, m23},  {m02, m12, m13, m23},
  };
  double total = 0.0;
  for (const auto& child : children) total += quadrature_abs(child, g, depth - 1);
  return total;
}

}  // namespace

TEST_CASE("exact |affine| integration against the quadrature oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    Vec3 x[4];
    do {
      for (auto& v : x)
        v = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    } while (tet_volume(x) < 0.05);

    // include every sign pattern: 0..4 negative vertex values
    double values[4];
    const int n_negative = trial % 5;
    for (int i = 0; i < 4; ++i) {
      const double magnitude = rng.uniform(0.1, 2.0);
      values[i] = i < n_negative ? -magnitude : magnitude;
    }

    const Vec3 gradient = [&] {
      Eigen::Matrix3d jac;
      jac.col(0) = x[1] - x[0];
      jac.col(1) = x[2] - x[0];
      jac.col(2) = x[3] - x[0];
      return Vec3(jac.transpose().inverse() *
                  Vec3(values[1] - values[0], values[2] - values[0], values[3] - values[0]));
    }();
    const auto g = [&](const Vec3& p) { return values[0] + gradient.dot(p - x[0]); };

    const double exact = integrate_abs_affine(x, values);
    const double approx = quadrature_abs(x, g, 6);
    CHECK(exact == doctest::Approx(approx).epsilon(2e-4));
  }
}

TEST_CASE("|affine| integration handles vertex zeros") {
  Vec3 x[4] = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  SUBCASE("identically zero") {
    const double values[4] = {0, 0, 0, 0};
    CHECK(integrate_abs_affine(x, values) == 0.0);
  }
  SUBCASE("one negative, rest zero") {
    const double values[4] = {-1, 0, 0, 0};
    // |g| = -g everywhere on the element
    CHECK(integrate_abs_affine(x, values) == doctest::Approx((1.0 / 6.0) * 0.25).epsilon(1e-12));
  }
}

TEST_CASE("constraint report of exactly unit fields") {
  const Mesh mesh = generate_box_mesh(2, 2, 2, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  const SublatticePair pair = make_constant_pair(Vec3(1, 0, 0), Vec3(0, 0, 1), mesh.n_vertices());
  const ConstraintReport report = constraint_report(pair, mesh, fem);
  CHECK(report.err_l1[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(report.err_l1[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(report.err_linf[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("constraint report of uniformly stretched fields") {
  // |m(z)| = sqrt(1+c) everywhere: err_L1 = c |Omega|, err_Linf = sqrt(1+c)-1
  const double c = 0.21;
  const Mesh mesh = generate_box_mesh(2, 2, 2, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  SublatticePair pair = make_constant_pair(Vec3(0, 1, 0), Vec3(0, 1, 0), mesh.n_vertices());
  pair.m1 *= std::sqrt(1.0 + c);
  pair.m2 *= std::sqrt(1.0 + c);
  const ConstraintReport report = constraint_report(pair, mesh, fem);
  CHECK(report.err_l1[0] == doctest::Approx(c).epsilon(1e-12));
  CHECK(report.err_linf[0] == doctest::Approx(std::sqrt(1.0 + c) - 1.0).epsilon(1e-12));
}

TEST_CASE("constraint report with sub-unit nodes uses exact integration") {
  // shrunken field: nodal values < 1, interpolant of |m|^2 - 1 is negative
  const double s = 0.8;
  const Mesh mesh = generate_box_mesh(1, 1, 1, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  SublatticePair pair = make_constant_pair(Vec3(1, 0, 0), Vec3(1, 0, 0), mesh.n_vertices());
  pair.m1 *= s;
  pair.m2 *= s;
  const ConstraintReport report = constraint_report(pair, mesh, fem);
  CHECK(report.err_l1[0] == doctest::Approx(1.0 - s * s).epsilon(1e-12));
  CHECK(report.err_linf[0] == doctest::Approx(s - 1.0).epsilon(1e-12));
}

TEST_CASE("constraint report is invariant under sublattice rotations") {
  const Mesh mesh = generate_box_mesh(2, 2, 2, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  SublatticePair pair = make_random_pair(5, mesh.n_vertices());
  pair.m1 *= 1.13;  // introduce a constraint violation

  const Eigen::AngleAxisd rotation(0.83, Vec3(1, 2, -1).normalized());
  SublatticePair rotated = pair;
  rotated.m1 = pair.m1 * rotation.toRotationMatrix().transpose();

  const ConstraintReport before = constraint_report(pair, mesh, fem);
  const ConstraintReport after = constraint_report(rotated, mesh, fem);
  CHECK(before.err_l1[0] == doctest::Approx(after.err_l1[0]).epsilon(1e-12));
  CHECK(before.err_linf[0] == doctest::Approx(after.err_linf[0]).epsilon(1e-12));
}

TEST_CASE("nodal projection") {
  Field field(3, 3);
  field << 0, 0, 2, 0, 0, 0, 0.6, 0.8, 0;
  const ProjectionResult result = nodal_projection(field);
  CHECK(result.field.row(0) == Eigen::RowVector3d(0, 0, 1));
  CHECK(result.field.row(1) == Eigen::RowVector3d(0, 0, 1));  // degenerate node policy
  CHECK(result.degenerate_nodes == 1);
  CHECK(result.field.row(2).norm() == doctest::Approx(1.0).epsilon(1e-15));

  // already-unit fields are unchanged
  const ProjectionResult again = nodal_projection(result.field);
  CHECK(again.degenerate_nodes == 0);
  CHECK((again.field - result.field).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("initial states") {
  const Mesh mesh = generate_box_mesh(2, 2, 2, Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));

  SUBCASE("constant pair is unit at every node") {
    const SublatticePair pair = make_constant_pair(Vec3(1, 0, 0), Vec3(0, 1, 0),
                                                   mesh.n_vertices());
    for (int z = 0; z < mesh.n_vertices(); ++z) {
      CHECK(std::abs(pair.m1.row(z).norm() - 1.0) <= 1e-14);
      CHECK(std::abs(pair.m2.row(z).norm() - 1.0) <= 1e-14);
    }
    CHECK_THROWS_AS(make_constant_pair(Vec3(0, 0, 0), Vec3(0, 1, 0), 8), ConfigError);
  }

  SUBCASE("random pairs are reproducible per seed") {
    const SublatticePair a = make_random_pair(123, mesh.n_vertices());
    const SublatticePair b = make_random_pair(123, mesh.n_vertices());
    const SublatticePair c = make_random_pair(124, mesh.n_vertices());
    CHECK(a.m1 == b.m1);
    CHECK(a.m2 == b.m2);
    CHECK(a.m1 != c.m1);
    for (int z = 0; z < mesh.n_vertices(); ++z)
      CHECK(std::abs(a.m1.row(z).norm() - 1.0) <= 1e-14);
  }
}

TEST_CASE("skyrmion initial state") {
  const Mesh mesh = generate_disk_mesh(30.0, 1.0, 6, 1);
  const SublatticePair pair = make_skyrmion_pair(mesh, +1, 10.0, 20.0, 7, 0.3);

  int center = -1, rim = -1;
  for (int z = 0; z < mesh.n_vertices(); ++z) {
    if (mesh.vertices[z].head<2>().norm() < 1e-12 && center < 0) center = z;
    if (mesh.vertices[z].head<2>().norm() > 29.0 && rim < 0) rim = z;
  }
  REQUIRE(center >= 0);
  REQUIRE(rim >= 0);

  for (int z = 0; z < mesh.n_vertices(); ++z) {
    CHECK(std::abs(pair.m1.row(z).norm() - 1.0) <= 1e-14);
    CHECK(std::abs(pair.m2.row(z).norm() - 1.0) <= 1e-14);
  }
  // opposite core polarities, inverted background
  CHECK(pair.m1(center, 2) > 0.0);
  CHECK(pair.m2(center, 2) < 0.0);
  CHECK(pair.m1(rim, 2) < 0.0);
  CHECK(pair.m2(rim, 2) > 0.0);

  const SublatticePair again = make_skyrmion_pair(mesh, +1, 10.0, 20.0, 7, 0.3);
  CHECK(pair.m1 == again.m1);
}
