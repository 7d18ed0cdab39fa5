#include <doctest.h>

#include <cmath>

#include "afmfem/fields.hpp"
#include "afmfem/tangent.hpp"

using namespace afmfem;

namespace {

Field random_field(int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Field field(n, 3);
  for (int z = 0; z < n; ++z)
    for (int c = 0; c < 3; ++c) field(z, c) = rng.uniform(lo, hi);
  return field;
}

}  // namespace

TEST_CASE("frame of the north pole") {
  Field m(1, 3);
  m << 0, 0, 1;
  const TangentFrame frame = build_frames(m);
  // smallest component is m_x (tie with m_y broken toward x):
  // t1 = e1 x e3 = (0,-1,0), t2 = e3 x t1 = (1,0,0)
  CHECK(frame.t1.row(0) == Eigen::RowVector3d(0, -1, 0));
  CHECK(frame.t2.row(0) == Eigen::RowVector3d(1, 0, 0));
}

TEST_CASE("frames are orthonormal and orthogonal to m") {
  const Field m = random_field(200, 12, -2.0, 2.0);
  const TangentFrame frame = build_frames(m);
  for (int z = 0; z < 200; ++z) {
    const Vec3 mz = m.row(z).transpose();
    const Vec3 t1 = frame.t1.row(z).transpose();
    const Vec3 t2 = frame.t2.row(z).transpose();
    CHECK(std::abs(t1.norm() - 1.0) <= 1e-14);
    CHECK(std::abs(t2.norm() - 1.0) <= 1e-14);
    CHECK(std::abs(t1.dot(t2)) <= 1e-14);
    CHECK(std::abs(t1.dot(mz)) <= 1e-14 * mz.norm());
    CHECK(std::abs(t2.dot(mz)) <= 1e-14 * mz.norm());
  }
  Field zero(1, 3);
  zero.setZero();
  CHECK_THROWS_AS(build_frames(zero), NumericalError);
}

TEST_CASE("prolongation is an isometry onto the tangent space") {
  const Field m = random_field(50, 3);
  const TangentFrame frame = build_frames(m);
  const SparseMatrix p = frame_prolongation(frame);
  REQUIRE(p.rows() == 150);
  REQUIRE(p.cols() == 100);

  // P'P = identity on the reduced space
  const SparseMatrix gram = SparseMatrix(p.transpose()) * p;
  for (int i = 0; i < gram.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(gram, i); it; ++it)
      CHECK(std::abs(it.value() - (it.row() == it.col() ? 1.0 : 0.0)) <= 1e-14);

  // every lifted vector is nodally orthogonal to m
  const Eigen::VectorXd x = Eigen::VectorXd::Random(100);
  const Field lifted = unflatten(p * x);
  for (int z = 0; z < 50; ++z)
    CHECK(std::abs(lifted.row(z).dot(m.row(z))) <= 1e-13 * m.row(z).norm() * lifted.row(z).norm() + 1e-300);
}

TEST_CASE("reduction of the lumped mass is diagonal with duplicated weights") {
  const Mesh mesh = generate_box_mesh(1, 1, 1, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  const Field m = random_field(mesh.n_vertices(), 21);
  const TangentFrame frame = build_frames(m);

  std::vector<Eigen::Triplet<double>> triplets;
  for (int z = 0; z < fem.n_vertices; ++z)
    for (int c = 0; c < 3; ++c)
      triplets.emplace_back(3 * z + c, 3 * z + c, fem.lumped.weights[z]);
  SparseMatrix full(3 * fem.n_vertices, 3 * fem.n_vertices);
  full.setFromTriplets(triplets.begin(), triplets.end());

  const ReducedSystem system =
      reduce(full, Eigen::VectorXd::Zero(3 * fem.n_vertices), frame_prolongation(frame), true);
  for (int i = 0; i < system.op.matrix.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(system.op.matrix, i); it; ++it) {
      if (it.row() == it.col())
        CHECK(it.value() == doctest::Approx(fem.lumped.weights[it.row() / 2]).epsilon(1e-13));
      else
        CHECK(std::abs(it.value()) <= 1e-15);
    }
}

TEST_CASE("rhs parallel to m reduces to zero") {
  const Field m = random_field(40, 8);
  Field rhs(40, 3);
  Rng rng(9);
  for (int z = 0; z < 40; ++z) rhs.row(z) = rng.uniform(-3.0, 3.0) * m.row(z);
  const SparseMatrix p = frame_prolongation(build_frames(m));
  const Eigen::VectorXd reduced = SparseMatrix(p.transpose()) * flatten(rhs);
  CHECK(reduced.cwiseAbs().maxCoeff() <= 1e-13 * rhs.cwiseAbs().maxCoeff());
}

TEST_CASE("symmetric full operators reduce to exactly symmetric systems") {
  const Mesh mesh = generate_box_mesh(2, 2, 2, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  const Field m = random_field(mesh.n_vertices(), 10);
  const SparseMatrix full =
      expand_componentwise(SparseMatrix(fem.mass.matrix + 0.5 * fem.stiffness.matrix));
  const ReducedSystem system = reduce(full, Eigen::VectorXd::Ones(3 * fem.n_vertices),
                                      frame_prolongation(build_frames(m)), true);
  CHECK(system.op.symmetric);
  const SparseMatrix diff = SparseMatrix(system.op.matrix.transpose()) - system.op.matrix;
  const bool exactly_symmetric =
      diff.coeffs().size() == 0 || diff.coeffs().cwiseAbs().maxCoeff() == 0.0;
  CHECK(exactly_symmetric);
}

TEST_CASE("solver on a diagonal system") {
  const int n = 64;
  std::vector<Eigen::Triplet<double>> triplets;
  Rng rng(5);
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, rng.uniform(0.5, 4.0));
  ReducedSystem system;
  system.op.matrix.resize(n, n);
  system.op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system.op.symmetric = true;
  system.rhs = Eigen::VectorXd::Random(n);

  const SolveResult result = solve(system);
  CHECK(result.converged);
  CHECK(result.iterations <= 3);  // block-Jacobi is exact here
  CHECK((system.op.matrix * result.x - system.rhs).norm() <= 1e-10 * system.rhs.norm());
}

TEST_CASE("gradient-flow style system: GMRES, CG, and the full-space residual") {
  const Mesh mesh = generate_box_mesh(3, 3, 3, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  const SublatticePair pair = make_random_pair(33, mesh.n_vertices());
  const TangentFrame frame = build_frames(pair.m1);
  const SparseMatrix p = frame_prolongation(frame);

  const SparseMatrix full =
      expand_componentwise(SparseMatrix(fem.mass.matrix + 2e-3 * fem.stiffness.matrix));
  const Eigen::VectorXd b = flatten(random_field(mesh.n_vertices(), 77));
  const ReducedSystem system = reduce(full, b, p, true);

  SolverOptions options;
  options.tol = 1e-11;
  const SolveResult gmres = solve(system, options);
  CHECK(gmres.converged);
  CHECK(gmres.residual <= options.tol);

  // the lifted update stays in the tangent space and the variational
  // residual against every frame vector is at solver level
  const Field v = unflatten(p * gmres.x);
  for (int z = 0; z < mesh.n_vertices(); ++z)
    CHECK(std::abs(v.row(z).dot(pair.m1.row(z))) <=
          1e-13 * pair.m1.row(z).norm() * (v.row(z).norm() + 1.0));
  const Eigen::VectorXd full_residual = SparseMatrix(p.transpose()) * (b - full * flatten(v));
  CHECK(full_residual.norm() <= 10.0 * options.tol * system.rhs.norm());

  const SolveResult cg = solve_symmetric(system, options);
  CHECK(cg.converged);
  CHECK((gmres.x - cg.x).norm() <= 10.0 * options.tol * gmres.x.norm());
}

TEST_CASE("non-convergence returns the best iterate with a flag") {
  const Mesh mesh = generate_box_mesh(2, 2, 2, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FemSystem fem = assemble(mesh);
  const Field m = random_field(mesh.n_vertices(), 14);
  const SparseMatrix full = expand_componentwise(
      SparseMatrix(fem.mass.matrix + 1.0 * fem.stiffness.matrix));
  ReducedSystem system = reduce(full, Eigen::VectorXd::Ones(3 * fem.n_vertices),
                                frame_prolongation(build_frames(m)), true);
  SolverOptions options;
  options.tol = 1e-14;
  options.max_iter = 2;
  const SolveResult result = solve(system, options);
  CHECK(!result.converged);
  CHECK(result.iterations <= 2);
  CHECK(result.x.size() == system.rhs.size());
  CHECK(std::isfinite(result.residual));
}

TEST_CASE("solver rejects invalid tolerances") {
  ReducedSystem system;
  system.op.matrix.resize(2, 2);
  system.op.matrix.setIdentity();
  system.rhs = Eigen::VectorXd::Ones(2);
  SolverOptions options;
  options.tol = 0.0;
  CHECK_THROWS_AS(solve(system, options), ConfigError);
}
