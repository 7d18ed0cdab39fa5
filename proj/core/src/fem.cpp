#include "afmfem/fem.hpp"

#include <cmath>
#include <vector>

#include "afmfem/error.hpp"

namespace afmfem {

ElementGeometry element_geometry(const Mesh& mesh, int e) {
  const auto& el = mesh.elements[static_cast<std::size_t>(e)];
  const Vec3& x0 = mesh.vertices[el[0]];
  Mat3 jac;
  jac.col(0) = mesh.vertices[el[1]] - x0;
  jac.col(1) = mesh.vertices[el[2]] - x0;
  jac.col(2) = mesh.vertices[el[3]] - x0;
  const double det = jac.determinant();
  if (!(std::abs(det) > 0.0)) throw NumericalError("degenerate element in assembly");
  ElementGeometry geo;
  geo.volume = det / 6.0;
  const Mat3 inv_t = jac.inverse().transpose();
  geo.grad[1] = inv_t.col(0);
  geo.grad[2] = inv_t.col(1);
  geo.grad[3] = inv_t.col(2);
  geo.grad[0] = -(geo.grad[1] + geo.grad[2] + geo.grad[3]);
  return geo;
}

SparseOperator assemble_stiffness(const Mesh& mesh) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_elements()) * 16);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto geo = element_geometry(mesh, e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        triplets.emplace_back(el[i], el[j], geo.volume * geo.grad[i].dot(geo.grad[j]));
  }
  SparseOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.symmetric = true;
  return op;
}

SparseOperator assemble_mass(const Mesh& mesh) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_elements()) * 16);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double vol = mesh.element_volume(e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        triplets.emplace_back(el[i], el[j], (i == j) ? vol / 10.0 : vol / 20.0);
  }
  SparseOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.symmetric = true;
  return op;
}

LumpedMass assemble_lumped_mass(const Mesh& mesh) {
  LumpedMass lumped;
  lumped.weights = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double vol = mesh.element_volume(e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    for (int i = 0; i < 4; ++i) lumped.weights[el[i]] += vol / 4.0;
  }
  return lumped;
}

FemSystem assemble(const Mesh& mesh) {
  FemSystem fem;
  fem.stiffness = assemble_stiffness(mesh);
  fem.mass = assemble_mass(mesh);
  fem.lumped = assemble_lumped_mass(mesh);
  fem.volume = mesh.total_volume();
  fem.n_vertices = mesh.n_vertices();
  return fem;
}

Field nodal_interpolation(const std::function<Vec3(const Vec3&)>& f, const Mesh& mesh) {
  Field field(mesh.n_vertices(), 3);
  for (int z = 0; z < mesh.n_vertices(); ++z) {
    const Vec3 value = f(mesh.vertices[static_cast<std::size_t>(z)]);
    if (!value.allFinite())
      throw NumericalError("nodal_interpolation: non-finite value at vertex " + std::to_string(z));
    field.row(z) = value.transpose();
  }
  return field;
}

namespace {

void require_same_mesh(const FemSystem& fem, const Field& u, const Field& v) {
  if (u.rows() != fem.n_vertices || v.rows() != fem.n_vertices)
    throw ConfigError("inner: fields do not match the mesh");
}

}  // namespace

double inner_l2(const FemSystem& fem, const Field& u, const Field& v) {
  require_same_mesh(fem, u, v);
  return (u.cwiseProduct(fem.mass.matrix * v)).sum();
}

double inner_grad(const FemSystem& fem, const Field& u, const Field& v) {
  require_same_mesh(fem, u, v);
  return (u.cwiseProduct(fem.stiffness.matrix * v)).sum();
}

double inner_lumped(const FemSystem& fem, const Field& u, const Field& v) {
  require_same_mesh(fem, u, v);
  return fem.lumped.weights.dot(u.cwiseProduct(v).rowwise().sum());
}

double inner(Metric metric, const FemSystem& fem, const Field& u, const Field& v) {
  switch (metric) {
    case Metric::L2: return inner_l2(fem, u, v);
    case Metric::LumpedL2: return inner_lumped(fem, u, v);
    case Metric::H1: return inner_l2(fem, u, v) + inner_grad(fem, u, v);
  }
  throw ConfigError("unknown metric");
}

double metric_equivalence_constant(Metric metric) {
  switch (metric) {
    case Metric::L2: return 1.0;
    case Metric::LumpedL2: return std::sqrt(5.0);
    case Metric::H1: return 1.0;
  }
  throw ConfigError("unknown metric");
}

Eigen::VectorXd flatten(const Field& field) {
  Eigen::VectorXd v(field.rows() * 3);
  for (Eigen::Index z = 0; z < field.rows(); ++z)
    for (int c = 0; c < 3; ++c) v[3 * z + c] = field(z, c);
  return v;
}

Field unflatten(const Eigen::VectorXd& v) {
  if (v.size() % 3 != 0) throw NumericalError("unflatten: size not a multiple of 3");
  Field field(v.size() / 3, 3);
  for (Eigen::Index z = 0; z < field.rows(); ++z)
    for (int c = 0; c < 3; ++c) field(z, c) = v[3 * z + c];
  return field;
}

SparseMatrix expand_componentwise(const SparseMatrix& scalar_op) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(scalar_op.nonZeros()) * 3);
  for (int row = 0; row < scalar_op.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(scalar_op, row); it; ++it)
      for (int c = 0; c < 3; ++c)
        triplets.emplace_back(3 * it.row() + c, 3 * it.col() + c, it.value());
  SparseMatrix out(scalar_op.rows() * 3, scalar_op.cols() * 3);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace afmfem
