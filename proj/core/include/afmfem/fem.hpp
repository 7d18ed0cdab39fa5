#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "afmfem/mesh.hpp"

namespace afmfem {

/// One 3-vector per mesh vertex (row z holds the value at vertex z).
using Field = Eigen::Matrix<double, Eigen::Dynamic, 3>;

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-compressed sparse operator over vertex (or reduced) indices.
struct SparseOperator {
  SparseMatrix matrix;
  bool symmetric = false;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
};

/// Diagonal of the mass-lumped L2 product: one positive weight per vertex,
/// weights summing to the domain volume.
struct LumpedMass {
  Eigen::VectorXd weights;
};

enum class Metric { L2, LumpedL2, H1 };

/// Volume and constant hat-function gradients of one tetrahedron.
struct ElementGeometry {
  double volume;
  Vec3 grad[4];
};

ElementGeometry element_geometry(const Mesh& mesh, int e);

/// Stiffness matrix K[i][j] = int grad(phi_i) . grad(phi_j), assembled
/// exactly (P1 gradients are constant per element). Symmetric positive
/// semidefinite with kernel spanned by the constants.
SparseOperator assemble_stiffness(const Mesh& mesh);

/// Consistent mass matrix M[i][j] = int phi_i phi_j, exact per element:
/// |K|/10 on the diagonal, |K|/20 off the diagonal.
SparseOperator assemble_mass(const Mesh& mesh);

/// Lumped mass weights w(z) = sum over elements containing z of |K|/4.
LumpedMass assemble_lumped_mass(const Mesh& mesh);

/// Per-mesh bundle of the assembled operators used throughout the library.
struct FemSystem {
  SparseOperator stiffness;
  SparseOperator mass;
  LumpedMass lumped;
  double volume = 0.0;
  int n_vertices = 0;
};

FemSystem assemble(const Mesh& mesh);

/// Nodal interpolation: field(z) = f(z) at every vertex. Throws
/// NumericalError if f produces non-finite values.
Field nodal_interpolation(const std::function<Vec3(const Vec3&)>& f, const Mesh& mesh);

/// Inner products on vector P1 fields:
///   L2        u' M v   (componentwise consistent mass)
///   LumpedL2  sum_z w_z u(z).v(z)
///   H1        u' M v + u' K v
double inner(Metric metric, const FemSystem& fem, const Field& u, const Field& v);

/// u' K v summed over components (the grad-grad pairing).
double inner_grad(const FemSystem& fem, const Field& u, const Field& v);

/// u' M v summed over components.
double inner_l2(const FemSystem& fem, const Field& u, const Field& v);

/// sum_z w_z u(z).v(z).
double inner_lumped(const FemSystem& fem, const Field& u, const Field& v);

/// Norm-equivalence constant c_H of the metric against the L2/H1 bracket:
/// 1 for L2 and H1, sqrt(5) for the lumped L2 product.
double metric_equivalence_constant(Metric metric);

/// Flatten / unflatten between an N x 3 field and the interleaved vector
/// (x_z0,y_z0,z_z0, x_z1,...) used by the solvers.
Eigen::VectorXd flatten(const Field& field);
Field unflatten(const Eigen::VectorXd& v);

/// Expands a scalar vertex operator S to the interleaved 3N x 3N operator
/// acting componentwise: E(3z+c, 3z'+c) = S(z,z').
SparseMatrix expand_componentwise(const SparseMatrix& scalar_op);

}  // namespace afmfem
