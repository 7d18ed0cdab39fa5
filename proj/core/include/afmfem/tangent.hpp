#pragma once

#include <vector>

#include "afmfem/fem.hpp"

namespace afmfem {

/// Orthonormal tangent frame per vertex: t1(z), t2(z) with
/// t1.t2 = t1.m = t2.m = 0 and |t1| = |t2| = 1. Realizes the discrete
/// tangent space as a null-space parametrization with 2 unknowns per vertex.
struct TangentFrame {
  Field t1;
  Field t2;

  int n_vertices() const { return static_cast<int>(t1.rows()); }
};

/// Builds the frame at every vertex: t1(z) = normalize(e_k x m(z)) where e_k
/// is the coordinate axis with the smallest |m_k(z)| (ties broken toward the
/// smaller index), t2(z) = normalize(m(z) x t1(z)). Throws on zero nodal
/// vectors.
TangentFrame build_frames(const Field& m);

/// Prolongation P mapping reduced coefficients (2 per vertex) to interleaved
/// nodal 3-vectors; columns are the frame vectors.
SparseMatrix frame_prolongation(const TangentFrame& frame);

/// Block-diagonal prolongation for several sublattices stacked.
SparseMatrix frame_prolongation(const std::vector<const TangentFrame*>& frames);

/// Reduced linear system B x = rhs with B = P' A P and rhs = P' b.
struct ReducedSystem {
  SparseOperator op;
  Eigen::VectorXd rhs;
};

ReducedSystem reduce(const SparseMatrix& full_operator, const Eigen::VectorXd& full_rhs,
                     const SparseMatrix& prolongation, bool symmetric);

struct SolverOptions {
  double tol = 1e-10;   // relative residual ||b - Bx|| / ||b||
  int max_iter = 0;     // 0: defaults to 10 * reduced dimension
  int restart = 50;     // GMRES restart length
};

struct SolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;  // final relative residual
  bool converged = false;
};

/// Restarted GMRES with a block-Jacobi preconditioner built from the 2x2
/// per-vertex diagonal blocks. Right preconditioning, so the reported
/// residual is the true one. On non-convergence the best iterate is
/// returned with converged = false.
SolveResult solve(const ReducedSystem& system, const SolverOptions& options = {});

/// Preconditioned conjugate gradients for symmetric positive definite
/// reduced systems; same preconditioner and stopping rule as solve().
SolveResult solve_symmetric(const ReducedSystem& system, const SolverOptions& options = {});

}  // namespace afmfem
