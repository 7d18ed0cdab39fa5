#include "afmfem/tangent.hpp"

#include <cmath>

#include "afmfem/error.hpp"

namespace afmfem {

TangentFrame build_frames(const Field& m) {
  TangentFrame frame;
  frame.t1 = Field(m.rows(), 3);
  frame.t2 = Field(m.rows(), 3);
  for (Eigen::Index z = 0; z < m.rows(); ++z) {
    const Vec3 mz = m.row(z).transpose();
    if (mz.norm() < 1e-300)
      throw NumericalError("build_frames: zero nodal vector at vertex " + std::to_string(z));
    int k = 0;
    for (int c = 1; c < 3; ++c)
      if (std::abs(mz[c]) < std::abs(mz[k])) k = c;
    const Vec3 t1 = Vec3::Unit(k).cross(mz).normalized();
    const Vec3 t2 = mz.cross(t1).normalized();
    frame.t1.row(z) = t1.transpose();
    frame.t2.row(z) = t2.transpose();
  }
  return frame;
}

SparseMatrix frame_prolongation(const TangentFrame& frame) {
  return frame_prolongation(std::vector<const TangentFrame*>{&frame});
}

SparseMatrix frame_prolongation(const std::vector<const TangentFrame*>& frames) {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::Index rows = 0, cols = 0;
  for (const TangentFrame* frame : frames) {
    const Eigen::Index n = frame->t1.rows();
    for (Eigen::Index z = 0; z < n; ++z)
      for (int c = 0; c < 3; ++c) {
        triplets.emplace_back(rows + 3 * z + c, cols + 2 * z, frame->t1(z, c));
        triplets.emplace_back(rows + 3 * z + c, cols + 2 * z + 1, frame->t2(z, c));
      }
    rows += 3 * n;
    cols += 2 * n;
  }
  SparseMatrix prolongation(rows, cols);
  prolongation.setFromTriplets(triplets.begin(), triplets.end());
  return prolongation;
}

ReducedSystem reduce(const SparseMatrix& full_operator, const Eigen::VectorXd& full_rhs,
                     const SparseMatrix& prolongation, bool symmetric) {
  if (full_operator.rows() != prolongation.rows() || full_operator.cols() != prolongation.rows() ||
      full_rhs.size() != prolongation.rows())
    throw NumericalError("reduce: dimension mismatch");
  ReducedSystem system;
  const SparseMatrix pt = SparseMatrix(prolongation.transpose());
  system.op.matrix = pt * full_operator * prolongation;
  if (symmetric) {
    // exact symmetry as stored (the product only commutes in exact arithmetic)
    system.op.matrix = 0.5 * (system.op.matrix + SparseMatrix(system.op.matrix.transpose()));
  }
  system.op.symmetric = symmetric;
  system.rhs = pt * full_rhs;
  return system;
}

namespace {

// Inverted 2x2 diagonal blocks, one per vertex unknown pair.
class BlockJacobi {
public:
  explicit BlockJacobi(const SparseMatrix& matrix) {
    const Eigen::Index n = matrix.rows();
    blocks_.resize(static_cast<std::size_t>(n / 2));
    for (Eigen::Index i = 0; i < n / 2; ++i) {
      Eigen::Matrix2d block;
      block << matrix.coeff(2 * i, 2 * i), matrix.coeff(2 * i, 2 * i + 1),
          matrix.coeff(2 * i + 1, 2 * i), matrix.coeff(2 * i + 1, 2 * i + 1);
      const double det = block.determinant();
      const double scale = block.cwiseAbs().maxCoeff();
      if (std::abs(det) > 1e-30 * scale * scale)
        blocks_[static_cast<std::size_t>(i)] = block.inverse();
      else
        blocks_[static_cast<std::size_t>(i)] = Eigen::Matrix2d::Identity();
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Eigen::Index k = static_cast<Eigen::Index>(2 * i);
      out.segment<2>(k) = blocks_[i] * v.segment<2>(k);
    }
    return out;
  }

private:
  std::vector<Eigen::Matrix2d> blocks_;
};

int default_max_iter(const SolverOptions& options, Eigen::Index dim) {
  return options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * dim);
}

}  // namespace

SolveResult solve(const ReducedSystem& system, const SolverOptions& options) {
  const SparseMatrix& B = system.op.matrix;
  const Eigen::VectorXd& b = system.rhs;
  const Eigen::Index n = b.size();
  const double b_norm = b.norm();

  SolveResult result;
  result.x = Eigen::VectorXd::Zero(n);
  if (b_norm == 0.0) {
    result.converged = true;
    return result;
  }
  if (!(options.tol > 0.0 && options.tol < 1.0))
    throw ConfigError("solve: tol must be in (0,1)");

  const BlockJacobi precond(B);
  const int max_iter = default_max_iter(options, n);
  const int restart = std::max(1, options.restart);

  Eigen::MatrixXd basis(n, restart + 1);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(restart + 1, restart);
  Eigen::VectorXd cs(restart), sn(restart), g(restart + 1);

  int total_iters = 0;
  double rel_residual = 1.0;
  while (total_iters < max_iter) {
    Eigen::VectorXd r = b - B * result.x;
    double beta = r.norm();
    rel_residual = beta / b_norm;
    if (rel_residual <= options.tol) {
      result.converged = true;
      break;
    }
    basis.col(0) = r / beta;
    g.setZero();
    g[0] = beta;

    int k = 0;
    for (; k < restart && total_iters < max_iter; ++k, ++total_iters) {
      Eigen::VectorXd w = B * precond.apply(basis.col(k));
      for (int i = 0; i <= k; ++i) {
        hess(i, k) = w.dot(basis.col(i));
        w -= hess(i, k) * basis.col(i);
      }
      hess(k + 1, k) = w.norm();
      const bool breakdown = hess(k + 1, k) < 1e-300;
      if (!breakdown) basis.col(k + 1) = w / hess(k + 1, k);

      for (int i = 0; i < k; ++i) {
        const double tmp = cs[i] * hess(i, k) + sn[i] * hess(i + 1, k);
        hess(i + 1, k) = -sn[i] * hess(i, k) + cs[i] * hess(i + 1, k);
        hess(i, k) = tmp;
      }
      const double denom = std::hypot(hess(k, k), hess(k + 1, k));
      cs[k] = hess(k, k) / denom;
      sn[k] = hess(k + 1, k) / denom;
      hess(k, k) = denom;
      hess(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];

      rel_residual = std::abs(g[k + 1]) / b_norm;
      if (rel_residual <= options.tol || breakdown) {
        ++k;
        ++total_iters;
        break;
      }
    }

    // back substitution and preconditioned update
    Eigen::VectorXd y = g.head(k);
    for (int i = k - 1; i >= 0; --i) {
      for (int j = i + 1; j < k; ++j) y[i] -= hess(i, j) * y[j];
      y[i] /= hess(i, i);
    }
    result.x += precond.apply(basis.leftCols(k) * y);

    const double true_res = (b - B * result.x).norm() / b_norm;
    rel_residual = true_res;
    if (true_res <= options.tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations = total_iters;
  result.residual = (b - B * result.x).norm() / b_norm;
  result.converged = result.residual <= options.tol;
  return result;
}

SolveResult solve_symmetric(const ReducedSystem& system, const SolverOptions& options) {
  if (!system.op.symmetric)
    throw ConfigError("solve_symmetric: system is not flagged symmetric");
  const SparseMatrix& B = system.op.matrix;
  const Eigen::VectorXd& b = system.rhs;
  const double b_norm = b.norm();

  SolveResult result;
  result.x = Eigen::VectorXd::Zero(b.size());
  if (b_norm == 0.0) {
    result.converged = true;
    return result;
  }
  if (!(options.tol > 0.0 && options.tol < 1.0))
    throw ConfigError("solve_symmetric: tol must be in (0,1)");

  const BlockJacobi precond(B);
  const int max_iter = default_max_iter(options, b.size());

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precond.apply(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (r.norm() / b_norm <= options.tol) break;
    const Eigen::VectorXd Bp = B * p;
    const double alpha = rz / p.dot(Bp);
    result.x += alpha * p;
    r -= alpha * Bp;
    z = precond.apply(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  result.iterations = iter;
  result.residual = (b - B * result.x).norm() / b_norm;
  result.converged = result.residual <= options.tol;
  return result;
}

}  // namespace afmfem
