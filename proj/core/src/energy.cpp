#include "afmfem/energy.hpp"

#include <cmath>
#include <sstream>

#include "afmfem/tangent.hpp"

namespace afmfem {

namespace {

void require_pair(const SublatticePair& pair, const FemSystem& fem) {
  if (pair.m1.rows() != fem.n_vertices || pair.m2.rows() != fem.n_vertices)
    throw ConfigError("fields do not match the mesh");
}

// int_K Dhat : (grad u x u), exact: grad u is constant and u affine per
// element, so the integrand is affine and the centroid rule is exact.
double dmi_energy(const Field& m, const Mat3& dmi, const Mesh& mesh) {
  if (dmi.isZero(0.0)) return 0.0;
  double total = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto geo = element_geometry(mesh, e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    Mat3 grad = Mat3::Zero();  // column j = d_j m
    Vec3 mean = Vec3::Zero();
    for (int i = 0; i < 4; ++i) {
      const Vec3 mi = m.row(el[i]).transpose();
      grad += mi * geo.grad[i].transpose();
      mean += 0.25 * mi;
    }
    double contrib = 0.0;
    for (int j = 0; j < 3; ++j) contrib += dmi.col(j).dot(grad.col(j).cross(mean));
    total += geo.volume * contrib;
  }
  return total;
}

// Negative first variation of the DMI energy (nodal gradient of -dE).
void add_dmi_rhs(Field& rhs, const Field& m, const Mat3& dmi, const Mesh& mesh) {
  if (dmi.isZero(0.0)) return;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto geo = element_geometry(mesh, e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    Mat3 grad = Mat3::Zero();
    Vec3 mean = Vec3::Zero();
    for (int i = 0; i < 4; ++i) {
      const Vec3 mi = m.row(el[i]).transpose();
      grad += mi * geo.grad[i].transpose();
      mean += 0.25 * mi;
    }
    Vec3 shared = Vec3::Zero();  // from varying the undifferentiated factor
    for (int j = 0; j < 3; ++j) shared += dmi.col(j).cross(grad.col(j));
    for (int i = 0; i < 4; ++i) {
      Vec3 from_grad = Vec3::Zero();  // from varying the differentiated factor
      for (int j = 0; j < 3; ++j) from_grad += geo.grad[i][j] * mean.cross(dmi.col(j));
      rhs.row(el[i]) -= (geo.volume * (from_grad + 0.25 * shared)).transpose();
    }
  }
}

}  // namespace

bool MaterialParams::has_lower_order() const {
  return q1 != 0.0 || q2 != 0.0 || !dmi1.isZero(0.0) || !dmi2.isZero(0.0) ||
         !h_ext.isZero(0.0);
}

void MaterialParams::validate() const {
  std::ostringstream msg;
  if (!(a11 + a22 > 0.0)) {
    msg << "coefficient condition violated: a11 + a22 = " << a11 + a22 << " must be > 0";
    throw ConfigError(msg.str());
  }
  if (!(a11 * a22 > a12 * a12)) {
    msg << "coefficient condition violated: a11*a22 = " << a11 * a22
        << " must exceed a12^2 = " << a12 * a12;
    throw ConfigError(msg.str());
  }
  if (q1 < 0.0 || q2 < 0.0) throw ConfigError("anisotropy constants must be >= 0");
  if ((q1 != 0.0 && std::abs(axis1.norm() - 1.0) > 1e-14) ||
      (q2 != 0.0 && std::abs(axis2.norm() - 1.0) > 1e-14))
    throw ConfigError("anisotropy axes must be unit vectors (within 1e-14)");
  if (!(eta_s1 > 0.0) || !(eta_s2 > 0.0))
    throw ConfigError("sublattice weights eta_s must be positive");
}

EnergyBreakdown energy(const SublatticePair& pair, const MaterialParams& params,
                       const Mesh& mesh, const FemSystem& fem) {
  require_pair(pair, fem);
  EnergyBreakdown e;

  const Field k_m1 = fem.stiffness.matrix * pair.m1;
  const Field k_m2 = fem.stiffness.matrix * pair.m2;
  e.intra_exchange = 0.5 * (params.a11 * pair.m1.cwiseProduct(k_m1).sum() +
                            params.a22 * pair.m2.cwiseProduct(k_m2).sum());
  e.inter_inhomogeneous = params.a12 * pair.m1.cwiseProduct(k_m2).sum();
  e.inter_homogeneous = -params.a0 * pair.m1.cwiseProduct(fem.mass.matrix * pair.m2).sum();

  for (int ell = 1; ell <= 2; ++ell) {
    const double q = params.q(ell);
    if (q != 0.0) {
      const Eigen::VectorXd s = pair.sublattice(ell) * params.axis(ell);
      e.anisotropy += 0.5 * q * q * (fem.volume - s.dot(fem.mass.matrix * s));
    }
    e.dmi += dmi_energy(pair.sublattice(ell), params.dmi(ell), mesh);
  }

  if (!params.h_ext.isZero(0.0)) {
    const Vec3 moment =
        (params.eta_s1 * pair.m1 + params.eta_s2 * pair.m2).transpose() * fem.lumped.weights;
    e.zeeman = -params.h_ext.dot(moment);
  }

  e.total = e.intra_exchange + e.inter_inhomogeneous + e.inter_homogeneous + e.anisotropy +
            e.dmi + e.zeeman;
  return e;
}

Field effective_field_rhs(int ell, const SublatticePair& pair, const MaterialParams& params,
                          const Mesh& mesh, const FemSystem& fem) {
  require_pair(pair, fem);
  const Field& m = pair.sublattice(ell);
  const Field& other = pair.sublattice(3 - ell);

  Field rhs = -params.a_diag(ell) * (fem.stiffness.matrix * m);
  if (params.a12 != 0.0) rhs -= params.a12 * (fem.stiffness.matrix * other);
  if (params.a0 != 0.0) rhs += params.a0 * (fem.mass.matrix * other);

  const double q = params.q(ell);
  if (q != 0.0) {
    const Eigen::VectorXd s = fem.mass.matrix * (m * params.axis(ell));
    rhs += q * q * s * params.axis(ell).transpose();
  }

  add_dmi_rhs(rhs, m, params.dmi(ell), mesh);

  if (!params.h_ext.isZero(0.0))
    rhs += params.eta_s(ell) * fem.lumped.weights * params.h_ext.transpose();

  return rhs;
}

StationarityResidual stationarity_residual(const SublatticePair& pair,
                                           const MaterialParams& params, const Mesh& mesh,
                                           const FemSystem& fem) {
  StationarityResidual res;
  for (int ell = 1; ell <= 2; ++ell) {
    const Field rhs = effective_field_rhs(ell, pair, params, mesh, fem);
    const TangentFrame frame = build_frames(pair.sublattice(ell));
    const Eigen::VectorXd reduced =
        SparseMatrix(frame_prolongation(frame).transpose()) * flatten(rhs);
    const double full_norm = rhs.norm();
    res.absolute[ell - 1] = reduced.norm();
    res.normalized[ell - 1] = reduced.norm() / std::max(1.0, full_norm);
  }
  return res;
}

LowerOrderSecond lower_order_second(const SublatticePair& updates, const MaterialParams& params,
                                    const Mesh& mesh, const FemSystem& fem) {
  LowerOrderSecond second;
  for (int ell = 1; ell <= 2; ++ell) {
    const double q = params.q(ell);
    if (q != 0.0) {
      const Eigen::VectorXd s = updates.sublattice(ell) * params.axis(ell);
      second.anisotropy -= 0.5 * q * q * s.dot(fem.mass.matrix * s);
    }
    second.dmi += dmi_energy(updates.sublattice(ell), params.dmi(ell), mesh);
  }
  return second;
}

}  // namespace afmfem
