#pragma once

#include "afmfem/fields.hpp"

namespace afmfem {

/// Dimensionless material coefficients.
///
/// The exchange constants must satisfy a11 + a22 > 0 and a11*a22 > a12^2
/// (checked by validate()); anisotropy axes must be unit vectors. The
/// lower-order contributions (uniaxial anisotropy, DMI, Zeeman) are treated
/// explicitly by all schemes and only enter their right-hand sides.
struct MaterialParams {
  double a11 = 1.0;
  double a22 = 1.0;
  double a12 = 0.0;
  double a0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  Vec3 axis1{0.0, 0.0, 1.0};
  Vec3 axis2{0.0, 0.0, 1.0};
  Mat3 dmi1 = Mat3::Zero();
  Mat3 dmi2 = Mat3::Zero();
  Vec3 h_ext{0.0, 0.0, 0.0};
  double eta_s1 = 1.0;
  double eta_s2 = 1.0;

  double a_diag(int ell) const { return ell == 1 ? a11 : a22; }
  double q(int ell) const { return ell == 1 ? q1 : q2; }
  const Vec3& axis(int ell) const { return ell == 1 ? axis1 : axis2; }
  const Mat3& dmi(int ell) const { return ell == 1 ? dmi1 : dmi2; }
  double eta_s(int ell) const { return ell == 1 ? eta_s1 : eta_s2; }

  bool has_lower_order() const;

  /// Throws ConfigError naming the violated inequality.
  void validate() const;
};

struct EnergyBreakdown {
  double intra_exchange = 0.0;       // 1/2 sum_l a_ll ||grad m_l||^2
  double inter_inhomogeneous = 0.0;  // a12 <grad m1, grad m2>
  double inter_homogeneous = 0.0;    // -a0 <m1, m2>
  double anisotropy = 0.0;
  double dmi = 0.0;
  double zeeman = 0.0;
  double total = 0.0;
};

/// Total energy and its named contributions. All integrands are polynomials
/// of degree <= 2 in the P1 fields and are integrated exactly, so the values
/// are quadrature-error-free.
EnergyBreakdown energy(const SublatticePair& pair, const MaterialParams& params,
                       const Mesh& mesh, const FemSystem& fem);

/// The linear functional  phi -> <h_eff,l , phi>  as a nodal dual vector:
/// the negative first variation of the energy with respect to sublattice
/// ell, including the explicitly treated lower-order contributions.
Field effective_field_rhs(int ell, const SublatticePair& pair, const MaterialParams& params,
                          const Mesh& mesh, const FemSystem& fem);

/// Norm of the tangent-frame reduction of effective_field_rhs; zero exactly
/// when the discrete Euler-Lagrange equations hold on the discrete tangent
/// space.
struct StationarityResidual {
  double absolute[2] = {0.0, 0.0};    // ||P' b_l||
  double normalized[2] = {0.0, 0.0};  // ||P' b_l|| / max(1, ||b_l||)

  double max_normalized() const {
    return normalized[0] > normalized[1] ? normalized[0] : normalized[1];
  }
};

StationarityResidual stationarity_residual(const SublatticePair& pair,
                                           const MaterialParams& params, const Mesh& mesh,
                                           const FemSystem& fem);

/// Second-order (tau^2-coefficient) contribution of the explicitly treated
/// lower-order terms to the per-step energy identities: expanding
/// E[m + tau v] the anisotropy adds -q^2/2 ||axis.v||^2 (dissipative) and
/// the DMI adds its own quadratic form evaluated at v (unsigned); the
/// Zeeman term is linear and contributes nothing.
struct LowerOrderSecond {
  double anisotropy = 0.0;
  double dmi = 0.0;
  double total() const { return anisotropy + dmi; }
};

LowerOrderSecond lower_order_second(const SublatticePair& updates, const MaterialParams& params,
                                    const Mesh& mesh, const FemSystem& fem);

}  // namespace afmfem
