#pragma once

#include "afmfem/energy.hpp"
#include "afmfem/llg.hpp"

namespace afmfem {

inline constexpr double mu0 = 4.0e-7 * 3.14159265358979323846;  // N/A^2, fixed

/// Material parameters in SI units. L (reference length) defaults to the
/// lattice constant and Ms_ref to max(Ms1, Ms2) when left at zero.
struct PhysicalParams {
  double Ms1 = 0.0, Ms2 = 0.0;          // A/m
  double A11 = 0.0, A22 = 0.0;          // J/m
  double A12 = 0.0, A0 = 0.0;           // J/m
  double lattice_a = 0.0;               // m
  double K1 = 0.0, K2 = 0.0;            // J/m^3
  Vec3 axis1{0.0, 0.0, 1.0}, axis2{0.0, 0.0, 1.0};
  Mat3 D1 = Mat3::Zero(), D2 = Mat3::Zero();  // J/m^2
  Vec3 Hext{0.0, 0.0, 0.0};             // A/m
  double gamma1 = 0.0, gamma2 = 0.0;    // m/(A s)
  double gamma0 = 0.0;                  // m/(A s)
  double alpha1 = 1.0, alpha2 = 1.0;    // dimensionless
  double L = 0.0;                       // m; 0 = use lattice_a
  double Ms_ref = 0.0;                  // A/m; 0 = use max(Ms1, Ms2)

  void validate() const;

  /// Antiferromagnetic nanodisk example material (1 nm lattice constant,
  /// out-of-plane easy axis, interfacial DMI). Used by the disk presets.
  static PhysicalParams afm_disk_material();
};

struct NondimResult {
  MaterialParams material;
  LLGParams llg;
  double time_scale = 0.0;    // seconds per dimensionless time unit, 1/(gamma0 Ms)
  double length_scale = 0.0;  // meters per dimensionless length unit (L)
  double energy_scale = 0.0;  // joules per dimensionless energy unit, mu0 Ms^2 L^3
  double Ms_ref = 0.0;        // resolved reference magnetization
};

/// Applies the rescaling x' = x/L, t' = gamma0 Ms t, E' = E/(mu0 Ms^2 L^3):
///   a_ll = 2 A_ll / (mu0 Ms^2 L^2),  a12 = A12 / (mu0 Ms^2 L^2),
///   a0 = 4 A0 / (mu0 Ms^2 a^2),      q_l = sqrt(2 K_l / (mu0 Ms^2)),
///   Dhat_l = D_l / (mu0 Ms^2 L),     h = H / Ms,
///   eta_s,l = Ms_l / Ms,             eta_l = (gamma_l/gamma0) / eta_s,l.
/// Throws ConfigError if the resulting exchange coefficients violate the
/// admissibility inequalities.
NondimResult nondimensionalize(const PhysicalParams& params);

/// Exact inverse of nondimensionalize (for round-trip checks); the scales
/// lost in the forward map are taken from the arguments.
PhysicalParams redimensionalize(const NondimResult& nd, double lattice_a, double gamma0);

/// Exchange length sqrt(2 A / (mu0 Ms^2)) in meters.
double exchange_length(double A, double Ms);

}  // namespace afmfem
