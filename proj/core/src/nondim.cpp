#include "afmfem/nondim.hpp"

#include <cmath>

namespace afmfem {

void PhysicalParams::validate() const {
  if (!(Ms1 > 0.0) || !(Ms2 > 0.0)) throw ConfigError("saturation magnetizations must be positive");
  if (!(lattice_a > 0.0)) throw ConfigError("lattice constant must be positive");
  if (L < 0.0 || Ms_ref < 0.0) throw ConfigError("L and Ms_ref must be nonnegative");
  if (!(gamma0 > 0.0) || !(gamma1 > 0.0) || !(gamma2 > 0.0))
    throw ConfigError("gyromagnetic ratios must be positive");
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw ConfigError("damping parameters must be positive");
  if (K1 < 0.0 || K2 < 0.0) throw ConfigError("anisotropy constants must be nonnegative");
}

PhysicalParams PhysicalParams::afm_disk_material() {
  PhysicalParams p;
  p.Ms1 = p.Ms2 = 376e3;
  p.A11 = p.A22 = 6.59e-12;
  p.A12 = 0.0;
  p.A0 = -6.59e-12;
  p.lattice_a = 1e-9;
  p.K1 = p.K2 = 0.15e6;
  p.axis1 = p.axis2 = Vec3(0.0, 0.0, 1.0);
  const double D = 3e-3;
  Mat3 spiral = Mat3::Zero();
  spiral(0, 1) = -D;  // -e1 (x) e2
  spiral(1, 0) = D;   // +e2 (x) e1
  p.D1 = p.D2 = spiral;
  p.gamma1 = p.gamma2 = p.gamma0 = 2.21e5;
  p.alpha1 = p.alpha2 = 5e-3;
  return p;
}

NondimResult nondimensionalize(const PhysicalParams& params) {
  params.validate();
  NondimResult nd;
  const double Ms = params.Ms_ref > 0.0 ? params.Ms_ref : std::max(params.Ms1, params.Ms2);
  const double L = params.L > 0.0 ? params.L : params.lattice_a;
  const double unit = mu0 * Ms * Ms;  // J/m^3

  nd.Ms_ref = Ms;
  nd.length_scale = L;
  nd.time_scale = 1.0 / (params.gamma0 * Ms);
  nd.energy_scale = unit * L * L * L;

  MaterialParams& m = nd.material;
  m.a11 = 2.0 * params.A11 / (unit * L * L);
  m.a22 = 2.0 * params.A22 / (unit * L * L);
  m.a12 = params.A12 / (unit * L * L);
  m.a0 = 4.0 * params.A0 / (unit * params.lattice_a * params.lattice_a);
  m.q1 = std::sqrt(2.0 * params.K1 / unit);
  m.q2 = std::sqrt(2.0 * params.K2 / unit);
  m.axis1 = params.axis1;
  m.axis2 = params.axis2;
  m.dmi1 = params.D1 / (unit * L);
  m.dmi2 = params.D2 / (unit * L);
  m.h_ext = params.Hext / Ms;
  m.eta_s1 = params.Ms1 / Ms;
  m.eta_s2 = params.Ms2 / Ms;
  m.validate();

  nd.llg.alpha1 = params.alpha1;
  nd.llg.alpha2 = params.alpha2;
  nd.llg.eta1 = (params.gamma1 / params.gamma0) / m.eta_s1;
  nd.llg.eta2 = (params.gamma2 / params.gamma0) / m.eta_s2;
  return nd;
}

PhysicalParams redimensionalize(const NondimResult& nd, double lattice_a, double gamma0) {
  PhysicalParams p;
  const double Ms = nd.Ms_ref;
  const double L = nd.length_scale;
  const double unit = mu0 * Ms * Ms;
  const MaterialParams& m = nd.material;

  p.Ms1 = m.eta_s1 * Ms;
  p.Ms2 = m.eta_s2 * Ms;
  p.A11 = m.a11 * unit * L * L / 2.0;
  p.A22 = m.a22 * unit * L * L / 2.0;
  p.A12 = m.a12 * unit * L * L;
  p.A0 = m.a0 * unit * lattice_a * lattice_a / 4.0;
  p.lattice_a = lattice_a;
  p.K1 = m.q1 * m.q1 * unit / 2.0;
  p.K2 = m.q2 * m.q2 * unit / 2.0;
  p.axis1 = m.axis1;
  p.axis2 = m.axis2;
  p.D1 = m.dmi1 * unit * L;
  p.D2 = m.dmi2 * unit * L;
  p.Hext = m.h_ext * Ms;
  p.gamma0 = gamma0;
  p.gamma1 = nd.llg.eta1 * m.eta_s1 * gamma0;
  p.gamma2 = nd.llg.eta2 * m.eta_s2 * gamma0;
  p.alpha1 = nd.llg.alpha1;
  p.alpha2 = nd.llg.alpha2;
  p.L = L;
  p.Ms_ref = Ms;
  return p;
}

double exchange_length(double A, double Ms) {
  if (!(A > 0.0) || !(Ms > 0.0)) throw ConfigError("exchange_length: inputs must be positive");
  return std::sqrt(2.0 * A / (mu0 * Ms * Ms));
}

}  // namespace afmfem
