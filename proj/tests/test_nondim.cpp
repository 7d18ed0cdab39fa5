#include <doctest.h>

#include <cmath>

#include "afmfem/nondim.hpp"

using namespace afmfem;

TEST_CASE("dimensionless coefficients of the nanodisk material") {
  // independent plug-in oracle: mu0 Ms^2 = 4pi e-7 * (376e3)^2 = 1.7765e5 J/m^3
  const PhysicalParams p = PhysicalParams::afm_disk_material();
  const NondimResult nd = nondimensionalize(p);
  const double unit = mu0 * 376e3 * 376e3;

  CHECK(nd.material.a11 == doctest::Approx(2.0 * 6.59e-12 / (unit * 1e-18)).epsilon(1e-12));
  CHECK(nd.material.a11 == doctest::Approx(74.19).epsilon(2e-3));
  CHECK(nd.material.a22 == doctest::Approx(nd.material.a11));
  CHECK(nd.material.a0 == doctest::Approx(-148.38).epsilon(2e-3));
  CHECK(nd.material.q1 == doctest::Approx(std::sqrt(2.0 * 0.15e6 / unit)).epsilon(1e-12));
  CHECK(nd.material.q1 == doctest::Approx(1.2995).epsilon(1e-3));
  CHECK(nd.material.dmi1(0, 1) == doctest::Approx(-3e-3 / (unit * 1e-9)).epsilon(1e-12));
  CHECK(nd.material.eta_s1 == 1.0);
  CHECK(nd.llg.eta1 == 1.0);
  CHECK(nd.llg.alpha1 == 5e-3);
}

TEST_CASE("time-scale conversion") {
  const PhysicalParams p = PhysicalParams::afm_disk_material();
  const NondimResult nd = nondimensionalize(p);
  // 2 fs at gamma0 Ms = 2.21e5 * 376e3 per second
  const double tau_dimensionless = 2e-15 / nd.time_scale;
  CHECK(tau_dimensionless == doctest::Approx(1.662e-4).epsilon(1e-3));
}

TEST_CASE("exchange length") {
  CHECK(exchange_length(6.59e-12, 376e3) == doctest::Approx(8.61e-9).epsilon(0.01));
  const double base = exchange_length(1e-12, 1e5);
  CHECK(exchange_length(4e-12, 1e5) == doctest::Approx(2.0 * base).epsilon(1e-12));
  CHECK(exchange_length(1e-12, 2e5) == doctest::Approx(0.5 * base).epsilon(1e-12));
  CHECK_THROWS_AS(exchange_length(-1.0, 1e5), ConfigError);
}

TEST_CASE("round trip reproduces the physical inputs") {
  PhysicalParams p = PhysicalParams::afm_disk_material();
  p.Ms2 = 300e3;  // ferrimagnetic: distinct sublattices
  p.A22 = 4.1e-12;
  p.gamma2 = 1.9e5;
  p.Hext = Vec3(1e4, -2e3, 0.0);
  p.L = 2e-9;

  const NondimResult nd = nondimensionalize(p);
  const PhysicalParams back = redimensionalize(nd, p.lattice_a, p.gamma0);

  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
  };
  CHECK(close(back.Ms1, p.Ms1));
  CHECK(close(back.Ms2, p.Ms2));
  CHECK(close(back.A11, p.A11));
  CHECK(close(back.A22, p.A22));
  CHECK(close(back.A0, p.A0));
  CHECK(close(back.K1, p.K1));
  CHECK(close(back.gamma1, p.gamma1));
  CHECK(close(back.gamma2, p.gamma2));
  CHECK((back.D1 - p.D1).cwiseAbs().maxCoeff() <= 1e-12 * p.D1.cwiseAbs().maxCoeff());
  CHECK((back.Hext - p.Hext).norm() <= 1e-12 * p.Hext.norm());
}

TEST_CASE("energy scales consistently between unit systems") {
  // constant pair on the unit cube: all integrals are analytic
  PhysicalParams p = PhysicalParams::afm_disk_material();
  p.Hext = Vec3(2e4, 0.0, 0.0);
  const NondimResult nd = nondimensionalize(p);

  const Mesh mesh = generate_box_mesh(2, 2, 2, Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));
  const FemSystem fem = assemble(mesh);
  const Vec3 m1 = Vec3(0.0, 0.6, 0.8), m2 = Vec3(0.0, -0.6, -0.8);
  const SublatticePair pair = make_constant_pair(m1, m2, mesh.n_vertices());
  const double dimensionless = energy(pair, nd.material, mesh, fem).total;

  // physical energy of the same uniform state over the L^3 cube
  const double volume = nd.length_scale * nd.length_scale * nd.length_scale;
  const double physical =
      -(4.0 * p.A0 / (p.lattice_a * p.lattice_a)) * m1.dot(m2) * volume +
      p.K1 * (1.0 - std::pow(p.axis1.dot(m1), 2)) * volume +
      p.K2 * (1.0 - std::pow(p.axis2.dot(m2), 2)) * volume -
      mu0 * p.Hext.dot(p.Ms1 * m1 + p.Ms2 * m2) * volume;

  CHECK(dimensionless * nd.energy_scale == doctest::Approx(physical).epsilon(1e-12));
}

TEST_CASE("inadmissible exchange constants are rejected with the failing inequality") {
  PhysicalParams p = PhysicalParams::afm_disk_material();
  p.A12 = 1.4e-11;  // a12^2 >= a11 a22
  CHECK_THROWS_WITH_AS(nondimensionalize(p), doctest::Contains("a11*a22"), ConfigError);
}
