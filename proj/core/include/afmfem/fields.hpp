#pragma once

#include <cstdint>

#include "afmfem/fem.hpp"

namespace afmfem {

/// Deterministic uniform generator used everywhere randomness is needed.
/// mt19937_64 is fully specified by the standard; the [0,1) mapping below
/// avoids std::uniform_real_distribution, whose output is
/// implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

/// The pair of sublattice magnetizations (m1, m2).
struct SublatticePair {
  Field m1;
  Field m2;

  const Field& sublattice(int ell) const { return ell == 1 ? m1 : m2; }
  Field& sublattice(int ell) { return ell == 1 ? m1 : m2; }
};

/// Unit-length constraint violation per sublattice.
/// err_l1[l]   = || I_h[|m_l|^2] - 1 ||_{L1(Omega)}
/// err_linf[l] = max_z |m_l(z)| - 1
struct ConstraintReport {
  double err_l1[2] = {0.0, 0.0};
  double err_linf[2] = {0.0, 0.0};

  double max_l1() const { return err_l1[0] > err_l1[1] ? err_l1[0] : err_l1[1]; }
  double max_linf() const { return err_linf[0] > err_linf[1] ? err_linf[0] : err_linf[1]; }
};

/// When every nodal length is >= 1 the interpolant I_h[|m|^2]-1 is
/// nonnegative and the L1 norm equals the lumped sum; otherwise the absolute
/// value of the elementwise-affine function is integrated exactly.
ConstraintReport constraint_report(const SublatticePair& pair, const Mesh& mesh,
                                   const FemSystem& fem);

/// Exact integral of |g| over the tetrahedron with vertices x and affine g
/// given by its vertex values. Exposed for testing against a quadrature
/// oracle.
double integrate_abs_affine(const Vec3 x[4], const double g[4]);

struct ProjectionResult {
  Field field;
  int degenerate_nodes = 0;  // nodes with |m(z)| < 1e-12, replaced by (0,0,1)
};

/// Normalizes every nodal vector; near-zero vectors become (0,0,1) and are
/// counted.
ProjectionResult nodal_projection(const Field& field);
SublatticePair nodal_projection(const SublatticePair& pair);

SublatticePair make_constant_pair(const Vec3& v1, const Vec3& v2, int n_vertices);
SublatticePair make_random_pair(std::uint64_t seed, int n_vertices);

/// Skyrmion-like initial state: m_{1,2} = (0,0, +-f) with
/// f(x,y) = 1/(1+exp(steepness*(sqrt(x^2+y^2)-r0))) - 1/2, perturbed
/// componentwise by uniform noise in [-amplitude, amplitude] and then
/// projected to unit length at the nodes. sign=+1 puts the positive core on
/// sublattice 1.
SublatticePair make_skyrmion_pair(const Mesh& mesh, int sign, double r0, double steepness,
                                  std::uint64_t seed, double amplitude);

}  // namespace afmfem
