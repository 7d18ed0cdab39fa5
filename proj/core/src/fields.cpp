#include "afmfem/fields.hpp"

#include <cmath>

#include "afmfem/error.hpp"

namespace afmfem {

namespace {

double tet_volume(const Vec3 x[4]) {
  return std::abs((x[1] - x[0]).cross(x[2] - x[0]).dot(x[3] - x[0])) / 6.0;
}

// Integral of -g over the region {g < 0} when exactly one vertex value is
// negative: the region is the sub-tetrahedron cut off at that vertex.
double negative_part_one(const Vec3 x[4], const double g[4], int neg) {
  const double vol = tet_volume(x);
  double scale = 1.0;
  for (int i = 0; i < 4; ++i) {
    if (i == neg) continue;
    scale *= g[neg] / (g[neg] - g[i]);
  }
  return -g[neg] * vol * scale / 4.0;
}

// Same for exactly two negative vertices: the region is a wedge bounded by
// the cut plane; all of its faces are planar, so a fixed 3-tet split is
// exact. Cut points carry g = 0.
double negative_part_two(const Vec3 x[4], const double g[4], int na, int nb) {
  int pos[2], np = 0;
  for (int i = 0; i < 4; ++i)
    if (i != na && i != nb) pos[np++] = i;
  const auto cut = [&](int neg, int p) -> Vec3 {
    const double s = g[neg] / (g[neg] - g[p]);
    return x[neg] + s * (x[p] - x[neg]);
  };
  const Vec3 a = x[na], b = x[nb];
  const Vec3 pac = cut(na, pos[0]), pad = cut(na, pos[1]);
  const Vec3 pbc = cut(nb, pos[0]), pbd = cut(nb, pos[1]);
  const auto piece = [](const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3,
                        double gsum) {
    const Vec3 q[4] = {p0, p1, p2, p3};
    return tet_volume(q) * (-gsum) / 4.0;
  };
  double integral = 0.0;
  integral += piece(a, pac, pad, pbd, g[na]);
  integral += piece(a, pac, pbd, pbc, g[na]);
  integral += piece(a, pbc, pbd, b, g[na] + g[nb]);
  return integral;
}

}  // namespace

double integrate_abs_affine(const Vec3 x[4], const double g[4]) {
  const double vol = tet_volume(x);
  const double mean = (g[0] + g[1] + g[2] + g[3]) / 4.0;

  int neg[4], nn = 0;
  for (int i = 0; i < 4; ++i)
    if (g[i] < 0.0) neg[nn++] = i;

  switch (nn) {
    case 0: return vol * mean;
    case 4: return -vol * mean;
    case 1: return vol * mean + 2.0 * negative_part_one(x, g, neg[0]);
    case 2: return vol * mean + 2.0 * negative_part_two(x, g, neg[0], neg[1]);
    case 3: {
      const double flipped[4] = {-g[0], -g[1], -g[2], -g[3]};
      return integrate_abs_affine(x, flipped);
    }
  }
  return 0.0;  // unreachable
}

ConstraintReport constraint_report(const SublatticePair& pair, const Mesh& mesh,
                                   const FemSystem& fem) {
  ConstraintReport report;
  for (int ell = 1; ell <= 2; ++ell) {
    const Field& m = pair.sublattice(ell);
    if (m.rows() != mesh.n_vertices())
      throw ConfigError("constraint_report: field does not match the mesh");

    const Eigen::VectorXd g = m.rowwise().squaredNorm().array() - 1.0;
    report.err_linf[ell - 1] = std::sqrt(m.rowwise().squaredNorm().maxCoeff()) - 1.0;

    if (g.minCoeff() >= 0.0) {
      report.err_l1[ell - 1] = fem.lumped.weights.dot(g);
    } else {
      double total = 0.0;
      for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& el = mesh.elements[static_cast<std::size_t>(e)];
        const Vec3 x[4] = {mesh.vertices[el[0]], mesh.vertices[el[1]], mesh.vertices[el[2]],
                           mesh.vertices[el[3]]};
        const double gv[4] = {g[el[0]], g[el[1]], g[el[2]], g[el[3]]};
        total += integrate_abs_affine(x, gv);
      }
      report.err_l1[ell - 1] = total;
    }
  }
  return report;
}

ProjectionResult nodal_projection(const Field& field) {
  ProjectionResult result;
  result.field = field;
  for (Eigen::Index z = 0; z < field.rows(); ++z) {
    const double norm = field.row(z).norm();
    if (norm < 1e-12) {
      result.field.row(z) << 0.0, 0.0, 1.0;
      ++result.degenerate_nodes;
    } else {
      result.field.row(z) /= norm;
    }
  }
  return result;
}

SublatticePair nodal_projection(const SublatticePair& pair) {
  return {nodal_projection(pair.m1).field, nodal_projection(pair.m2).field};
}

SublatticePair make_constant_pair(const Vec3& v1, const Vec3& v2, int n_vertices) {
  if (v1.norm() < 1e-12 || v2.norm() < 1e-12)
    throw ConfigError("make_constant_pair: constant vectors must be nonzero");
  SublatticePair pair;
  pair.m1 = Field(n_vertices, 3);
  pair.m2 = Field(n_vertices, 3);
  pair.m1.rowwise() = v1.normalized().transpose();
  pair.m2.rowwise() = v2.normalized().transpose();
  return pair;
}

SublatticePair make_random_pair(std::uint64_t seed, int n_vertices) {
  Rng rng(seed);
  SublatticePair pair;
  pair.m1 = Field(n_vertices, 3);
  pair.m2 = Field(n_vertices, 3);
  for (Field* m : {&pair.m1, &pair.m2})
    for (int z = 0; z < n_vertices; ++z)
      for (int c = 0; c < 3; ++c) (*m)(z, c) = rng.uniform(-1.0, 1.0);
  return nodal_projection(pair);
}

SublatticePair make_skyrmion_pair(const Mesh& mesh, int sign, double r0, double steepness,
                                  std::uint64_t seed, double amplitude) {
  const double polarity = sign >= 0 ? 1.0 : -1.0;
  const auto f_init = [&](const Vec3& x) {
    const double r = std::hypot(x[0], x[1]);
    return 1.0 / (1.0 + std::exp(steepness * (r - r0))) - 0.5;
  };
  SublatticePair pair;
  pair.m1 = nodal_interpolation(
      [&](const Vec3& x) { return Vec3(0.0, 0.0, polarity * f_init(x)); }, mesh);
  pair.m2 = nodal_interpolation(
      [&](const Vec3& x) { return Vec3(0.0, 0.0, -polarity * f_init(x)); }, mesh);

  Rng rng(seed);
  for (Field* m : {&pair.m1, &pair.m2})
    for (Eigen::Index z = 0; z < m->rows(); ++z)
      for (int c = 0; c < 3; ++c) (*m)(z, c) += rng.uniform(-amplitude, amplitude);

  return nodal_projection(pair);
}

}  // namespace afmfem
