#include "afmfem/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "afmfem/version.hpp"

namespace afmfem {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

void write_vectors(std::ostream& out, const std::string& name, const Field& field) {
  out << "VECTORS " << name << " double\n";
  for (Eigen::Index z = 0; z < field.rows(); ++z)
    out << field(z, 0) << ' ' << field(z, 1) << ' ' << field(z, 2) << '\n';
}

}  // namespace

void write_vtk(const Mesh& mesh, const SublatticePair& pair, double eta_s1, double eta_s2,
               std::ostream& out) {
  if (pair.m1.rows() != mesh.n_vertices() || pair.m2.rows() != mesh.n_vertices())
    throw ConfigError("write_vtk: fields do not match the mesh");
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n";
  out << "afmfem sublattice magnetization\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << "CELLS " << mesh.n_elements() << ' ' << mesh.n_elements() * 5 << '\n';
  for (const auto& el : mesh.elements)
    out << "4 " << el[0] << ' ' << el[1] << ' ' << el[2] << ' ' << el[3] << '\n';
  out << "CELL_TYPES " << mesh.n_elements() << '\n';
  for (int e = 0; e < mesh.n_elements(); ++e) out << "10\n";
  out << "POINT_DATA " << mesh.n_vertices() << '\n';
  write_vectors(out, "m1", pair.m1);
  write_vectors(out, "m2", pair.m2);
  const Field total = eta_s1 * pair.m1 + eta_s2 * pair.m2;
  write_vectors(out, "m_total", total);
}

void write_vtk(const Mesh& mesh, const SublatticePair& pair, double eta_s1, double eta_s2,
               const std::string& path) {
  auto out = open_output(path);
  write_vtk(mesh, pair, eta_s1, eta_s2, out);
  if (!out) throw ConfigError("I/O failure while writing '" + path + "'");
}

VtkData read_vtk(std::istream& in) {
  VtkData data;
  std::string token;
  long n_points = -1, n_cells = -1;
  while (in >> token) {
    if (token == "POINTS") {
      std::string type;
      in >> n_points >> type;
      data.points.resize(static_cast<std::size_t>(n_points));
      for (long i = 0; i < n_points; ++i)
        if (!(in >> data.points[i][0] >> data.points[i][1] >> data.points[i][2]))
          throw ConfigError("VTK parse error in POINTS");
    } else if (token == "CELLS") {
      long total;
      in >> n_cells >> total;
      data.cells.resize(static_cast<std::size_t>(n_cells));
      for (long i = 0; i < n_cells; ++i) {
        int n;
        in >> n;
        if (n != 4) throw ConfigError("VTK parse error: expected 4-vertex cells");
        auto& cell = data.cells[static_cast<std::size_t>(i)];
        if (!(in >> cell[0] >> cell[1] >> cell[2] >> cell[3]))
          throw ConfigError("VTK parse error in CELLS");
      }
    } else if (token == "CELL_TYPES") {
      long n;
      in >> n;
      for (long i = 0; i < n; ++i) {
        int type;
        in >> type;
        if (type != 10) throw ConfigError("VTK parse error: expected cell type 10");
      }
    } else if (token == "VECTORS") {
      if (n_points < 0) throw ConfigError("VTK parse error: VECTORS before POINTS");
      std::string name, type;
      in >> name >> type;
      Field field(n_points, 3);
      for (long i = 0; i < n_points; ++i)
        if (!(in >> field(i, 0) >> field(i, 1) >> field(i, 2)))
          throw ConfigError("VTK parse error in VECTORS " + name);
      data.vectors[name] = std::move(field);
    }
  }
  if (n_points < 0 || n_cells < 0) throw ConfigError("VTK parse error: incomplete file");
  return data;
}

VtkData read_vtk_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_vtk(in);
}

void write_trace(const std::vector<StepDiagnostics>& trace, std::ostream& out) {
  out << "step,time,E_total,E_intra,E_inter_inhom,E_inter_hom,E_ani,E_dmi,E_zeeman,"
         "stop_quantity,err_L1_m1,err_L1_m2,err_Linf_m1,err_Linf_m2,"
         "energy_law_residual,solver_iters,avg_mx_m1,avg_mx_m2,avg_mx_total\n";
  out << std::setprecision(16);
  for (const StepDiagnostics& d : trace) {
    const EnergyBreakdown& e = d.energy_before;
    out << d.step << ',' << d.time << ',' << e.total << ',' << e.intra_exchange << ','
        << e.inter_inhomogeneous << ',' << e.inter_homogeneous << ',' << e.anisotropy << ','
        << e.dmi << ',' << e.zeeman << ',' << d.stop_quantity << ',' << d.constraint.err_l1[0]
        << ',' << d.constraint.err_l1[1] << ',' << d.constraint.err_linf[0] << ','
        << d.constraint.err_linf[1] << ',' << d.energy_law_residual << ','
        << d.solver_iterations << ',' << d.avg_mx[0] << ',' << d.avg_mx[1] << ','
        << d.avg_mx[2] << '\n';
  }
}

void write_trace(const std::vector<StepDiagnostics>& trace, const std::string& path) {
  auto out = open_output(path);
  write_trace(trace, out);
  if (!out) throw ConfigError("I/O failure while writing '" + path + "'");
}

namespace {

void echo_material(const MaterialParams& m, std::ostream& out) {
  out << std::setprecision(16);
  out << "a11 = " << m.a11 << "\na22 = " << m.a22 << "\na12 = " << m.a12 << "\na0 = " << m.a0
      << "\nq1 = " << m.q1 << "\nq2 = " << m.q2 << "\n";
  out << "axis1 = " << m.axis1.transpose() << "\naxis2 = " << m.axis2.transpose() << "\n";
  out << "h_ext = " << m.h_ext.transpose() << "\n";
  out << "eta_s1 = " << m.eta_s1 << "\neta_s2 = " << m.eta_s2 << "\n";
  if (!m.dmi1.isZero(0.0) || !m.dmi2.isZero(0.0)) {
    const Eigen::IOFormat flat(Eigen::StreamPrecision, Eigen::DontAlignCols, " ", " ");
    out << "dmi1 = " << m.dmi1.format(flat) << "\ndmi2 = " << m.dmi2.format(flat) << "\n";
  }
}

}  // namespace

void write_manifest(const RunConfig& config, const RunConfig::ResolvedMaterial& resolved,
                    std::ostream& out) {
  out << "afmfem " << version_string << "\n\n";

  out << "[mesh]\n";
  switch (config.mesh.kind) {
    case MeshSpec::Kind::Box:
      out << "kind = box\nnx = " << config.mesh.nx << "\nny = " << config.mesh.ny
          << "\nnz = " << config.mesh.nz << "\nlo = " << config.mesh.lo.transpose()
          << "\nhi = " << config.mesh.hi.transpose() << "\n";
      break;
    case MeshSpec::Kind::Disk:
      out << "kind = disk\nradius = " << config.mesh.radius
          << "\nthickness = " << config.mesh.thickness << "\nn_radial = " << config.mesh.n_radial
          << "\nn_layers = " << config.mesh.n_layers << "\n";
      break;
    case MeshSpec::Kind::Import: out << "kind = import\npath = " << config.mesh.path << "\n"; break;
  }

  out << "\n[initial]\n";
  switch (config.initial.kind) {
    case InitialSpec::Kind::Constant:
      out << "kind = constant\nv1 = " << config.initial.v1.transpose()
          << "\nv2 = " << config.initial.v2.transpose() << "\n";
      break;
    case InitialSpec::Kind::Random:
      out << "kind = random\nseed = " << config.initial.seed << "\n";
      break;
    case InitialSpec::Kind::Skyrmion:
      out << "kind = skyrmion\nseed = " << config.initial.seed
          << "\namplitude = " << config.initial.amplitude << "\nr0 = " << config.initial.r0
          << "\nsteepness = " << config.initial.steepness << "\nsign = " << config.initial.sign
          << "\n";
      break;
  }

  out << "\n[algorithm]\n";
  const char* preset = "decoupled";
  switch (config.algorithm.preset) {
    case AlgorithmSpec::Preset::Coupled: preset = "coupled"; break;
    case AlgorithmSpec::Preset::Decoupled: preset = "decoupled"; break;
    case AlgorithmSpec::Preset::General: preset = "general"; break;
    case AlgorithmSpec::Preset::Llg: preset = "llg"; break;
  }
  const FlowConfig& flow = config.algorithm.flow;
  out << "preset = " << preset << "\ntheta = " << flow.theta.theta1 << ' ' << flow.theta.theta2
      << ' ' << flow.theta.theta3 << "\nmetric = "
      << (flow.metric == Metric::L2 ? "l2" : flow.metric == Metric::LumpedL2 ? "lumped" : "h1")
      << "\ntau = " << flow.tau << "\neps = " << flow.eps << "\nmax_steps = " << flow.max_steps
      << "\nsolver_tol = " << flow.solver.tol << "\n";
  if (config.algorithm.preset == AlgorithmSpec::Preset::Llg) {
    out << "eta = " << resolved.llg.eta1 << ' ' << resolved.llg.eta2
        << "\nalpha = " << resolved.llg.alpha1 << ' ' << resolved.llg.alpha2
        << "\nT = " << config.algorithm.T << "\n";
    if (!config.algorithm.schedule.empty()) {
      out << "pulse_direction = " << config.algorithm.schedule.direction.transpose()
          << "\npulse_breakpoints =";
      for (const auto& [t, amplitude] : config.algorithm.schedule.breakpoints)
        out << ' ' << t << ' ' << amplitude;
      out << "\n";
    }
  }

  out << "\n[derived dimensionless parameters]\n";
  echo_material(resolved.material, out);
  if (resolved.nondim) {
    out << "time_scale_s = " << resolved.nondim->time_scale << "\n";
    out << "length_scale_m = " << resolved.nondim->length_scale << "\n";
    out << "energy_scale_J = " << resolved.nondim->energy_scale << "\n";
    out << "Ms_ref = " << resolved.nondim->Ms_ref << "\n";
  }
}

void write_manifest(const RunConfig& config, const RunConfig::ResolvedMaterial& resolved,
                    const std::string& path) {
  auto out = open_output(path);
  write_manifest(config, resolved, out);
}

}  // namespace afmfem
