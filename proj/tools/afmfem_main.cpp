#include <filesystem>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "afmfem/checks.hpp"
#include "afmfem/io.hpp"
#include "afmfem/version.hpp"

namespace fs = std::filesystem;
using namespace afmfem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 1;
constexpr int exit_numerical_error = 2;
constexpr int exit_verify_failure = 3;

struct CommonOptions {
  std::string config_path;
  std::string experiment;
  std::string out_dir;
  std::string preset;
  std::string metric;
  double tau = 0.0;
  double eps = 0.0;
  long max_steps = 0;
};

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("--config", options.config_path, "run configuration file");
  cmd->add_option("--experiment", options.experiment,
                  "built-in preset: toy-cube, skyrmion-relax, skyrmion-pulse");
  cmd->add_option("--out", options.out_dir, "output directory (overrides the config)");
  cmd->add_option("--preset", options.preset,
                  "algorithm override: coupled, decoupled, or llg");
  cmd->add_option("--metric", options.metric, "metric override: l2, lumped, or h1");
  cmd->add_option("--tau", options.tau, "time-step override");
  cmd->add_option("--eps", options.eps, "stopping tolerance override");
  cmd->add_option("--max-steps", options.max_steps, "iteration cap override");
}

RunConfig resolve_config(const CommonOptions& options) {
  if (options.config_path.empty() == options.experiment.empty())
    throw ConfigError("provide exactly one of --config and --experiment");
  RunConfig config = options.config_path.empty() ? experiment_preset(options.experiment)
                                                 : load_run_config(options.config_path);
  if (!options.out_dir.empty()) config.output.dir = options.out_dir;
  if (!options.preset.empty()) {
    if (options.preset == "coupled") {
      config.algorithm.preset = AlgorithmSpec::Preset::Coupled;
      config.algorithm.flow.theta = ThetaScheme::coupled();
    } else if (options.preset == "decoupled") {
      config.algorithm.preset = AlgorithmSpec::Preset::Decoupled;
      config.algorithm.flow.theta = ThetaScheme::decoupled();
    } else if (options.preset == "llg") {
      config.algorithm.preset = AlgorithmSpec::Preset::Llg;
    } else {
      throw ConfigError("unknown preset override '" + options.preset + "'");
    }
  }
  if (!options.metric.empty()) {
    if (options.metric == "l2")
      config.algorithm.flow.metric = Metric::L2;
    else if (options.metric == "lumped" || options.metric == "lumped_l2")
      config.algorithm.flow.metric = Metric::LumpedL2;
    else if (options.metric == "h1")
      config.algorithm.flow.metric = Metric::H1;
    else
      throw ConfigError("unknown metric override '" + options.metric + "'");
  }
  if (options.tau > 0.0) config.algorithm.flow.tau = options.tau;
  if (options.eps > 0.0) config.algorithm.flow.eps = options.eps;
  if (options.max_steps > 0) config.algorithm.flow.max_steps = options.max_steps;
  return config;
}

void print_advisory(const AdvisoryReport& report) {
  for (const AdvisoryCheck& check : report.checks) {
    std::cout << "  ";
    switch (check.status) {
      case AdvisoryStatus::Pass:
        std::cout << "[pass] " << check.name << " (" << check.value;
        if (check.bound != 0.0) std::cout << " vs " << check.bound;
        std::cout << ")";
        break;
      case AdvisoryStatus::Fail:
        std::cout << "[FAIL] " << check.name << " (" << check.value << " vs " << check.bound
                  << "; sufficient condition violated, continuing)";
        break;
      case AdvisoryStatus::NotComputable:
        std::cout << "[ -- ] " << check.name << ": " << check.note;
        break;
    }
    std::cout << '\n';
  }
}

void print_summary(const SublatticePair& final_pair, const MaterialParams& material,
                   const Mesh& mesh, const FemSystem& fem) {
  const EnergyBreakdown raw = energy(final_pair, material, mesh, fem);
  const SublatticePair projected = nodal_projection(final_pair);
  const EnergyBreakdown proj = energy(projected, material, mesh, fem);
  const ConstraintReport constraint = constraint_report(final_pair, mesh, fem);
  std::cout << std::setprecision(10);
  std::cout << "  energy            = " << raw.total << '\n';
  std::cout << "  projected energy  = " << proj.total << '\n';
  std::cout << "  err_L1            = " << constraint.max_l1() << '\n';
  std::cout << "  err_Linf          = " << constraint.max_linf() << '\n';
}

void write_outputs(const RunConfig& config, const RunConfig::ResolvedMaterial& resolved,
                   const Mesh& mesh, const std::vector<StepDiagnostics>& trace,
                   const SublatticePair& final_pair) {
  fs::create_directories(config.output.dir);
  const fs::path dir(config.output.dir);
  write_manifest(config, resolved, (dir / "manifest.txt").string());
  if (config.output.write_trace) write_trace(trace, (dir / "trace.csv").string());
  if (config.output.write_vtk)
    write_vtk(mesh, final_pair, resolved.material.eta_s1, resolved.material.eta_s2,
              (dir / "final.vtk").string());
  std::cout << "  outputs in " << dir.string() << '\n';
}

int run_minimize(const CommonOptions& options) {
  const RunConfig config = resolve_config(options);
  const Mesh mesh = config.mesh.build();
  const FemSystem fem = assemble(mesh);
  const RunConfig::ResolvedMaterial resolved = config.resolve_material();
  const SublatticePair initial = config.initial.build(mesh);
  const MeshStats stats = mesh_stats(mesh);

  std::cout << "mesh: " << stats.n_vertices << " vertices, " << stats.n_elements
            << " elements, h = " << stats.h_max << ", |Omega| = " << stats.total_volume << '\n';

  if (config.algorithm.preset == AlgorithmSpec::Preset::Llg) {
    std::cout << "step-size advisory:\n";
    print_advisory(llg_step_size_advisory(resolved.material, resolved.llg,
                                          config.algorithm.flow.tau));
    const LLGMinimizeResult result = llg_minimize(
        initial, resolved.material, resolved.llg, config.algorithm.flow.tau,
        config.algorithm.flow.eps, config.algorithm.flow.max_steps,
        config.algorithm.flow.solver, mesh, fem);
    std::cout << (result.reason == Termination::Converged ? "converged" : "max_steps reached")
              << " after " << result.iterations << " iterations\n";
    print_summary(result.final, resolved.material, mesh, fem);
    write_outputs(config, resolved, mesh, result.trace, result.final);
    return result.reason == Termination::Converged ? exit_ok : exit_numerical_error;
  }

  if (!config.algorithm.flow.theta.supported())
    std::cout << "warning: theta1 < 1/2 requires severe step-size restrictions; "
                 "this configuration is unsupported\n";
  std::cout << "step-size advisory:\n";
  print_advisory(step_size_advisory(resolved.material, config.algorithm.flow, stats));

  const MinimizeResult result =
      minimize(initial, resolved.material, config.algorithm.flow, mesh, fem);
  std::cout << (result.reason == Termination::Converged ? "converged" : "max_steps reached")
            << " after " << result.iterations << " iterations\n";
  print_summary(result.final, resolved.material, mesh, fem);
  write_outputs(config, resolved, mesh, result.trace, result.final);
  return result.reason == Termination::Converged ? exit_ok : exit_numerical_error;
}

int run_evolve(const CommonOptions& options) {
  const RunConfig config = resolve_config(options);
  const Mesh mesh = config.mesh.build();
  const FemSystem fem = assemble(mesh);
  const RunConfig::ResolvedMaterial resolved = config.resolve_material();
  const SublatticePair initial = config.initial.build(mesh);

  std::cout << "step-size advisory:\n";
  print_advisory(
      llg_step_size_advisory(resolved.material, resolved.llg, config.algorithm.flow.tau));

  const Trajectory trajectory =
      evolve(initial, resolved.material, resolved.llg, config.algorithm.schedule,
             config.algorithm.T, config.algorithm.flow.tau, config.output.snapshot_every,
             config.algorithm.flow.solver, mesh, fem);

  std::cout << trajectory.n_steps << " steps of tau = " << config.algorithm.flow.tau << '\n';
  if (trajectory.aborted) std::cout << "ABORTED: energy became non-finite\n";

  const WeakEnergyReport weak = weak_energy_check(trajectory, resolved.material, resolved.llg);
  std::cout << "weak energy inequality: value = " << weak.value << ", budget = " << weak.budget
            << (weak.pass ? " (pass)" : " (FAIL)") << '\n';
  print_summary(trajectory.snapshots.back(), resolved.material, mesh, fem);

  fs::create_directories(config.output.dir);
  const fs::path dir(config.output.dir);
  write_manifest(config, resolved, (dir / "manifest.txt").string());
  if (config.output.write_trace) write_trace(trajectory.trace, (dir / "trace.csv").string());
  if (config.output.write_vtk)
    for (std::size_t i = 0; i < trajectory.snapshots.size(); ++i) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(6) << std::setfill('0') << trajectory.snapshot_steps[i]
           << ".vtk";
      write_vtk(mesh, trajectory.snapshots[i], resolved.material.eta_s1,
                resolved.material.eta_s2, (dir / name.str()).string());
    }
  std::cout << "  outputs in " << dir.string() << '\n';
  return trajectory.aborted ? exit_numerical_error : exit_ok;
}

MeshFormat parse_format(const std::string& name) {
  if (name == "gmsh_msh2_ascii" || name == "msh") return MeshFormat::GmshMsh2Ascii;
  if (name == "tetmesh") return MeshFormat::TetMesh;
  throw ConfigError("unknown mesh format '" + name + "' (gmsh_msh2_ascii or tetmesh)");
}

void print_stats(const Mesh& mesh) {
  const MeshStats stats = mesh_stats(mesh);
  std::cout << std::setprecision(10);
  std::cout << "vertices         = " << stats.n_vertices << '\n';
  std::cout << "elements         = " << stats.n_elements << '\n';
  std::cout << "h_max            = " << stats.h_max << '\n';
  std::cout << "h_min            = " << stats.h_min << '\n';
  std::cout << "shape_regularity = " << stats.shape_regularity << '\n';
  std::cout << "total_volume     = " << stats.total_volume << '\n';
  std::cout << "boundary_faces   = " << mesh.boundary_faces.size() << '\n';
}

int run_nondim(const std::string& config_path, const std::string& preset) {
  PhysicalParams physical;
  if (!config_path.empty()) {
    const RunConfig config = load_run_config(config_path);
    if (!config.material_si)
      throw ConfigError("nondim requires a [material_si] section in the config");
    physical = *config.material_si;
  } else if (preset == "afm-disk") {
    physical = PhysicalParams::afm_disk_material();
  } else {
    throw ConfigError("provide --config or --preset afm-disk");
  }

  const NondimResult nd = nondimensionalize(physical);
  std::cout << std::setprecision(10);
  std::cout << "derived dimensionless parameters:\n";
  std::cout << "  a11 = " << nd.material.a11 << "\n  a22 = " << nd.material.a22
            << "\n  a12 = " << nd.material.a12 << "\n  a0  = " << nd.material.a0 << '\n';
  std::cout << "  q1 = " << nd.material.q1 << ", q2 = " << nd.material.q2 << '\n';
  if (!nd.material.dmi1.isZero(0.0)) {
    const Eigen::IOFormat flat(Eigen::StreamPrecision, Eigen::DontAlignCols, " ", "; ");
    std::cout << "  dmi1 = [" << nd.material.dmi1.format(flat) << "]\n";
    std::cout << "  dmi2 = [" << nd.material.dmi2.format(flat) << "]\n";
  }
  std::cout << "  h_ext = " << nd.material.h_ext.transpose() << '\n';
  std::cout << "  eta_s = " << nd.material.eta_s1 << ", " << nd.material.eta_s2 << '\n';
  std::cout << "  eta   = " << nd.llg.eta1 << ", " << nd.llg.eta2 << '\n';
  std::cout << "  alpha = " << nd.llg.alpha1 << ", " << nd.llg.alpha2 << '\n';
  std::cout << "scales:\n";
  std::cout << "  length_scale = " << nd.length_scale << " m\n";
  std::cout << "  time_scale   = " << nd.time_scale << " s\n";
  std::cout << "  energy_scale = " << nd.energy_scale << " J\n";
  std::cout << "exchange lengths:\n";
  std::cout << "  l_ex(A11, Ms1) = " << exchange_length(physical.A11, physical.Ms1) * 1e9
            << " nm\n";
  std::cout << "  l_ex(A22, Ms2) = " << exchange_length(physical.A22, physical.Ms2) * 1e9
            << " nm\n";
  return exit_ok;
}

int run_verify(const std::string& suite) {
  const std::vector<checks::CheckResult> results = checks::run_suite(suite);
  bool all_pass = true;
  for (const checks::CheckResult& result : results) {
    std::cout << (result.pass ? "PASS " : "FAIL ") << result.name << ": " << result.detail
              << '\n';
    all_pass = all_pass && result.pass;
  }
  std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES\n");
  return all_pass ? exit_ok : exit_verify_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-sublattice micromagnetics on P1 tetrahedral finite elements"};
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);

  CommonOptions minimize_options;
  CLI::App* minimize_cmd =
      app.add_subcommand("minimize", "relax to a low-energy stationary point");
  add_common(minimize_cmd, minimize_options);

  CommonOptions evolve_options;
  CLI::App* evolve_cmd = app.add_subcommand("evolve", "integrate the coupled LLG system");
  add_common(evolve_cmd, evolve_options);

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "generate, convert, or inspect meshes");
  mesh_cmd->require_subcommand(1);

  std::string gen_kind = "box", gen_out, gen_format = "tetmesh";
  int gen_nx = 8, gen_ny = 8, gen_nz = 8, gen_radial = 8, gen_layers = 1;
  std::vector<double> gen_lo{-0.5, -0.5, -0.5}, gen_hi{0.5, 0.5, 0.5};
  double gen_radius = 30.0, gen_thickness = 1.0;
  CLI::App* mesh_generate = mesh_cmd->add_subcommand("generate", "generate a box or disk mesh");
  mesh_generate->add_option("--kind", gen_kind, "box or disk");
  mesh_generate->add_option("--nx", gen_nx);
  mesh_generate->add_option("--ny", gen_ny);
  mesh_generate->add_option("--nz", gen_nz);
  mesh_generate->add_option("--lo", gen_lo)->expected(3);
  mesh_generate->add_option("--hi", gen_hi)->expected(3);
  mesh_generate->add_option("--radius", gen_radius);
  mesh_generate->add_option("--thickness", gen_thickness);
  mesh_generate->add_option("--n-radial", gen_radial);
  mesh_generate->add_option("--n-layers", gen_layers);
  mesh_generate->add_option("--out", gen_out, "output file")->required();
  mesh_generate->add_option("--format", gen_format, "tetmesh or gmsh_msh2_ascii");

  std::string convert_in, convert_out, convert_in_format = "gmsh_msh2_ascii",
                                       convert_out_format = "tetmesh";
  CLI::App* mesh_convert = mesh_cmd->add_subcommand("convert", "convert between mesh formats");
  mesh_convert->add_option("input", convert_in)->required();
  mesh_convert->add_option("output", convert_out)->required();
  mesh_convert->add_option("--in-format", convert_in_format);
  mesh_convert->add_option("--out-format", convert_out_format);

  std::string stats_file, stats_format = "tetmesh";
  CLI::App* mesh_stats_cmd = mesh_cmd->add_subcommand("stats", "print mesh statistics");
  mesh_stats_cmd->add_option("input", stats_file)->required();
  mesh_stats_cmd->add_option("--format", stats_format);

  std::string nondim_config, nondim_preset;
  CLI::App* nondim_cmd =
      app.add_subcommand("nondim", "print the derived dimensionless parameters");
  nondim_cmd->add_option("--config", nondim_config, "config with a [material_si] section");
  nondim_cmd->add_option("--preset", nondim_preset, "built-in material: afm-disk");

  std::string verify_suite = "all";
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the invariant verification suites");
  verify_cmd->add_option("--suite", verify_suite,
                         "energy-laws, norm-equivalence, constraint-recursion, gamma-recovery, "
                         "llg-equivalence, or all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (minimize_cmd->parsed()) return run_minimize(minimize_options);
    if (evolve_cmd->parsed()) return run_evolve(evolve_options);
    if (mesh_generate->parsed()) {
      Mesh mesh;
      if (gen_kind == "box")
        mesh = generate_box_mesh(gen_nx, gen_ny, gen_nz, Vec3(gen_lo[0], gen_lo[1], gen_lo[2]),
                                 Vec3(gen_hi[0], gen_hi[1], gen_hi[2]));
      else if (gen_kind == "disk")
        mesh = generate_disk_mesh(gen_radius, gen_thickness, gen_radial, gen_layers);
      else
        throw ConfigError("unknown mesh kind '" + gen_kind + "'");
      export_mesh(mesh, gen_out, parse_format(gen_format));
      print_stats(mesh);
      return exit_ok;
    }
    if (mesh_convert->parsed()) {
      const MeshImportResult result = import_mesh(convert_in, parse_format(convert_in_format));
      if (result.skipped_elements > 0)
        std::cout << "warning: skipped " << result.skipped_elements
                  << " non-tetrahedral element(s)\n";
      export_mesh(result.mesh, convert_out, parse_format(convert_out_format));
      return exit_ok;
    }
    if (mesh_stats_cmd->parsed()) {
      print_stats(import_mesh(stats_file, parse_format(stats_format)).mesh);
      return exit_ok;
    }
    if (nondim_cmd->parsed()) return run_nondim(nondim_config, nondim_preset);
    if (verify_cmd->parsed()) return run_verify(verify_suite);
  } catch (const ConfigError& error) {
    std::cerr << "config error: " << error.what() << '\n';
    return exit_config_error;
  } catch (const NumericalError& error) {
    std::cerr << "numerical failure: " << error.what() << '\n';
    return exit_numerical_error;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return exit_numerical_error;
  }
  return exit_config_error;
}
