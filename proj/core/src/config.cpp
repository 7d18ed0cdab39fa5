#include "afmfem/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace afmfem {

Mesh MeshSpec::build() const {
  switch (kind) {
    case Kind::Box: return generate_box_mesh(nx, ny, nz, lo, hi);
    case Kind::Disk: return generate_disk_mesh(radius, thickness, n_radial, n_layers);
    case Kind::Import: return import_mesh(path, format).mesh;
  }
  throw ConfigError("unknown mesh kind");
}

SublatticePair InitialSpec::build(const Mesh& mesh) const {
  switch (kind) {
    case Kind::Constant: return make_constant_pair(v1, v2, mesh.n_vertices());
    case Kind::Random: return make_random_pair(seed, mesh.n_vertices());
    case Kind::Skyrmion: return make_skyrmion_pair(mesh, sign, r0, steepness, seed, amplitude);
  }
  throw ConfigError("unknown initial state kind");
}

RunConfig::ResolvedMaterial RunConfig::resolve_material() const {
  ResolvedMaterial resolved;
  if (material && material_si)
    throw ConfigError("config must contain exactly one of [material] and [material_si]");
  if (material) {
    resolved.material = *material;
    resolved.llg = algorithm.llg;
  } else if (material_si) {
    const NondimResult nd = nondimensionalize(*material_si);
    resolved.material = nd.material;
    resolved.llg = nd.llg;
    resolved.llg.precession = algorithm.llg.precession;
    resolved.nondim = nd;
  } else {
    throw ConfigError("config is missing a [material] or [material_si] section");
  }
  resolved.material.validate();
  return resolved;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

class KvStore {
public:
  void parse(std::istream& in) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto comment = line.find_first_of("#;");
      if (comment != std::string::npos) line.erase(comment);
      const auto trim = [](std::string s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string::npos) return std::string();
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        sections_[section];  // a section may be empty
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
      if (sections_[section].count(key))
        throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                          "' in [" + section + "]");
      sections_[section][key] = Entry{value, lineno, false};
    }
  }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  std::optional<std::string> take(const std::string& section, const std::string& key) {
    auto sec = sections_.find(section);
    if (sec == sections_.end()) return std::nullopt;
    auto entry = sec->second.find(key);
    if (entry == sec->second.end()) return std::nullopt;
    entry->second.consumed = true;
    return entry->second.value;
  }

  std::string require(const std::string& section, const std::string& key) {
    auto value = take(section, key);
    if (!value)
      throw ConfigError("config: missing required key '" + key + "' in [" + section + "]");
    return *value;
  }

  /// Every key must have been consumed; silent typos are the main
  /// reproducibility hazard, so leftovers are hard errors.
  void finish(const std::vector<std::string>& known_sections) const {
    for (const auto& [section, entries] : sections_) {
      bool known = false;
      for (const auto& name : known_sections) known = known || name == section;
      if (!known) throw ConfigError("config: unknown section [" + section + "]");
      for (const auto& [key, entry] : entries)
        if (!entry.consumed)
          throw ConfigError("config line " + std::to_string(entry.line) + ": unknown key '" + key +
                            "' in [" + section + "]");
    }
  }

private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

double to_double(const std::string& section, const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double parsed = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config: [" + section + "] " + key + " = '" + value + "' is not a number");
  }
}

template <typename T>
T parse_with(const std::string& section, const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out;
  if constexpr (std::is_same_v<T, Vec3>) {
    if (!(in >> out[0] >> out[1] >> out[2]))
      throw ConfigError("config: [" + section + "] " + key + " expects 3 numbers");
  } else if constexpr (std::is_same_v<T, Mat3>) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        if (!(in >> out(r, c)))
          throw ConfigError("config: [" + section + "] " + key + " expects 9 numbers (row-major)");
  } else {
    if (!(in >> out))
      throw ConfigError("config: [" + section + "] " + key + " = '" + value + "' is malformed");
  }
  std::string rest;
  if (in >> rest)
    throw ConfigError("config: [" + section + "] " + key + " has trailing content '" + rest + "'");
  return out;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: [" + section + "] " + key + " = '" + value + "' is not a boolean");
}

class Reader {
public:
  Reader(KvStore& store, std::string section) : store_(store), section_(std::move(section)) {}

  template <typename T, typename U>
  void get(const std::string& key, U& out) {
    if (auto value = store_.take(section_, key)) out = parse_with<T>(section_, key, *value);
  }
  void get(const std::string& key, double& out) {
    if (auto value = store_.take(section_, key)) out = to_double(section_, key, *value);
  }
  void get(const std::string& key, int& out) {
    if (auto value = store_.take(section_, key)) out = parse_with<int>(section_, key, *value);
  }
  void get(const std::string& key, long& out) {
    if (auto value = store_.take(section_, key)) out = parse_with<long>(section_, key, *value);
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (auto value = store_.take(section_, key))
      out = parse_with<std::uint64_t>(section_, key, *value);
  }
  void get(const std::string& key, bool& out) {
    if (auto value = store_.take(section_, key)) out = to_bool(section_, key, *value);
  }
  void get(const std::string& key, Vec3& out) {
    if (auto value = store_.take(section_, key)) out = parse_with<Vec3>(section_, key, *value);
  }
  void get(const std::string& key, Mat3& out) {
    if (auto value = store_.take(section_, key)) out = parse_with<Mat3>(section_, key, *value);
  }
  void get(const std::string& key, std::string& out) {
    if (auto value = store_.take(section_, key)) out = *value;
  }
  std::optional<std::string> take(const std::string& key) { return store_.take(section_, key); }

private:
  KvStore& store_;
  std::string section_;
};

MeshSpec read_mesh_spec(KvStore& store) {
  MeshSpec spec;
  if (!store.has_section("mesh")) throw ConfigError("config is missing the [mesh] section");
  Reader r(store, "mesh");
  std::string kind = "box";
  r.get("kind", kind);
  if (kind == "box") {
    spec.kind = MeshSpec::Kind::Box;
    r.get("nx", spec.nx);
    r.get("ny", spec.ny);
    r.get("nz", spec.nz);
    r.get("lo", spec.lo);
    r.get("hi", spec.hi);
  } else if (kind == "disk") {
    spec.kind = MeshSpec::Kind::Disk;
    r.get("radius", spec.radius);
    r.get("thickness", spec.thickness);
    r.get("n_radial", spec.n_radial);
    r.get("n_layers", spec.n_layers);
  } else if (kind == "import") {
    spec.kind = MeshSpec::Kind::Import;
    spec.path = store.require("mesh", "path");
    std::string format = "gmsh_msh2_ascii";
    r.get("format", format);
    if (format == "gmsh_msh2_ascii")
      spec.format = MeshFormat::GmshMsh2Ascii;
    else if (format == "tetmesh")
      spec.format = MeshFormat::TetMesh;
    else
      throw ConfigError("config: unknown mesh format '" + format + "'");
  } else {
    throw ConfigError("config: unknown mesh kind '" + kind + "'");
  }
  return spec;
}

MaterialParams read_material(KvStore& store) {
  MaterialParams params;
  Reader r(store, "material");
  if (r.take("stray_field") || r.take("magnetostatics"))
    throw ConfigError("config: the magnetostatic stray field is not supported");
  r.get("a11", params.a11);
  r.get("a22", params.a22);
  r.get("a12", params.a12);
  r.get("a0", params.a0);
  r.get("q1", params.q1);
  r.get("q2", params.q2);
  r.get("axis1", params.axis1);
  r.get("axis2", params.axis2);
  r.get("dmi1", params.dmi1);
  r.get("dmi2", params.dmi2);
  r.get("h_ext", params.h_ext);
  r.get("eta_s1", params.eta_s1);
  r.get("eta_s2", params.eta_s2);
  if (params.q1 != 0.0) params.axis1.normalize();
  if (params.q2 != 0.0) params.axis2.normalize();
  params.validate();
  return params;
}

PhysicalParams read_material_si(KvStore& store) {
  PhysicalParams params;
  Reader r(store, "material_si");
  if (r.take("stray_field") || r.take("magnetostatics"))
    throw ConfigError("config: the magnetostatic stray field is not supported");
  r.get("Ms1", params.Ms1);
  r.get("Ms2", params.Ms2);
  r.get("A11", params.A11);
  r.get("A22", params.A22);
  r.get("A12", params.A12);
  r.get("A0", params.A0);
  r.get("lattice_a", params.lattice_a);
  r.get("K1", params.K1);
  r.get("K2", params.K2);
  r.get("axis1", params.axis1);
  r.get("axis2", params.axis2);
  r.get("D1", params.D1);
  r.get("D2", params.D2);
  r.get("Hext", params.Hext);
  r.get("gamma1", params.gamma1);
  r.get("gamma2", params.gamma2);
  r.get("gamma0", params.gamma0);
  r.get("alpha1", params.alpha1);
  r.get("alpha2", params.alpha2);
  r.get("L", params.L);
  r.get("Ms_ref", params.Ms_ref);
  params.validate();
  return params;
}

InitialSpec read_initial(KvStore& store) {
  InitialSpec spec;
  if (!store.has_section("initial")) return spec;
  Reader r(store, "initial");
  std::string kind = "constant";
  r.get("kind", kind);
  if (kind == "constant")
    spec.kind = InitialSpec::Kind::Constant;
  else if (kind == "random")
    spec.kind = InitialSpec::Kind::Random;
  else if (kind == "skyrmion")
    spec.kind = InitialSpec::Kind::Skyrmion;
  else
    throw ConfigError("config: unknown initial state kind '" + kind + "'");
  r.get("v1", spec.v1);
  r.get("v2", spec.v2);
  r.get("seed", spec.seed);
  r.get("amplitude", spec.amplitude);
  r.get("r0", spec.r0);
  r.get("steepness", spec.steepness);
  r.get("sign", spec.sign);
  return spec;
}

AlgorithmSpec read_algorithm(KvStore& store) {
  AlgorithmSpec spec;
  if (!store.has_section("algorithm"))
    throw ConfigError("config is missing the [algorithm] section");
  Reader r(store, "algorithm");

  std::string preset = "decoupled";
  r.get("preset", preset);
  if (preset == "coupled") {
    spec.preset = AlgorithmSpec::Preset::Coupled;
    spec.flow.theta = ThetaScheme::coupled();
  } else if (preset == "decoupled") {
    spec.preset = AlgorithmSpec::Preset::Decoupled;
    spec.flow.theta = ThetaScheme::decoupled();
  } else if (preset == "general") {
    spec.preset = AlgorithmSpec::Preset::General;
    r.get("theta1", spec.flow.theta.theta1);
    r.get("theta2", spec.flow.theta.theta2);
    r.get("theta3", spec.flow.theta.theta3);
  } else if (preset == "llg") {
    spec.preset = AlgorithmSpec::Preset::Llg;
  } else {
    throw ConfigError("config: unknown algorithm preset '" + preset + "'");
  }

  std::string metric = "l2";
  r.get("metric", metric);
  if (metric == "l2")
    spec.flow.metric = Metric::L2;
  else if (metric == "lumped" || metric == "lumped_l2")
    spec.flow.metric = Metric::LumpedL2;
  else if (metric == "h1")
    spec.flow.metric = Metric::H1;
  else
    throw ConfigError("config: unknown metric '" + metric + "'");

  r.get("tau", spec.flow.tau);
  r.get("eps", spec.flow.eps);
  r.get("max_steps", spec.flow.max_steps);
  r.get("solver_tol", spec.flow.solver.tol);
  r.get("solver_max_iter", spec.flow.solver.max_iter);
  r.get("solver_restart", spec.flow.solver.restart);

  std::string aggregation = "max";
  r.get("stop_aggregation", aggregation);
  if (aggregation == "max")
    spec.flow.stop_aggregation = StopAggregation::MaxOverSublattices;
  else if (aggregation == "sum")
    spec.flow.stop_aggregation = StopAggregation::SumOverSublattices;
  else
    throw ConfigError("config: unknown stop_aggregation '" + aggregation + "'");

  r.get("eta1", spec.llg.eta1);
  r.get("eta2", spec.llg.eta2);
  r.get("alpha1", spec.llg.alpha1);
  r.get("alpha2", spec.llg.alpha2);
  r.get("T", spec.T);

  if (auto direction = store.take("algorithm", "pulse_direction"))
    spec.schedule.direction = parse_with<Vec3>("algorithm", "pulse_direction", *direction);
  if (auto breakpoints = store.take("algorithm", "pulse_breakpoints")) {
    std::istringstream in(*breakpoints);
    double t, amplitude;
    while (in >> t >> amplitude) spec.schedule.breakpoints.emplace_back(t, amplitude);
    if (!in.eof())
      throw ConfigError("config: pulse_breakpoints expects pairs 't amplitude'");
    spec.schedule.validate();
  }
  return spec;
}

OutputSpec read_output(KvStore& store) {
  OutputSpec spec;
  if (!store.has_section("output")) return spec;
  Reader r(store, "output");
  r.get("dir", spec.dir);
  r.get("snapshot_every", spec.snapshot_every);
  r.get("write_vtk", spec.write_vtk);
  r.get("write_trace", spec.write_trace);
  return spec;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  KvStore store;
  store.parse(in);

  RunConfig config;
  config.mesh = read_mesh_spec(store);
  const bool dimensionless = store.has_section("material");
  const bool si = store.has_section("material_si");
  if (dimensionless == si)
    throw ConfigError("config must contain exactly one of [material] and [material_si]");
  if (dimensionless) config.material = read_material(store);
  if (si) config.material_si = read_material_si(store);
  config.initial = read_initial(store);
  config.algorithm = read_algorithm(store);
  config.output = read_output(store);

  store.finish({"mesh", "material", "material_si", "initial", "algorithm", "output"});
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in);
}

RunConfig experiment_preset(const std::string& name) {
  RunConfig config;
  if (name == "toy-cube") {
    config.mesh.kind = MeshSpec::Kind::Box;
    config.mesh.nx = config.mesh.ny = config.mesh.nz = 8;
    config.mesh.lo = Vec3(-0.5, -0.5, -0.5);
    config.mesh.hi = Vec3(0.5, 0.5, 0.5);
    MaterialParams material;
    material.a11 = 2.0;
    material.a22 = 1.0;
    material.a12 = -0.5;
    material.a0 = -100.0;
    material.q1 = 5.0;
    material.q2 = 10.0;
    material.axis1 = material.axis2 = Vec3(1.0, 1.0, 1.0).normalized();
    config.material = material;
    config.initial.kind = InitialSpec::Kind::Constant;
    config.initial.v1 = Vec3(1.0, 0.0, 0.0);
    config.initial.v2 = Vec3(0.0, 1.0, 0.0);
    config.algorithm.preset = AlgorithmSpec::Preset::Decoupled;
    config.algorithm.flow.theta = ThetaScheme::decoupled();
    config.algorithm.flow.metric = Metric::L2;
    config.algorithm.flow.tau = 1e-3;
    config.algorithm.flow.eps = 1e-4;
    config.algorithm.flow.max_steps = 5000;
    return config;
  }
  if (name == "skyrmion-relax" || name == "skyrmion-pulse") {
    config.mesh.kind = MeshSpec::Kind::Disk;
    config.mesh.radius = 30.0;
    config.mesh.thickness = 1.0;
    config.mesh.n_radial = 6;
    config.mesh.n_layers = 1;
    PhysicalParams material = PhysicalParams::afm_disk_material();
    config.initial.kind = InitialSpec::Kind::Skyrmion;
    config.initial.seed = 7;
    if (name == "skyrmion-relax") {
      config.material_si = material;
      config.algorithm.preset = AlgorithmSpec::Preset::Decoupled;
      config.algorithm.flow.theta = ThetaScheme::decoupled();
      config.algorithm.flow.metric = Metric::H1;
      config.algorithm.flow.tau = 1e-3;
      config.algorithm.flow.eps = 1e-3;
      config.algorithm.flow.max_steps = 30000;
    } else {
      // reduced-resolution pulse response: damping raised to 0.05 so that
      // the computable stability bound tau < 2 max{alpha}/|a0| admits a
      // CI-sized time step
      material.alpha1 = material.alpha2 = 0.05;
      config.material_si = material;
      config.algorithm.preset = AlgorithmSpec::Preset::Llg;
      config.algorithm.flow.tau = 5e-4;
      config.algorithm.T = 20.0;
      const double h_amplitude = 0.1 / (mu0 * 376e3);  // mu0*H = 100 mT in units of Ms
      config.algorithm.schedule =
          FieldSchedule::pulse(Vec3(1.0, 0.0, 0.0), h_amplitude, 0.0, 3.3239, 9.1406, 12.4645);
      config.output.snapshot_every = 2000;
    }
    return config;
  }
  throw ConfigError("unknown experiment preset '" + name +
                    "' (available: toy-cube, skyrmion-relax, skyrmion-pulse)");
}

}  // namespace afmfem
