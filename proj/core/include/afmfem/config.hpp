#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "afmfem/llg.hpp"
#include "afmfem/nondim.hpp"

namespace afmfem {

struct MeshSpec {
  enum class Kind { Box, Disk, Import };
  Kind kind = Kind::Box;
  // box
  int nx = 8, ny = 8, nz = 8;
  Vec3 lo{-0.5, -0.5, -0.5};
  Vec3 hi{0.5, 0.5, 0.5};
  // disk
  double radius = 30.0;
  double thickness = 1.0;
  int n_radial = 8;
  int n_layers = 1;
  // import
  std::string path;
  MeshFormat format = MeshFormat::GmshMsh2Ascii;

  Mesh build() const;
};

struct InitialSpec {
  enum class Kind { Constant, Random, Skyrmion };
  Kind kind = Kind::Constant;
  Vec3 v1{1.0, 0.0, 0.0};
  Vec3 v2{0.0, 1.0, 0.0};
  std::uint64_t seed = 1;
  double amplitude = 0.3;
  double r0 = 10.0;
  double steepness = 20.0;
  int sign = 1;

  SublatticePair build(const Mesh& mesh) const;
};

struct AlgorithmSpec {
  enum class Preset { Coupled, Decoupled, General, Llg };
  Preset preset = Preset::Decoupled;
  FlowConfig flow;
  LLGParams llg;
  FieldSchedule schedule;
  double T = 1.0;  // final time for evolve runs
};

struct OutputSpec {
  std::string dir = "out";
  int snapshot_every = 50;
  bool write_vtk = true;
  bool write_trace = true;
};

/// Parsed run configuration. Exactly one of the material sections is
/// present; unknown keys anywhere are rejected at parse time.
struct RunConfig {
  MeshSpec mesh;
  std::optional<MaterialParams> material;     // [material], dimensionless
  std::optional<PhysicalParams> material_si;  // [material_si], SI units
  InitialSpec initial;
  AlgorithmSpec algorithm;
  OutputSpec output;

  struct ResolvedMaterial {
    MaterialParams material;
    LLGParams llg;
    std::optional<NondimResult> nondim;  // set when the SI section was used
  };

  /// Dimensionless coefficients for the run; SI input goes through
  /// nondimensionalize() and also fixes the LLG parameters.
  ResolvedMaterial resolve_material() const;
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Built-in experiment presets accepted by the CLI (--experiment).
/// "toy-cube": unit-cube exchange + uniaxial anisotropy problem with the
/// constant initial guess. "skyrmion-relax"/"skyrmion-pulse": reduced
/// resolution AFM nanodisk relaxation and pulse-response runs.
RunConfig experiment_preset(const std::string& name);

}  // namespace afmfem
