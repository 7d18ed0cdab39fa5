#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "afmfem/config.hpp"

namespace afmfem {

/// VTK legacy ASCII 3.0 unstructured grid (cell type 10) with point data
/// VECTORS m1, m2 and m_total = eta_s1 m1 + eta_s2 m2.
void write_vtk(const Mesh& mesh, const SublatticePair& pair, double eta_s1, double eta_s2,
               const std::string& path);
void write_vtk(const Mesh& mesh, const SublatticePair& pair, double eta_s1, double eta_s2,
               std::ostream& out);

/// Minimal legacy-VTK reader for round-trip checks of our own output.
struct VtkData {
  std::vector<Vec3> points;
  std::vector<std::array<std::int32_t, 4>> cells;
  std::map<std::string, Field> vectors;
};

VtkData read_vtk(std::istream& in);
VtkData read_vtk_file(const std::string& path);

/// CSV trace, one row per step:
/// step,time,E_total,E_intra,E_inter_inhom,E_inter_hom,E_ani,E_dmi,E_zeeman,
/// stop_quantity,err_L1_m1,err_L1_m2,err_Linf_m1,err_Linf_m2,
/// energy_law_residual,solver_iters,avg_mx_m1,avg_mx_m2,avg_mx_total
void write_trace(const std::vector<StepDiagnostics>& trace, std::ostream& out);
void write_trace(const std::vector<StepDiagnostics>& trace, const std::string& path);

/// Reproducibility manifest: configuration echo, seed, derived dimensionless
/// parameters, and the library version.
void write_manifest(const RunConfig& config, const RunConfig::ResolvedMaterial& resolved,
                    std::ostream& out);
void write_manifest(const RunConfig& config, const RunConfig::ResolvedMaterial& resolved,
                    const std::string& path);

}  // namespace afmfem
