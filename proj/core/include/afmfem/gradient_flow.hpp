#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afmfem/energy.hpp"
#include "afmfem/tangent.hpp"

namespace afmfem {

/// Implicitness parameters of the general discrete gradient flow. The
/// intralattice exchange is weighted by theta1, the inhomogeneous and
/// homogeneous interlattice contributions by theta2 and theta3.
struct ThetaScheme {
  double theta1 = 1.0;
  double theta2 = 0.0;
  double theta3 = 0.0;

  /// Fully implicit interlattice coupling: one 4N x 4N system per step.
  static ThetaScheme coupled() { return {1.0, 0.5, 0.5}; }
  /// Explicit interlattice coupling: two independent 2N x 2N systems.
  static ThetaScheme decoupled() { return {1.0, 0.0, 0.0}; }

  bool couples_sublattices() const { return theta2 != 0.0 || theta3 != 0.0; }

  /// theta1 < 1/2 needs tau = O(h^2) for stability; constructible, but
  /// flagged unsupported.
  bool supported() const { return theta1 >= 0.5; }

  /// Validates the tau-independent well-posedness conditions
  /// (theta in [0,1]^3, theta1 > 0, a11*a22*theta1^2 > a12^2*theta2^2).
  void validate(const MaterialParams& params) const;
};

enum class StopAggregation { MaxOverSublattices, SumOverSublattices };

struct FlowConfig {
  ThetaScheme theta = ThetaScheme::decoupled();
  Metric metric = Metric::L2;
  double tau = 1e-3;
  double eps = 1e-4;
  StopAggregation stop_aggregation = StopAggregation::MaxOverSublattices;
  long max_steps = 100000;
  SolverOptions solver;

  void validate(const MaterialParams& params) const;
};

/// Per-step record. Energies are re-evaluated independently of the solver,
/// so the energy-law residual is a genuine cross-check of the update.
struct StepDiagnostics {
  long step = 0;
  double time = 0.0;  // left endpoint i*tau
  EnergyBreakdown energy_before;
  EnergyBreakdown energy_after;
  double metric_norm_sq[2] = {0.0, 0.0};  // ||v_l||_H^2
  double grad_norm_sq[2] = {0.0, 0.0};    // ||grad v_l||^2
  double lumped_norm_sq[2] = {0.0, 0.0};  // ||v_l||_h^2
  double cross_grad = 0.0;                // <grad v1, grad v2>
  double cross_mass = 0.0;                // <v1, v2>
  LowerOrderSecond lower_second;
  double zeeman_schedule_jump = 0.0;  // field-schedule work between t_i and t_{i+1}
  double energy_law_residual = 0.0;
  double stop_quantity = 0.0;
  ConstraintReport constraint;  // of the post-step pair
  int solver_iterations = 0;
  double solver_residual = 0.0;
  double skew_check = 0.0;    // |<m x v, v>_h|, tangent-plane scheme only
  double avg_mx[3] = {0.0, 0.0, 0.0};  // <m1.e1>, <m2.e1>, <m.e1> of the pre-step state
};

struct StepResult {
  SublatticePair next;
  Field v1;
  Field v2;
  StepDiagnostics diag;
};

/// One step of the general theta-scheme: solves for updates in the discrete
/// tangent spaces (one coupled 4N system, or two independent 2N systems when
/// theta2 = theta3 = 0) and applies m^{i+1} = m^i + tau v^i.
StepResult flow_step(const SublatticePair& pair, const MaterialParams& params,
                     const FlowConfig& config, const Mesh& mesh, const FemSystem& fem);

enum class Termination { Converged, MaxSteps };

struct MinimizeResult {
  SublatticePair final;
  std::vector<StepDiagnostics> trace;
  Termination reason = Termination::Converged;
  long iterations = 0;
};

/// Iterates flow_step until the stopping quantity
///   agg_l ( ||v_l||_H^2 + tau ||grad v_l||^2 ) <= eps^2 |Omega|
/// or max_steps. The returned pair is the iterate at which the criterion
/// fired (its update is not applied); the trace includes that final check
/// step.
MinimizeResult minimize(const SublatticePair& initial, const MaterialParams& params,
                        const FlowConfig& config, const Mesh& mesh, const FemSystem& fem);

enum class AdvisoryStatus { Pass, Fail, NotComputable };

struct AdvisoryCheck {
  std::string name;
  AdvisoryStatus status = AdvisoryStatus::NotComputable;
  double value = 0.0;
  double bound = 0.0;
  std::string note;
};

struct AdvisoryReport {
  std::vector<AdvisoryCheck> checks;
  bool any_failed() const;
};

/// Evaluates every computable sufficient condition (well-posedness, energy
/// decay, stability) with the metric-specific equivalence constant c_H.
/// Conditions involving the mesh-dependent constant that the theory only
/// proves to exist are reported as not computable.
AdvisoryReport step_size_advisory(const MaterialParams& params, const FlowConfig& config,
                                  const std::optional<MeshStats>& stats = std::nullopt);

}  // namespace afmfem
