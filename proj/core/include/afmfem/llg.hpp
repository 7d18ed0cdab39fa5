#pragma once

#include "afmfem/gradient_flow.hpp"

namespace afmfem {

/// Dimensionless gyromagnetic factors and Gilbert damping per sublattice.
/// `precession` is a test hook: with it disabled and eta = alpha = 1 a step
/// coincides with the decoupled gradient flow under the lumped L2 metric.
struct LLGParams {
  double eta1 = 1.0;
  double eta2 = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  bool precession = true;

  double eta(int ell) const { return ell == 1 ? eta1 : eta2; }
  double alpha(int ell) const { return ell == 1 ? alpha1 : alpha2; }

  void validate() const;
};

/// Applied-field schedule: piecewise-linear scalar amplitude along a fixed
/// direction. Before the first breakpoint the first amplitude holds, after
/// the last the last one. An empty schedule is the zero field.
struct FieldSchedule {
  Vec3 direction{1.0, 0.0, 0.0};
  std::vector<std::pair<double, double>> breakpoints;  // (t, amplitude), strictly increasing t

  double amplitude_at(double t) const;
  Vec3 field_at(double t) const { return amplitude_at(t) * direction; }
  bool empty() const { return breakpoints.empty(); }

  void validate() const;

  /// Pulse ramping 0 -> amplitude over [t0,t1], holding until t2, ramping
  /// back to 0 at t3.
  static FieldSchedule pulse(const Vec3& direction, double amplitude, double t0, double t1,
                             double t2, double t3);
};

/// One step of the projection-free tangent plane scheme: for each sublattice
/// independently, solves the (nonsymmetric) reduced 2N system
///   alpha <v,phi>_h + <m x v,phi>_h + eta a_ll tau <grad v,grad phi> = eta <h_eff,phi>
/// over the discrete tangent space and applies m^{i+1} = m^i + tau v^i.
/// The Zeeman field uses the schedule at the step's left endpoint t_i.
StepResult llg_step(const SublatticePair& pair, const MaterialParams& params,
                    const LLGParams& llg, const FieldSchedule& schedule, double t, double tau,
                    const SolverOptions& solver, const Mesh& mesh, const FemSystem& fem);

struct Trajectory {
  double tau = 0.0;
  long n_steps = 0;
  std::vector<long> snapshot_steps;
  std::vector<SublatticePair> snapshots;
  std::vector<StepDiagnostics> trace;
  bool aborted = false;

  // running sums of the discrete stability estimate
  double h1_norm_sq_final = 0.0;  // sum_l ||m^j||_{H1}^2 at the final step
  double dissipation_sum = 0.0;   // tau  * sum_i sum_l ||v_l^i||_h^2
  double grad_update_sum = 0.0;   // tau^2 * sum_i sum_l ||grad v_l^i||^2

  const SublatticePair* snapshot_at_step(long step) const;
};

/// ceil(T/tau) steps with snapshots every `snapshot_every` steps (first and
/// last always kept) and full scalar diagnostics for every step. Aborts with
/// the partial trajectory flagged if the energy becomes non-finite.
Trajectory evolve(const SublatticePair& initial, const MaterialParams& params,
                  const LLGParams& llg, const FieldSchedule& schedule, double T, double tau,
                  int snapshot_every, const SolverOptions& solver, const Mesh& mesh,
                  const FemSystem& fem);

struct LLGMinimizeResult {
  SublatticePair final;
  std::vector<StepDiagnostics> trace;
  Termination reason = Termination::Converged;
  long iterations = 0;
};

/// LLG-based energy minimization: iterates llg_step (static applied field)
/// until the damping-independent stopping criterion
///   max_l ( ||v_l||_h^2 + tau ||grad v_l||^2 ) <= eps^2 |Omega|.
LLGMinimizeResult llg_minimize(const SublatticePair& initial, const MaterialParams& params,
                               const LLGParams& llg, double tau, double eps, long max_steps,
                               const SolverOptions& solver, const Mesh& mesh,
                               const FemSystem& fem);

enum class ReconstructionKind { Affine, Left, Right };

/// Time reconstruction from the stored snapshots. At a stored snapshot time
/// all three kinds return that snapshot; inside a step interval the two
/// bracketing snapshots must have been retained.
SublatticePair reconstruct(const Trajectory& trajectory, double t, ReconstructionKind kind);

/// Discrete surrogate of the weak-solution energy inequality:
/// value = E(end) + sum_l (alpha_l/eta_l) tau sum_i ||v_l^i||_h^2 - E(0),
/// which the per-step identities bound by the accumulated unsigned
/// perturbation terms (explicit interlattice coupling, DMI second order,
/// field-schedule work).
struct WeakEnergyReport {
  double value = 0.0;
  double budget = 0.0;
  double dissipation = 0.0;
  bool pass = false;
};

WeakEnergyReport weak_energy_check(const Trajectory& trajectory, const MaterialParams& params,
                                   const LLGParams& llg);

/// The computable sufficient stability condition tau < 2 max{alpha}/|a0|.
AdvisoryReport llg_step_size_advisory(const MaterialParams& params, const LLGParams& llg,
                                      double tau);

}  // namespace afmfem
