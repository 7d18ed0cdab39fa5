#include "afmfem/llg.hpp"

#include <algorithm>
#include <cmath>

namespace afmfem {

void LLGParams::validate() const {
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw ConfigError("gyromagnetic factors must be positive");
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw ConfigError("damping parameters must be positive");
}

void FieldSchedule::validate() const {
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i].first > breakpoints[i - 1].first))
      throw ConfigError("schedule breakpoints must be strictly increasing in t");
}

double FieldSchedule::amplitude_at(double t) const {
  if (breakpoints.empty()) return 0.0;
  if (t <= breakpoints.front().first) return breakpoints.front().second;
  if (t >= breakpoints.back().first) return breakpoints.back().second;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (t <= breakpoints[i].first) {
      const auto& [t0, a0] = breakpoints[i - 1];
      const auto& [t1, a1] = breakpoints[i];
      return a0 + (a1 - a0) * (t - t0) / (t1 - t0);
    }
  }
  return breakpoints.back().second;
}

FieldSchedule FieldSchedule::pulse(const Vec3& direction, double amplitude, double t0, double t1,
                                   double t2, double t3) {
  FieldSchedule schedule;
  schedule.direction = direction;
  schedule.breakpoints = {{t0, 0.0}, {t1, amplitude}, {t2, amplitude}, {t3, 0.0}};
  schedule.validate();
  return schedule;
}

namespace {

// <m x v, phi>_h: block-diagonal with nodal blocks w_z [m(z)]_x.
SparseMatrix lumped_skew_operator(const Field& m, const LumpedMass& lumped) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m.rows()) * 6);
  for (Eigen::Index z = 0; z < m.rows(); ++z) {
    const double w = lumped.weights[z];
    const double m1 = m(z, 0), m2 = m(z, 1), m3 = m(z, 2);
    triplets.emplace_back(3 * z + 0, 3 * z + 1, -w * m3);
    triplets.emplace_back(3 * z + 0, 3 * z + 2, w * m2);
    triplets.emplace_back(3 * z + 1, 3 * z + 0, w * m3);
    triplets.emplace_back(3 * z + 1, 3 * z + 2, -w * m1);
    triplets.emplace_back(3 * z + 2, 3 * z + 0, -w * m2);
    triplets.emplace_back(3 * z + 2, 3 * z + 1, w * m1);
  }
  SparseMatrix out(3 * m.rows(), 3 * m.rows());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseMatrix lumped_diag_operator(const LumpedMass& lumped) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(lumped.weights.size()));
  for (Eigen::Index z = 0; z < lumped.weights.size(); ++z)
    triplets.emplace_back(z, z, lumped.weights[z]);
  SparseMatrix out(lumped.weights.size(), lumped.weights.size());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

double lumped_triple(const Field& m, const Field& v, const LumpedMass& lumped) {
  double sum = 0.0;
  for (Eigen::Index z = 0; z < m.rows(); ++z) {
    const Vec3 mz = m.row(z).transpose(), vz = v.row(z).transpose();
    sum += lumped.weights[z] * mz.cross(vz).dot(vz);
  }
  return sum;
}

}  // namespace

StepResult llg_step(const SublatticePair& pair, const MaterialParams& params,
                    const LLGParams& llg, const FieldSchedule& schedule, double t, double tau,
                    const SolverOptions& solver, const Mesh& mesh, const FemSystem& fem) {
  params.validate();
  llg.validate();
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");

  // the applied field is frozen at the step's left endpoint
  MaterialParams frozen = params;
  frozen.h_ext += schedule.field_at(t);

  StepResult result;
  result.diag.time = t;
  result.diag.energy_before = energy(pair, frozen, mesh, fem);

  const SparseMatrix lumped_diag = expand_componentwise(lumped_diag_operator(fem.lumped));

  for (int ell = 1; ell <= 2; ++ell) {
    const Field& m = pair.sublattice(ell);
    const TangentFrame frame = build_frames(m);

    SparseMatrix full = llg.alpha(ell) * lumped_diag +
                        llg.eta(ell) * params.a_diag(ell) * tau *
                            expand_componentwise(fem.stiffness.matrix);
    if (llg.precession) full += lumped_skew_operator(m, fem.lumped);

    const Field rhs = llg.eta(ell) * effective_field_rhs(ell, pair, frozen, mesh, fem);
    const ReducedSystem system =
        reduce(full, flatten(rhs), frame_prolongation(frame), !llg.precession);
    const SolveResult sol = solve(system, solver);
    if (!sol.converged)
      throw NumericalError("llg_step: solver did not converge (residual " +
                           std::to_string(sol.residual) + ")");
    (ell == 1 ? result.v1 : result.v2) = unflatten(frame_prolongation(frame) * sol.x);
    result.diag.solver_iterations += sol.iterations;
    result.diag.solver_residual = std::max(result.diag.solver_residual, sol.residual);
  }

  result.next.m1 = pair.m1 + tau * result.v1;
  result.next.m2 = pair.m2 + tau * result.v2;

  StepDiagnostics& d = result.diag;
  const SublatticePair updates{result.v1, result.v2};
  for (int ell = 1; ell <= 2; ++ell) {
    const Field& v = updates.sublattice(ell);
    d.metric_norm_sq[ell - 1] = inner_lumped(fem, v, v);
    d.grad_norm_sq[ell - 1] = inner_grad(fem, v, v);
    d.lumped_norm_sq[ell - 1] = d.metric_norm_sq[ell - 1];
  }
  d.cross_grad = inner_grad(fem, result.v1, result.v2);
  d.cross_mass = inner_l2(fem, result.v1, result.v2);
  d.lower_second = lower_order_second(updates, frozen, mesh, fem);
  d.skew_check = std::max(std::abs(lumped_triple(pair.m1, result.v1, fem.lumped)),
                          std::abs(lumped_triple(pair.m2, result.v2, fem.lumped)));
  d.stop_quantity = std::max(d.lumped_norm_sq[0] + tau * d.grad_norm_sq[0],
                             d.lumped_norm_sq[1] + tau * d.grad_norm_sq[1]);

  d.energy_after = energy(result.next, frozen, mesh, fem);
  const double expected =
      -tau * (llg.alpha1 / llg.eta1 * d.lumped_norm_sq[0] +
              llg.alpha2 / llg.eta2 * d.lumped_norm_sq[1]) -
      0.5 * tau * tau * (params.a11 * d.grad_norm_sq[0] + params.a22 * d.grad_norm_sq[1]) +
      params.a12 * tau * tau * d.cross_grad - params.a0 * tau * tau * d.cross_mass +
      tau * tau * d.lower_second.total();
  d.energy_law_residual = std::abs((d.energy_after.total - d.energy_before.total) - expected);

  // work done by the field schedule between the endpoints, used to chain
  // frozen-field energies across steps
  if (!schedule.empty()) {
    const Vec3 dh = schedule.field_at(t + tau) - schedule.field_at(t);
    const Vec3 moment = (params.eta_s1 * result.next.m1 + params.eta_s2 * result.next.m2)
                            .transpose() *
                        fem.lumped.weights;
    d.zeeman_schedule_jump = -dh.dot(moment);
  }

  d.constraint = constraint_report(result.next, mesh, fem);

  const Vec3 avg1 = pair.m1.transpose() * fem.lumped.weights / fem.volume;
  const Vec3 avg2 = pair.m2.transpose() * fem.lumped.weights / fem.volume;
  d.avg_mx[0] = avg1[0];
  d.avg_mx[1] = avg2[0];
  d.avg_mx[2] = params.eta_s1 * avg1[0] + params.eta_s2 * avg2[0];

  return result;
}

const SublatticePair* Trajectory::snapshot_at_step(long step) const {
  const auto it = std::lower_bound(snapshot_steps.begin(), snapshot_steps.end(), step);
  if (it == snapshot_steps.end() || *it != step) return nullptr;
  return &snapshots[static_cast<std::size_t>(it - snapshot_steps.begin())];
}

Trajectory evolve(const SublatticePair& initial, const MaterialParams& params,
                  const LLGParams& llg, const FieldSchedule& schedule, double T, double tau,
                  int snapshot_every, const SolverOptions& solver, const Mesh& mesh,
                  const FemSystem& fem) {
  if (!(T > 0.0)) throw ConfigError("evolve: final time must be positive");
  if (snapshot_every < 1) throw ConfigError("evolve: snapshot cadence must be >= 1");
  schedule.validate();

  Trajectory trajectory;
  trajectory.tau = tau;
  trajectory.n_steps = static_cast<long>(std::ceil(T / tau - 1e-12));
  trajectory.trace.reserve(static_cast<std::size_t>(trajectory.n_steps));

  SublatticePair current = initial;
  const auto snapshot = [&](long step, const SublatticePair& pair) {
    trajectory.snapshot_steps.push_back(step);
    trajectory.snapshots.push_back(pair);
  };
  snapshot(0, current);

  for (long i = 0; i < trajectory.n_steps; ++i) {
    StepResult step = llg_step(current, params, llg, schedule, static_cast<double>(i) * tau, tau,
                               solver, mesh, fem);
    step.diag.step = i;
    trajectory.dissipation_sum += tau * (step.diag.lumped_norm_sq[0] + step.diag.lumped_norm_sq[1]);
    trajectory.grad_update_sum +=
        tau * tau * (step.diag.grad_norm_sq[0] + step.diag.grad_norm_sq[1]);
    const bool finite = std::isfinite(step.diag.energy_after.total);
    trajectory.trace.push_back(std::move(step.diag));
    current = std::move(step.next);
    if ((i + 1) % snapshot_every == 0 || i + 1 == trajectory.n_steps) snapshot(i + 1, current);
    if (!finite) {
      trajectory.aborted = true;
      trajectory.n_steps = i + 1;
      break;
    }
  }

  for (const Field& m : {current.m1, current.m2})
    trajectory.h1_norm_sq_final += inner_l2(fem, m, m) + inner_grad(fem, m, m);
  return trajectory;
}

LLGMinimizeResult llg_minimize(const SublatticePair& initial, const MaterialParams& params,
                               const LLGParams& llg, double tau, double eps, long max_steps,
                               const SolverOptions& solver, const Mesh& mesh,
                               const FemSystem& fem) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  LLGMinimizeResult result;
  SublatticePair current = initial;
  const double threshold = eps * eps * fem.volume;
  const FieldSchedule no_schedule;

  for (long i = 0; i < max_steps; ++i) {
    StepResult step = llg_step(current, params, llg, no_schedule, static_cast<double>(i) * tau,
                               tau, solver, mesh, fem);
    step.diag.step = i;
    const double stop = step.diag.stop_quantity;
    result.trace.push_back(std::move(step.diag));
    if (stop <= threshold) {
      result.final = std::move(current);
      result.reason = Termination::Converged;
      result.iterations = i;
      return result;
    }
    current = std::move(step.next);
  }
  result.final = std::move(current);
  result.reason = Termination::MaxSteps;
  result.iterations = max_steps;
  return result;
}

SublatticePair reconstruct(const Trajectory& trajectory, double t, ReconstructionKind kind) {
  const double tau = trajectory.tau;
  const double t_end = static_cast<double>(trajectory.n_steps) * tau;
  if (t < -1e-12 * tau || t > t_end * (1.0 + 1e-12) + 1e-12 * tau)
    throw ConfigError("reconstruct: t outside the recorded span");

  const long i = std::min(static_cast<long>(std::floor(t / tau + 1e-12)), trajectory.n_steps);
  const double rem = t - static_cast<double>(i) * tau;
  if (std::abs(rem) <= 1e-12 * std::max(1.0, std::abs(t))) {
    const SublatticePair* snap = trajectory.snapshot_at_step(i);
    if (!snap)
      throw ConfigError("reconstruct: snapshot cadence too coarse for the requested time");
    return *snap;
  }

  const SublatticePair* left = trajectory.snapshot_at_step(i);
  const SublatticePair* right = trajectory.snapshot_at_step(i + 1);
  if (!left || !right)
    throw ConfigError("reconstruct: snapshot cadence too coarse for the requested time");

  switch (kind) {
    case ReconstructionKind::Left: return *left;
    case ReconstructionKind::Right: return *right;
    case ReconstructionKind::Affine: {
      const double lambda = rem / tau;
      SublatticePair out;
      out.m1 = (1.0 - lambda) * left->m1 + lambda * right->m1;
      out.m2 = (1.0 - lambda) * left->m2 + lambda * right->m2;
      return out;
    }
  }
  throw ConfigError("reconstruct: unknown reconstruction kind");
}

WeakEnergyReport weak_energy_check(const Trajectory& trajectory, const MaterialParams& params,
                                   const LLGParams& llg) {
  if (trajectory.trace.empty()) throw ConfigError("weak_energy_check: empty trajectory");
  WeakEnergyReport report;
  const double tau = trajectory.tau;

  double budget = 0.0;
  double dissipation = 0.0;
  for (const StepDiagnostics& d : trajectory.trace) {
    dissipation += tau * (llg.alpha1 / llg.eta1 * d.lumped_norm_sq[0] +
                          llg.alpha2 / llg.eta2 * d.lumped_norm_sq[1]);
    budget += std::abs(params.a12) * tau * tau * std::abs(d.cross_grad);
    budget += std::abs(params.a0) * tau * tau * std::abs(d.cross_mass);
    budget += tau * tau * std::abs(d.lower_second.dmi);
    budget += std::abs(d.zeeman_schedule_jump);
  }

  const double e_start = trajectory.trace.front().energy_before.total;
  const double e_end =
      trajectory.trace.back().energy_after.total + trajectory.trace.back().zeeman_schedule_jump;
  report.value = e_end + dissipation - e_start;
  report.budget = budget;
  report.dissipation = dissipation;
  report.pass = report.value <= budget + 1e-8;
  return report;
}

AdvisoryReport llg_step_size_advisory(const MaterialParams& params, const LLGParams& llg,
                                      double tau) {
  AdvisoryReport report;
  const double bound = 2.0 * std::max(llg.alpha1, llg.alpha2) / std::abs(params.a0);
  report.checks.push_back({"stability: tau < 2 max{alpha} / |a0|",
                           tau < bound ? AdvisoryStatus::Pass : AdvisoryStatus::Fail, tau, bound,
                           ""});
  return report;
}

}  // namespace afmfem
