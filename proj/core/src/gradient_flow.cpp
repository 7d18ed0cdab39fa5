#include "afmfem/gradient_flow.hpp"

#include <cmath>
#include <sstream>

namespace afmfem {

namespace {

SparseMatrix metric_operator(Metric metric, const FemSystem& fem) {
  switch (metric) {
    case Metric::L2: return fem.mass.matrix;
    case Metric::LumpedL2: {
      SparseMatrix diag(fem.n_vertices, fem.n_vertices);
      std::vector<Eigen::Triplet<double>> triplets;
      triplets.reserve(static_cast<std::size_t>(fem.n_vertices));
      for (int z = 0; z < fem.n_vertices; ++z)
        triplets.emplace_back(z, z, fem.lumped.weights[z]);
      diag.setFromTriplets(triplets.begin(), triplets.end());
      return diag;
    }
    case Metric::H1: return SparseMatrix(fem.mass.matrix + fem.stiffness.matrix);
  }
  throw ConfigError("unknown metric");
}

SparseMatrix compose_blocks(const SparseMatrix& a11, const SparseMatrix& a12,
                            const SparseMatrix& a21, const SparseMatrix& a22) {
  const Eigen::Index n = a11.rows();
  std::vector<Eigen::Triplet<double>> triplets;
  const auto add = [&](const SparseMatrix& block, Eigen::Index row0, Eigen::Index col0) {
    for (int row = 0; row < block.outerSize(); ++row)
      for (SparseMatrix::InnerIterator it(block, row); it; ++it)
        triplets.emplace_back(row0 + it.row(), col0 + it.col(), it.value());
  };
  add(a11, 0, 0);
  add(a12, 0, n);
  add(a21, n, 0);
  add(a22, n, n);
  SparseMatrix out(2 * n, 2 * n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

void ThetaScheme::validate(const MaterialParams& params) const {
  for (double t : {theta1, theta2, theta3})
    if (t < 0.0 || t > 1.0) throw ConfigError("theta parameters must lie in [0,1]");
  if (!(theta1 > 0.0)) throw ConfigError("well-posedness requires theta1 > 0");
  if (!(params.a11 * params.a22 * theta1 * theta1 > params.a12 * params.a12 * theta2 * theta2)) {
    std::ostringstream msg;
    msg << "well-posedness requires a11*a22*theta1^2 > a12^2*theta2^2 ("
        << params.a11 * params.a22 * theta1 * theta1 << " vs "
        << params.a12 * params.a12 * theta2 * theta2 << ")";
    throw ConfigError(msg.str());
  }
}

void FlowConfig::validate(const MaterialParams& params) const {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  theta.validate(params);
}

StepResult flow_step(const SublatticePair& pair, const MaterialParams& params,
                     const FlowConfig& config, const Mesh& mesh, const FemSystem& fem) {
  params.validate();
  config.validate(params);
  const double tau = config.tau;
  const ThetaScheme& theta = config.theta;

  StepResult result;
  result.diag.energy_before = energy(pair, params, mesh, fem);

  const TangentFrame frame1 = build_frames(pair.m1);
  const TangentFrame frame2 = build_frames(pair.m2);
  const Field rhs1 = effective_field_rhs(1, pair, params, mesh, fem);
  const Field rhs2 = effective_field_rhs(2, pair, params, mesh, fem);

  const SparseMatrix metric_op = metric_operator(config.metric, fem);

  if (!theta.couples_sublattices()) {
    // two independent 2N systems, one per sublattice
    for (int ell = 1; ell <= 2; ++ell) {
      const SparseMatrix diag_op = expand_componentwise(
          SparseMatrix(metric_op + params.a_diag(ell) * theta.theta1 * tau *
                                       fem.stiffness.matrix));
      const TangentFrame& frame = ell == 1 ? frame1 : frame2;
      const ReducedSystem system =
          reduce(diag_op, flatten(ell == 1 ? rhs1 : rhs2), frame_prolongation(frame), true);
      const SolveResult sol = solve(system, config.solver);
      if (!sol.converged)
        throw NumericalError("flow_step: solver did not converge (residual " +
                             std::to_string(sol.residual) + ")");
      (ell == 1 ? result.v1 : result.v2) =
          unflatten(frame_prolongation(frame) * sol.x);
      result.diag.solver_iterations += sol.iterations;
      result.diag.solver_residual = std::max(result.diag.solver_residual, sol.residual);
    }
  } else {
    // one coupled 4N system over both sublattices
    const SparseMatrix diag1 = expand_componentwise(
        SparseMatrix(metric_op + params.a11 * theta.theta1 * tau * fem.stiffness.matrix));
    const SparseMatrix diag2 = expand_componentwise(
        SparseMatrix(metric_op + params.a22 * theta.theta1 * tau * fem.stiffness.matrix));
    const SparseMatrix offdiag = expand_componentwise(
        SparseMatrix(params.a12 * theta.theta2 * tau * fem.stiffness.matrix -
                     params.a0 * theta.theta3 * tau * fem.mass.matrix));
    const SparseMatrix full = compose_blocks(diag1, offdiag, offdiag, diag2);

    Eigen::VectorXd full_rhs(6 * fem.n_vertices);
    full_rhs << flatten(rhs1), flatten(rhs2);
    const SparseMatrix prolongation = frame_prolongation({&frame1, &frame2});
    const ReducedSystem system = reduce(full, full_rhs, prolongation, true);
    const SolveResult sol = solve(system, config.solver);
    if (!sol.converged)
      throw NumericalError("flow_step: solver did not converge (residual " +
                           std::to_string(sol.residual) + ")");
    const Eigen::VectorXd lifted = prolongation * sol.x;
    result.v1 = unflatten(lifted.head(3 * fem.n_vertices));
    result.v2 = unflatten(lifted.tail(3 * fem.n_vertices));
    result.diag.solver_iterations = sol.iterations;
    result.diag.solver_residual = sol.residual;
  }

  result.next.m1 = pair.m1 + tau * result.v1;
  result.next.m2 = pair.m2 + tau * result.v2;

  // diagnostics
  StepDiagnostics& d = result.diag;
  const SublatticePair updates{result.v1, result.v2};
  for (int ell = 1; ell <= 2; ++ell) {
    const Field& v = updates.sublattice(ell);
    d.metric_norm_sq[ell - 1] = inner(config.metric, fem, v, v);
    d.grad_norm_sq[ell - 1] = inner_grad(fem, v, v);
    d.lumped_norm_sq[ell - 1] = inner_lumped(fem, v, v);
  }
  d.cross_grad = inner_grad(fem, result.v1, result.v2);
  d.cross_mass = inner_l2(fem, result.v1, result.v2);
  d.lower_second = lower_order_second(updates, params, mesh, fem);

  const double stop1 = d.metric_norm_sq[0] + tau * d.grad_norm_sq[0];
  const double stop2 = d.metric_norm_sq[1] + tau * d.grad_norm_sq[1];
  d.stop_quantity = config.stop_aggregation == StopAggregation::MaxOverSublattices
                        ? std::max(stop1, stop2)
                        : stop1 + stop2;

  d.energy_after = energy(result.next, params, mesh, fem);
  const double expected =
      -tau * (d.metric_norm_sq[0] + d.metric_norm_sq[1]) -
      0.5 * (2.0 * theta.theta1 - 1.0) * tau * tau *
          (params.a11 * d.grad_norm_sq[0] + params.a22 * d.grad_norm_sq[1]) -
      params.a12 * (2.0 * theta.theta2 - 1.0) * tau * tau * d.cross_grad +
      params.a0 * (2.0 * theta.theta3 - 1.0) * tau * tau * d.cross_mass +
      tau * tau * d.lower_second.total();
  d.energy_law_residual =
      std::abs((d.energy_after.total - d.energy_before.total) - expected);

  d.constraint = constraint_report(result.next, mesh, fem);

  const Vec3 avg1 = pair.m1.transpose() * fem.lumped.weights / fem.volume;
  const Vec3 avg2 = pair.m2.transpose() * fem.lumped.weights / fem.volume;
  d.avg_mx[0] = avg1[0];
  d.avg_mx[1] = avg2[0];
  d.avg_mx[2] = params.eta_s1 * avg1[0] + params.eta_s2 * avg2[0];

  return result;
}

MinimizeResult minimize(const SublatticePair& initial, const MaterialParams& params,
                        const FlowConfig& config, const Mesh& mesh, const FemSystem& fem) {
  config.validate(params);
  MinimizeResult result;
  SublatticePair current = initial;
  const double threshold = config.eps * config.eps * fem.volume;

  for (long i = 0; i < config.max_steps; ++i) {
    StepResult step = flow_step(current, params, config, mesh, fem);
    step.diag.step = i;
    step.diag.time = static_cast<double>(i) * config.tau;
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
  result.iterations = config.max_steps;
  return result;
}

bool AdvisoryReport::any_failed() const {
  for (const auto& check : checks)
    if (check.status == AdvisoryStatus::Fail) return true;
  return false;
}

AdvisoryReport step_size_advisory(const MaterialParams& params, const FlowConfig& config,
                                  const std::optional<MeshStats>& stats) {
  const double c = metric_equivalence_constant(config.metric);
  const double c2 = c * c;
  const double abs_a0 = std::abs(params.a0);
  const ThetaScheme& th = config.theta;
  const double tau = config.tau;

  AdvisoryReport report;
  const auto add = [&](std::string name, bool pass, double value, double bound,
                       std::string note = {}) {
    report.checks.push_back({std::move(name), pass ? AdvisoryStatus::Pass : AdvisoryStatus::Fail,
                             value, bound, std::move(note)});
  };
  const auto add_unknown = [&](std::string name, std::string note) {
    report.checks.push_back(
        {std::move(name), AdvisoryStatus::NotComputable, 0.0, 0.0, std::move(note)});
  };

  add("wellposed: theta1 > 0", th.theta1 > 0.0, th.theta1, 0.0);
  add("wellposed: a11*a22*theta1^2 > a12^2*theta2^2",
      params.a11 * params.a22 * th.theta1 * th.theta1 >
          params.a12 * params.a12 * th.theta2 * th.theta2,
      params.a11 * params.a22 * th.theta1 * th.theta1,
      params.a12 * params.a12 * th.theta2 * th.theta2);
  add("wellposed: c_H^2 |a0| theta3 tau < 1", c2 * abs_a0 * th.theta3 * tau < 1.0,
      c2 * abs_a0 * th.theta3 * tau, 1.0);

  add("decay: theta1 >= 1/2", th.theta1 >= 0.5, th.theta1, 0.5);
  add("decay: a11*a22*(2 theta1 - 1)^2 >= a12^2*(2 theta2 - 1)^2",
      params.a11 * params.a22 * std::pow(2.0 * th.theta1 - 1.0, 2) >=
          params.a12 * params.a12 * std::pow(2.0 * th.theta2 - 1.0, 2),
      params.a11 * params.a22 * std::pow(2.0 * th.theta1 - 1.0, 2),
      params.a12 * params.a12 * std::pow(2.0 * th.theta2 - 1.0, 2));
  add("decay: c_H^2 |a0| |2 theta3 - 1| tau <= 2",
      c2 * abs_a0 * std::abs(2.0 * th.theta3 - 1.0) * tau <= 2.0,
      c2 * abs_a0 * std::abs(2.0 * th.theta3 - 1.0) * tau, 2.0);

  std::string mesh_note = "constant depends only on shape-regularity but is not known numerically";
  if (stats) {
    std::ostringstream os;
    os << mesh_note << " (mesh shape_regularity = " << stats->shape_regularity << ")";
    mesh_note = os.str();
  }
  add_unknown("termination: requires the shape-regularity constant", mesh_note);
  add_unknown("stability: tau threshold requires the shape-regularity constant", mesh_note);

  return report;
}

}  // namespace afmfem
