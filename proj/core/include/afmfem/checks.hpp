#pragma once

#include <string>
#include <vector>

#include "afmfem/llg.hpp"

namespace afmfem::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Discrete energy-law identities: one step of each scheme (coupled,
/// decoupled, general theta, tangent plane) on randomized admissible states
/// with exchange-only coefficients; both sides evaluated independently.
std::vector<CheckResult> check_energy_laws(int n_states = 200, std::uint64_t seed = 2024);

/// Mass-lumping norm equivalence ||phi|| <= ||phi||_h <= sqrt(5) ||phi|| on
/// random fields over three meshes, and stability under refinement of the
/// fitted constant in |<phi,psi> - <phi,psi>_h| <= C h^2 |phi|_H1 |psi|_H1.
std::vector<CheckResult> check_norm_equivalence(int n_fields = 1000, std::uint64_t seed = 11);

/// Nodal identity |m^{i+1}(z)|^2 = |m^i(z)|^2 + tau^2 |v^i(z)|^2 along a
/// gradient-flow run (exact up to rounding by construction of the updates).
std::vector<CheckResult> check_constraint_recursion(int n_steps = 100);

/// Recovery-sequence surrogate: nodal interpolants of a fixed smooth
/// unit-length pair have zero constraint error and their energy converges to
/// the closed-form value with order >= 1 under uniform refinement.
std::vector<CheckResult> check_gamma_recovery();

/// With eta = alpha = 1 and the precession term disabled, tangent-plane
/// steps coincide with the decoupled gradient flow under the lumped metric.
std::vector<CheckResult> check_llg_equivalence(int n_steps = 50);

std::vector<std::string> suite_names();

/// Runs one named suite, or every suite for "all".
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace afmfem::checks
