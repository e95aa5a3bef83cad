#pragma once

#include "stokesmg/krylov.hpp"
#include "stokesmg/multigrid.hpp"
#include "stokesmg/verify.hpp"

#include <stdexcept>
#include <string>

namespace stokesmg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment configuration, parsed from "key = value" sections with strict
/// unknown-key rejection.
struct CaseConfig {
  std::string name = "periodic";
  int dim = 2;
  int n = 32;
  int degree = 2;
  int gamma = -1;         // -1: per-case default
  double tau = -1.0;      // -1: tabulated optimum
  double tau0 = -1.0;     // -1: 0.5 p
  double mu1 = -1.0;      // -1: per-case default
  double mu2 = -1.0;
  double rho1 = -1.0;
  double rho2 = -1.0;
  double delta_factor = 0.1;  // delta = factor * h
  int nu1 = 3;
  int nu2 = 3;
  double tol = 1e-8;
  int max_iter = 200;
  std::uint64_t seed = 12345;

  std::vector<double> sweep_taus;
  double sweep_epsilon = 1.0 / 9.0;
  std::vector<int> grids;
  bool projected_exact = false;
  int krylov_dim = 80;

  std::string text;  // normalized source text, for hashing
};

CaseConfig parse_config_text(const std::string& text);
CaseConfig parse_config_file(const std::string& path);

/// Mesh, basis, problem data, and penalties for a named test case, with the
/// per-case defaults resolved (form, viscosities, fluxes, scaling).
struct CaseSetup {
  CaseConfig config;
  CartesianMesh mesh;
  Basis basis{2, 1, 0.5};
  ProblemSpec problem;
  PenaltyConfig penalties;
  ManufacturedSolution solution;
  bool use_scaling = false;
  int resolved_gamma = 0;
  double resolved_tau = 0.0;
};

CaseSetup build_case(const CaseConfig& config);

/// Assembled system for the case, diagonal scaling applied when the case
/// calls for it.
StokesSystem assemble_case(const CaseSetup& setup);

/// Hierarchy build for the case's mesh.
MgHierarchy make_hierarchy(const CaseSetup& setup, StokesSystem sys);

/// Solver entry points shared by the command-line driver and the acceptance
/// suite. apply_a / apply_v wrap the finest-level operator and one V-cycle.
ApplyFn make_apply_a(const MgHierarchy& mg);
ApplyFn make_apply_v(const MgHierarchy& mg);

/// GMRES solve of the case's own right-hand side from a zero initial guess.
std::pair<Eigen::VectorXd, SolveReport> solve_case(const MgHierarchy& mg, double tol, int max_iter);

/// Convergence-rate protocol for the case.
SolveReport rho_case(const MgHierarchy& mg, std::uint64_t seed, double tol = 1e-8, int max_iter = 200);

/// Projection of the exact solution into the discrete (possibly scaled)
/// coefficient space.
Eigen::VectorXd project_exact(const CaseSetup& setup, const StokesSystem& sys);

}  // namespace stokesmg
