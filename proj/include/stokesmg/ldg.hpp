#pragma once

#include "stokesmg/field.hpp"
#include "stokesmg/mesh.hpp"
#include "stokesmg/system.hpp"

#include <functional>
#include <optional>

namespace stokesmg {

/// Penalty stabilization parameters. The pressure prefactor tau defaults to
/// the tabulated optimum for the given form, dimension, and degree; velocity
/// penalties follow the h^-1, viscosity-scaled rules for Cartesian meshes.
struct PenaltyConfig {
  double tau = 0.0;            // pressure prefactor, tau_p = tau h / mu (steady)
  double tau0 = 0.0;           // vanishing-viscosity prefactor, 0.5 p
  double c_dirichlet = 10.0;   // tau_{u,boundary} = 10 p mu^- / h
  double c_interphase = 3.0;   // tau_{u,interphase} = 3 p min(mu^-,mu^+) / h
  double tau_u_intraphase = 0.0;
};

/// Tabulated multigrid-optimal pressure penalty prefactor; throws for the 3D
/// p > 3 entries that have no value.
double optimal_tau(int dim, int degree, int gamma);

PenaltyConfig make_penalty_config(int dim, int degree, int gamma);

/// Problem data: form, coefficients, and source/boundary/jump functions.
/// Phase labels are 1-based; data functions default to zero when absent.
struct ProblemSpec {
  int gamma = 0;
  std::vector<double> mu_phase{1.0};
  std::function<double(const Vec3&)> mu_fn;       // optional spatially varying viscosity
  std::function<Vec3(const Vec3&)> mu_grad_fn;    // gradient of mu_fn (manufactured data)
  std::vector<double> rho_phase;                  // empty for the steady problem
  double delta = 0.0;                             // time-step parameter (> 0 when unsteady)

  std::function<Vec3(const Vec3&, int)> f_momentum;            // (x, phase)
  std::function<double(const Vec3&, int)> f_div;               // (x, phase)
  std::function<Vec3(const Vec3&, int, int)> g_jump;           // (x, lo phase, hi phase)
  std::function<Vec3(const Vec3&, const Vec3&, int, int)> h_jump;  // (x, n, lo, hi)
  std::function<Vec3(const Vec3&, int)> g_dirichlet;           // (x, phase)
  std::function<Vec3(const Vec3&, const Vec3&, int)> h_stress;     // (x, n, phase)

  bool timedep() const { return !rho_phase.empty(); }
  double mu_at(const Vec3& x, int chi) const {
    return mu_fn ? mu_fn(x) : mu_phase.at(chi - 1);
  }
  double rho_at(int chi) const { return rho_phase.at(chi - 1); }
};

/// Viscosity-upwinded interphase flux weight: the velocity flux is biased to
/// the more viscous side, the stress flux to the less viscous one.
double upwind_lambda(double mu_minus, double mu_plus);

/// Sets lambda on every interphase face from the adjacent viscosities.
void apply_viscosity_upwinding(CartesianMesh& mesh, const ProblemSpec& problem);

/// Discrete gradient operators G_k = broken gradient + jump lifting, one per
/// axis, acting on scalar fields.
std::array<BlockSparseMatrix, 3> discrete_gradient(const CartesianMesh& mesh, const Basis& basis);

/// Adjoint-form gradient components -M^-1 G_k^T M; the basis is orthonormal,
/// so this is -G_k^T.
std::array<BlockSparseMatrix, 3> adjoint_gradient(const std::array<BlockSparseMatrix, 3>& G, int dim);

/// Lifted boundary/jump data: J_g (matrix-valued), J_h (vector), J_{g.n}
/// (scalar), as coefficient fields.
struct LiftedData {
  DgField Jg;
  DgField Jh;
  DgField Jgn;
};
LiftedData lift_data(const CartesianMesh& mesh, const Basis& basis, const ProblemSpec& problem);

enum class PressurePenaltyKind { Steady, TimedepCombined, ViscousPart, DensityPart };

/// Velocity and pressure penalty operators plus the affine source moments.
struct PenaltyOperators {
  BlockSparseMatrix Etilde;
  BlockSparseMatrix E;          // per PressurePenaltyKind::Steady or TimedepCombined
  BlockSparseMatrix E_mu;       // time-dependent split
  BlockSparseMatrix E_rho;
  std::vector<Eigen::VectorXd> rhs_u;  // d scalar-space moment vectors
};
PenaltyOperators penalty_operators(const CartesianMesh& mesh, const Basis& basis,
                                   const ProblemSpec& problem, const PenaltyConfig& penalties);

/// Pressure penalty parameter on a face with local viscosity/density.
double pressure_penalty_value(const ProblemSpec& problem, const PenaltyConfig& pen, double h, double mu,
                              double rho);

/// Full assembly of the saddle-point system on the mesh's finest level.
StokesSystem assemble_stokes(const CartesianMesh& mesh, const Basis& basis, const ProblemSpec& problem,
                             const PenaltyConfig& penalties);

/// Symmetric diagonal scaling by 1/sqrt(mu) on velocity and sqrt(mu) on
/// pressure, folded into the stored operators; alpha/beta are recorded so
/// solutions can be mapped back via x = diag(alpha,beta) x_scaled.
void diagonal_scaling(StokesSystem& system, const CartesianMesh& mesh, const ProblemSpec& problem);

/// Coefficient vectors of the analytic kernel modes, orthonormalized;
/// columns are returned in the joint layout (possibly zero columns removed).
Eigen::MatrixXd kernel_vectors(const CartesianMesh& mesh, const Basis& basis,
                               const std::vector<KernelMode>& modes,
                               const Eigen::VectorXd* inv_scale_alpha = nullptr,
                               const Eigen::VectorXd* inv_scale_beta = nullptr);

}  // namespace stokesmg
