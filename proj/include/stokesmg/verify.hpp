#pragma once

#include "stokesmg/ldg.hpp"
#include "stokesmg/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stokesmg {

/// Smooth sinusoidal reference solution with component- and phase-dependent
/// shifts: u_i(x) = prod_j sin 2 pi (x_j - 0.2 i - 0.25 (chi - 1)) for
/// 1-based component i, and p(x) = mu_chi prod_j sin 2 pi (x_j + 0.2 -
/// 0.25 (chi - 1)). Closed-form first and second derivatives drive the
/// source terms.
struct ManufacturedSolution {
  int dim = 2;
  std::vector<double> mu_phase{1.0};  // pressure prefactor per phase

  double velocity(const Vec3& x, int comp, int chi) const;
  double velocity_deriv(const Vec3& x, int comp, int axis, int chi) const;
  double velocity_deriv2(const Vec3& x, int comp, int axis_a, int axis_b, int chi) const;
  double pressure(const Vec3& x, int chi) const;
  double pressure_deriv(const Vec3& x, int axis, int chi) const;

  Vec3 velocity_vec(const Vec3& x, int chi) const;
  /// Stress sigma * n with sigma = mu (grad u + gamma grad u^T) - p I, for
  /// the given local viscosity value.
  Vec3 stress_normal(const Vec3& x, const Vec3& n, int chi, int gamma, double mu) const;
};

/// Populates all data functions of the problem (momentum source, divergence
/// source, jump data, boundary data) from the manufactured solution.
void attach_manufactured_data(ProblemSpec& problem, const ManufacturedSolution& solution);

/// Analytic kernel basis for the given configuration (see kernel_modes).
std::vector<KernelMode> kernel_basis(const CartesianMesh& mesh, const ProblemSpec& problem);

struct ErrorNorms {
  double u_l2 = 0.0;
  double u_max = 0.0;
  double p_l2 = 0.0;
  double p_max = 0.0;
};

/// Error of a joint solution vector against the exact solution, with kernel
/// modes removed from the discrete error first. The L2 norm uses Gauss
/// quadrature; the max norm samples a 2(p+1)-point tensor grid per element.
/// Scaled systems are unscaled before measuring.
ErrorNorms measure_error(const CartesianMesh& mesh, const Basis& basis, const StokesSystem& sys,
                         const Eigen::VectorXd& x, const ManufacturedSolution& solution);

/// Least-squares slope of log(error) against log(h) over the finest usable
/// grids; data points whose error grew under refinement (conditioning
/// saturation) are dropped from the fit.
struct OrderFit {
  double order = 0.0;
  int points_used = 0;
  bool valid = false;
  std::string reason;
};

OrderFit fit_order(const std::vector<double>& hs, const std::vector<double>& errors, int window = 3);

}  // namespace stokesmg
