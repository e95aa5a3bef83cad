#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace stokesmg {

using ApplyFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // preconditioned norms, [0] = initial
  double rho = 0.0;                      // (||r_n|| / ||r_0||)^(1/n)
  bool converged = false;
  bool breakdown = false;
  double wall_time = 0.0;
  double tol = 0.0;
  int max_iter = 0;
  std::uint64_t seed = 0;
};

/// Non-restarted GMRES with modified Gram-Schmidt, left-preconditioned by
/// apply_v (pass an identity function for none). Stops when the
/// preconditioned residual has dropped by `tol` relative to its initial
/// value, or at max_iter.
std::pair<Eigen::VectorXd, SolveReport> gmres(const ApplyFn& apply_a, const ApplyFn& apply_v,
                                              const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                                              double tol, int max_iter);

/// Uniform [-1,1] coefficients from a seeded mt19937_64 stream.
Eigen::VectorXd random_vector(long n, std::uint64_t seed);

/// Average residual reduction factor per iteration: zero right-hand side,
/// seeded random initial guess, 1e-8 reduction target. Non-convergence is
/// reported as rho = 1 with the flag cleared.
SolveReport convergence_rate(const ApplyFn& apply_a, const ApplyFn& apply_v, long n, std::uint64_t seed,
                             double tol = 1e-8, int max_iter = 200);

struct SpectrumReport {
  std::vector<std::complex<double>> ritz;
  double max_real = 0.0;
  double min_real = 0.0;  // excluding kernel-induced near-zeros
  double max_imag = 0.0;
  double exclusion_cutoff = 0.0;
  int excluded = 0;
};

/// Ritz values of the preconditioned operator from the Arnoldi Hessenberg
/// matrix, with a seeded random start vector. Values of modulus below
/// 1e-8 * max|lambda| are excluded from the min-real statistic.
SpectrumReport spectrum_estimate(const ApplyFn& apply_a, const ApplyFn& apply_v, long n, int krylov_dim,
                                 std::uint64_t seed);

}  // namespace stokesmg
