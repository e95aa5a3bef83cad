#include "stokesmg/krylov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace stokesmg {

namespace {

double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

Eigen::VectorXd random_vector(long n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

std::pair<Eigen::VectorXd, SolveReport> gmres(const ApplyFn& apply_a, const ApplyFn& apply_v,
                                              const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                                              double tol, int max_iter) {
  const double t0 = wall_seconds();
  const long n = b.size();
  SolveReport report;
  report.tol = tol;
  report.max_iter = max_iter;

  Eigen::VectorXd tmp(n), r(n);
  apply_a(x0, tmp);
  tmp = b - tmp;
  apply_v(tmp, r);

  const double r0 = r.norm();
  report.residual_history.push_back(r0);
  if (r0 == 0.0) {
    report.converged = true;
    report.wall_time = wall_seconds() - t0;
    return {x0, report};
  }
  const double target = tol * r0;

  std::vector<Eigen::VectorXd> basis;
  basis.reserve(max_iter + 1);
  basis.push_back(r / r0);

  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(max_iter + 1, max_iter);
  Eigen::VectorXd cs(max_iter), sn(max_iter);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(max_iter + 1);
  g[0] = r0;

  int m = 0;
  bool converged = false, breakdown = false;
  Eigen::VectorXd w(n);
  for (int j = 0; j < max_iter; ++j) {
    apply_a(basis[j], tmp);
    apply_v(tmp, w);
    for (int i = 0; i <= j; ++i) {
      hess(i, j) = basis[i].dot(w);
      w.noalias() -= hess(i, j) * basis[i];
    }
    const double wnorm = w.norm();
    hess(j + 1, j) = wnorm;

    // Givens rotations keep the least-squares residual explicit.
    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
      hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
      hess(i, j) = t;
    }
    const double denom = std::hypot(hess(j, j), hess(j + 1, j));
    cs[j] = hess(j, j) / denom;
    sn[j] = hess(j + 1, j) / denom;
    hess(j, j) = denom;
    hess(j + 1, j) = 0.0;
    g[j + 1] = -sn[j] * g[j];
    g[j] = cs[j] * g[j];

    m = j + 1;
    const double res = std::abs(g[j + 1]);
    report.residual_history.push_back(res);
    if (res <= target) {
      converged = true;
      break;
    }
    if (wnorm <= 1e-14 * r0) {
      breakdown = true;  // Arnoldi breakdown with a nonzero residual
      break;
    }
    basis.push_back(w / wnorm);
  }

  Eigen::VectorXd y = hess.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(g.head(m));
  Eigen::VectorXd x = x0;
  for (int i = 0; i < m; ++i) x.noalias() += y[i] * basis[i];

  report.iterations = m;
  report.converged = converged;
  report.breakdown = breakdown;
  const double rn = report.residual_history.back();
  report.rho = (m > 0) ? std::exp(std::log(rn / r0) / m) : 0.0;
  report.wall_time = wall_seconds() - t0;
  return {x, report};
}

SolveReport convergence_rate(const ApplyFn& apply_a, const ApplyFn& apply_v, long n, std::uint64_t seed,
                             double tol, int max_iter) {
  const Eigen::VectorXd x0 = random_vector(n, seed);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  auto [x, report] = gmres(apply_a, apply_v, b, x0, tol, max_iter);
  (void)x;
  report.seed = seed;
  if (!report.converged) report.rho = 1.0;
  return report;
}

SpectrumReport spectrum_estimate(const ApplyFn& apply_a, const ApplyFn& apply_v, long n, int krylov_dim,
                                 std::uint64_t seed) {
  Eigen::VectorXd v = random_vector(n, seed);
  v /= v.norm();
  std::vector<Eigen::VectorXd> basis{v};
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(krylov_dim + 1, krylov_dim);
  Eigen::VectorXd tmp(n), w(n);

  int m = 0;
  for (int j = 0; j < krylov_dim; ++j) {
    apply_a(basis[j], tmp);
    apply_v(tmp, w);
    for (int i = 0; i <= j; ++i) {
      hess(i, j) = basis[i].dot(w);
      w.noalias() -= hess(i, j) * basis[i];
    }
    hess(j + 1, j) = w.norm();
    m = j + 1;
    if (hess(j + 1, j) <= 1e-14) break;  // invariant subspace found
    basis.push_back(w / hess(j + 1, j));
  }

  SpectrumReport report;
  const Eigen::MatrixXd hm = hess.topLeftCorner(m, m);
  Eigen::EigenSolver<Eigen::MatrixXd> es(hm);
  report.ritz.resize(m);
  double max_mod = 0.0;
  for (int i = 0; i < m; ++i) {
    report.ritz[i] = es.eigenvalues()[i];
    max_mod = std::max(max_mod, std::abs(report.ritz[i]));
  }
  report.exclusion_cutoff = 1e-8 * max_mod;
  report.max_real = -std::numeric_limits<double>::infinity();
  report.min_real = std::numeric_limits<double>::infinity();
  report.max_imag = 0.0;
  for (const auto& lambda : report.ritz) {
    report.max_real = std::max(report.max_real, lambda.real());
    report.max_imag = std::max(report.max_imag, std::abs(lambda.imag()));
    if (std::abs(lambda) < report.exclusion_cutoff) {
      ++report.excluded;
      continue;
    }
    report.min_real = std::min(report.min_real, lambda.real());
  }
  return report;
}

}  // namespace stokesmg
