#include "stokesmg/verify.hpp"

#include <cmath>

namespace stokesmg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double shift_u(int comp, int chi) { return 0.2 * (comp + 1) + 0.25 * (chi - 1); }
double shift_p(int chi) { return -0.2 + 0.25 * (chi - 1); }

}  // namespace

double ManufacturedSolution::velocity(const Vec3& x, int comp, int chi) const {
  const double s = shift_u(comp, chi);
  double prod = 1.0;
  for (int j = 0; j < dim; ++j) prod *= std::sin(kTwoPi * (x[j] - s));
  return prod;
}

double ManufacturedSolution::velocity_deriv(const Vec3& x, int comp, int axis, int chi) const {
  const double s = shift_u(comp, chi);
  double prod = kTwoPi;
  for (int j = 0; j < dim; ++j) {
    const double arg = kTwoPi * (x[j] - s);
    prod *= (j == axis) ? std::cos(arg) : std::sin(arg);
  }
  return prod;
}

double ManufacturedSolution::velocity_deriv2(const Vec3& x, int comp, int axis_a, int axis_b,
                                             int chi) const {
  const double s = shift_u(comp, chi);
  if (axis_a == axis_b) return -kTwoPi * kTwoPi * velocity(x, comp, chi);
  double prod = kTwoPi * kTwoPi;
  for (int j = 0; j < dim; ++j) {
    const double arg = kTwoPi * (x[j] - s);
    prod *= (j == axis_a || j == axis_b) ? std::cos(arg) : std::sin(arg);
  }
  return prod;
}

double ManufacturedSolution::pressure(const Vec3& x, int chi) const {
  const double s = shift_p(chi);
  double prod = mu_phase.at(chi - 1);
  for (int j = 0; j < dim; ++j) prod *= std::sin(kTwoPi * (x[j] - s));
  return prod;
}

double ManufacturedSolution::pressure_deriv(const Vec3& x, int axis, int chi) const {
  const double s = shift_p(chi);
  double prod = mu_phase.at(chi - 1) * kTwoPi;
  for (int j = 0; j < dim; ++j) {
    const double arg = kTwoPi * (x[j] - s);
    prod *= (j == axis) ? std::cos(arg) : std::sin(arg);
  }
  return prod;
}

Vec3 ManufacturedSolution::velocity_vec(const Vec3& x, int chi) const {
  Vec3 u = Vec3::Zero();
  for (int i = 0; i < dim; ++i) u[i] = velocity(x, i, chi);
  return u;
}

Vec3 ManufacturedSolution::stress_normal(const Vec3& x, const Vec3& n, int chi, int gamma,
                                         double mu) const {
  const double p = pressure(x, chi);
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (int j = 0; j < dim; ++j) {
      double tau_ij = velocity_deriv(x, i, j, chi);
      if (gamma == 1) tau_ij += velocity_deriv(x, j, i, chi);
      acc += mu * tau_ij * n[j];
    }
    out[i] = acc - p * n[i];
  }
  return out;
}

void attach_manufactured_data(ProblemSpec& problem, const ManufacturedSolution& sol) {
  const int d = sol.dim;
  const int gamma = problem.gamma;
  // Self-contained captures so the data functions survive copies of the spec.
  const auto mu_phase = problem.mu_phase;
  const auto mu_fn = problem.mu_fn;
  const auto mu_grad_fn = problem.mu_grad_fn;
  const auto rho_phase = problem.rho_phase;
  const double delta = problem.delta;
  auto mu_at = [mu_phase, mu_fn](const Vec3& x, int chi) {
    return mu_fn ? mu_fn(x) : mu_phase.at(chi - 1);
  };

  problem.f_momentum = [sol, d, gamma, mu_at, mu_grad_fn, rho_phase, delta](const Vec3& x, int chi) {
    Vec3 f = Vec3::Zero();
    const double mu = mu_at(x, chi);
    Vec3 grad_mu = Vec3::Zero();
    if (mu_grad_fn) grad_mu = mu_grad_fn(x);
    const double rho_over_delta = rho_phase.empty() ? 0.0 : rho_phase.at(chi - 1) / delta;
    for (int i = 0; i < d; ++i) {
      double acc = rho_over_delta * sol.velocity(x, i, chi);
      for (int j = 0; j < d; ++j) {
        double tau_ij = sol.velocity_deriv(x, i, j, chi);
        double div_tau = sol.velocity_deriv2(x, i, j, j, chi);
        if (gamma == 1) {
          tau_ij += sol.velocity_deriv(x, j, i, chi);
          div_tau += sol.velocity_deriv2(x, j, i, j, chi);
        }
        acc -= grad_mu[j] * tau_ij + mu * div_tau;
      }
      acc += sol.pressure_deriv(x, i, chi);
      f[i] = acc;
    }
    return f;
  };
  problem.f_div = [sol, d](const Vec3& x, int chi) {
    double div = 0.0;
    for (int i = 0; i < d; ++i) div += sol.velocity_deriv(x, i, i, chi);
    return -div;
  };
  problem.g_dirichlet = [sol](const Vec3& x, int chi) { return sol.velocity_vec(x, chi); };
  problem.h_stress = [sol, gamma, mu_at](const Vec3& x, const Vec3& n, int chi) {
    return sol.stress_normal(x, n, chi, gamma, mu_at(x, chi));
  };
  problem.g_jump = [sol](const Vec3& x, int lo, int hi) {
    return Vec3(sol.velocity_vec(x, lo) - sol.velocity_vec(x, hi));
  };
  problem.h_jump = [sol, gamma, mu_at](const Vec3& x, const Vec3& n, int lo, int hi) {
    return Vec3(sol.stress_normal(x, n, lo, gamma, mu_at(x, lo)) -
                sol.stress_normal(x, n, hi, gamma, mu_at(x, hi)));
  };
}

std::vector<KernelMode> kernel_basis(const CartesianMesh& mesh, const ProblemSpec& problem) {
  return kernel_modes(mesh.dim(), mesh.fully_periodic(), mesh.has_dirichlet(), mesh.has_stress(),
                      problem.gamma, problem.timedep());
}

ErrorNorms measure_error(const CartesianMesh& mesh, const Basis& basis, const StokesSystem& sys,
                         const Eigen::VectorXd& x_in, const ManufacturedSolution& sol) {
  const int d = mesh.dim();
  const int nb = basis.size();
  const int nelem = mesh.num_elements();

  Eigen::VectorXd x = x_in;
  if (sys.scaled()) {
    for (int e = 0; e < nelem; ++e) {
      for (int i = 0; i < d; ++i) x.segment(sys.offset(e, i), nb) *= sys.alpha[e];
      x.segment(sys.offset(e, d), nb) *= sys.beta[e];
    }
  }

  // Remove discrete kernel components relative to the projected exact
  // solution, so the reported error ignores the non-unique modes.
  const std::vector<KernelMode> modes = sys.kernel;
  if (!modes.empty()) {
    const VolumeTables vt = make_volume_tables(basis, basis.degree() + 3);
    Eigen::VectorXd x_exact(sys.size());
    Eigen::VectorXd fw(vt.weights.size());
    for (int e = 0; e < nelem; ++e) {
      const Vec3 lo = mesh.element_low_corner(e);
      const int chi = mesh.phase(e);
      for (int c = 0; c <= d; ++c) {
        for (long q = 0; q < vt.weights.size(); ++q) {
          const Vec3 p = lo + vt.points[q];
          const double v = (c < d) ? sol.velocity(p, c, chi) : sol.pressure(p, chi);
          fw[q] = v * vt.weights[q];
        }
        x_exact.segment(sys.offset(e, c), nb) = vt.values.transpose() * fw;
      }
    }
    const Eigen::MatrixXd K = kernel_vectors(mesh, basis, modes);
    x += K * (K.transpose() * (x_exact - x));
  }

  ErrorNorms norms;
  // L2 norms by quadrature of the pointwise error.
  const VolumeTables vt = make_volume_tables(basis, basis.degree() + 3);
  const long nq = vt.weights.size();
  for (int e = 0; e < nelem; ++e) {
    const Vec3 lo = mesh.element_low_corner(e);
    const int chi = mesh.phase(e);
    for (long q = 0; q < nq; ++q) {
      const Vec3 p = lo + vt.points[q];
      double uerr2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const double uh = vt.values.row(q).dot(x.segment(sys.offset(e, i), nb));
        const double du = sol.velocity(p, i, chi) - uh;
        uerr2 += du * du;
      }
      const double ph = vt.values.row(q).dot(x.segment(sys.offset(e, d), nb));
      const double dp = sol.pressure(p, chi) - ph;
      norms.u_l2 += vt.weights[q] * uerr2;
      norms.p_l2 += vt.weights[q] * dp * dp;
    }
  }
  norms.u_l2 = std::sqrt(norms.u_l2);
  norms.p_l2 = std::sqrt(norms.p_l2);

  // Max norms on a dense tensor sample per element.
  const int ns = 2 * (basis.degree() + 1);
  std::vector<double> ticks(ns);
  for (int i = 0; i < ns; ++i) ticks[i] = basis.h() * i / (ns - 1);
  int npts = 1;
  for (int k = 0; k < d; ++k) npts *= ns;
  Eigen::VectorXd vals;
  for (int e = 0; e < nelem; ++e) {
    const Vec3 lo = mesh.element_low_corner(e);
    const int chi = mesh.phase(e);
    for (int n = 0; n < npts; ++n) {
      int rem = n;
      Vec3 local = Vec3::Zero();
      for (int k = 0; k < d; ++k) {
        local[k] = ticks[rem % ns];
        rem /= ns;
      }
      basis.eval(local, vals);
      const Vec3 p = lo + local;
      for (int i = 0; i < d; ++i) {
        const double uh = vals.dot(x.segment(sys.offset(e, i), nb));
        norms.u_max = std::max(norms.u_max, std::abs(sol.velocity(p, i, chi) - uh));
      }
      const double ph = vals.dot(x.segment(sys.offset(e, d), nb));
      norms.p_max = std::max(norms.p_max, std::abs(sol.pressure(p, chi) - ph));
    }
  }
  return norms;
}

OrderFit fit_order(const std::vector<double>& hs, const std::vector<double>& errors, int window) {
  OrderFit fit;
  if (hs.size() != errors.size() || hs.size() < 2) {
    fit.reason = "need at least two grids";
    return fit;
  }
  // Grids ordered coarse to fine; drop points once the error stops
  // decreasing under refinement (conditioning saturation).
  std::vector<double> lh, le;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!lh.empty() && errors[i] >= errors[i - 1]) break;
    lh.push_back(std::log(hs[i]));
    le.push_back(std::log(errors[i]));
  }
  if (static_cast<int>(lh.size()) < 3) {
    fit.reason = "fewer than 3 usable grids";
    return fit;
  }
  const int use = std::min<int>(window, static_cast<int>(lh.size()));
  const int start = static_cast<int>(lh.size()) - use;
  double mx = 0.0, my = 0.0;
  for (int i = start; i < static_cast<int>(lh.size()); ++i) {
    mx += lh[i];
    my += le[i];
  }
  mx /= use;
  my /= use;
  double sxx = 0.0, sxy = 0.0;
  for (int i = start; i < static_cast<int>(lh.size()); ++i) {
    sxx += (lh[i] - mx) * (lh[i] - mx);
    sxy += (lh[i] - mx) * (le[i] - my);
  }
  fit.order = sxy / sxx;
  fit.points_used = use;
  fit.valid = true;
  return fit;
}

}  // namespace stokesmg
