// Independent reference computations used by the test suites. Everything here
// recomputes quantities through a different route than the library code it
// checks: dense linear algebra, direct face-by-face quadrature, or finite
// differences.
#pragma once

#include "stokesmg/cases.hpp"
#include "stokesmg/field.hpp"
#include "stokesmg/ldg.hpp"
#include "stokesmg/mesh.hpp"
#include "stokesmg/multigrid.hpp"

#include <random>

namespace oracles {

using namespace stokesmg;

inline Eigen::VectorXd random_coeffs(long n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

// (G_k u, v) evaluated by direct quadrature of the strong-weak form: broken
// derivative integrals plus the flux-difference face terms, all through
// pointwise field evaluation rather than assembled matrices.
inline double gradient_bilinear(const CartesianMesh& mesh, const Basis& basis, int axis,
                                const DgField& u, const DgField& v) {
  const int d = mesh.dim();
  const int q = basis.degree() + 2;
  double total = 0.0;

  // Volume part: integral of (d_axis u) v per element.
  const GaussRule rule = gauss_legendre(q);
  const double h = mesh.element_size();
  int nq = 1;
  for (int k = 0; k < d; ++k) nq *= q;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec3 lo = mesh.element_low_corner(e);
    for (int n = 0; n < nq; ++n) {
      int rem = n;
      Vec3 local = Vec3::Zero();
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        const int i = rem % q;
        rem /= q;
        local[k] = 0.5 * h * (rule.nodes[i] + 1.0);
        w *= 0.5 * h * rule.weights[i];
      }
      // derivative of u at the point via basis derivative evaluation
      Eigen::VectorXd dvals, vals;
      basis.eval_deriv(local, axis, dvals);
      basis.eval(local, vals);
      const double du = dvals.dot(u.segment(e, 0));
      const double vv = vals.dot(v.segment(e, 0));
      total += w * du * vv;
    }
  }

  // Face part: lifting contributions, case by case.
  int nqf = 1;
  for (int k = 0; k < d - 1; ++k) nqf *= q;
  for (const Face& f : mesh.faces()) {
    if (f.axis != axis) continue;
    const double s = f.sign;
    for (int n = 0; n < nqf; ++n) {
      int rem = n;
      Vec3 pt = f.center;
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        if (k == f.axis) continue;
        const int i = rem % q;
        rem /= q;
        pt[k] += 0.5 * h * rule.nodes[i];
        w *= 0.5 * h * rule.weights[i];
      }
      // Trace evaluation from each side. The minus element may sit across a
      // periodic wrap, so evaluate in its own frame.
      auto trace_at = [&](int elem) {
        Vec3 local = pt - mesh.element_low_corner(elem);
        for (int k = 0; k < d; ++k) {
          if (local[k] < -0.5 * h) local[k] += 1.0;  // periodic wrap
          if (local[k] > 1.5 * h) local[k] -= 1.0;
        }
        Eigen::VectorXd vals;
        basis.eval(local, vals);
        return std::pair<double, double>(vals.dot(u.segment(elem, 0)), vals.dot(v.segment(elem, 0)));
      };
      switch (f.kind) {
        case FaceKind::Intraphase: {
          auto [um, vm] = trace_at(f.minus);
          auto [up, vp] = trace_at(f.plus);
          (void)vm;
          total += w * s * (up - um) * vp;
          break;
        }
        case FaceKind::Interphase: {
          auto [um, vm] = trace_at(f.minus);
          auto [up, vp] = trace_at(f.plus);
          total += w * s * ((1.0 - f.lambda) * (up - um) * vm + f.lambda * (up - um) * vp);
          break;
        }
        case FaceKind::Dirichlet: {
          auto [um, vm] = trace_at(f.minus);
          total -= w * s * um * vm;
          break;
        }
        case FaceKind::Stress:
          break;
      }
    }
  }
  return total;
}

// One literal block Gauss-Seidel sweep on the densified operator, following
// x_i <- A_ii^{-1} (b_i - sum_{j != i} A_ij x_j) in the given element order.
inline Eigen::VectorXd dense_gs_sweep(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      Eigen::VectorXd x, int block, const std::vector<int>& order) {
  for (int e : order) {
    Eigen::VectorXd rhs = b.segment(e * block, block);
    for (long f = 0; f * block < a.cols(); ++f) {
      if (f == e) continue;
      rhs -= a.block(e * block, f * block, block, block) * x.segment(f * block, block);
    }
    x.segment(e * block, block) =
        a.block(e * block, e * block, block, block).partialPivLu().solve(rhs);
  }
  return x;
}

// Kernel-orthogonal pseudo-inverse solve of the densified operator.
inline Eigen::VectorXd dense_pseudo_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                          double rel_cutoff = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues();
  const double cutoff = rel_cutoff * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd coeff = es.eigenvectors().transpose() * b;
  for (long i = 0; i < ev.size(); ++i) coeff[i] = (std::abs(ev[i]) > cutoff) ? coeff[i] / ev[i] : 0.0;
  return es.eigenvectors() * coeff;
}

// Central-difference application of the continuum operator
// (rho/delta) u - div(mu (grad u + gamma grad u^T)) + grad p at a point.
inline Vec3 fd_momentum(const ProblemSpec& prob, const ManufacturedSolution& sol, const Vec3& x,
                        int chi, double step) {
  const int d = sol.dim;
  auto vel = [&](const Vec3& p, int i) { return sol.velocity(p, i, chi); };
  auto pres = [&](const Vec3& p) { return sol.pressure(p, chi); };
  auto mu = [&](const Vec3& p) { return prob.mu_at(p, chi); };

  Vec3 f = Vec3::Zero();
  for (int i = 0; i < d; ++i) {
    double acc = prob.timedep() ? prob.rho_at(chi) / prob.delta * vel(x, i) : 0.0;
    for (int j = 0; j < d; ++j) {
      // d/dx_j [ mu (d_j u_i + gamma d_i u_j) ] by nested central differences
      auto flux = [&](const Vec3& p) {
        auto du = [&](int comp, int axis) {
          Vec3 hi = p, lo = p;
          hi[axis] += step;
          lo[axis] -= step;
          return (vel(hi, comp) - vel(lo, comp)) / (2.0 * step);
        };
        double tau = du(i, j);
        if (prob.gamma == 1) tau += du(j, i);
        return mu(p) * tau;
      };
      Vec3 hi = x, lo = x;
      hi[j] += step;
      lo[j] -= step;
      acc -= (flux(hi) - flux(lo)) / (2.0 * step);
    }
    Vec3 hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    acc += (pres(hi) - pres(lo)) / (2.0 * step);
    f[i] = acc;
  }
  return f;
}

}  // namespace oracles
