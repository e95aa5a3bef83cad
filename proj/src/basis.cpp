#include "stokesmg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace stokesmg {

GaussRule gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: q >= 1 required");
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  if (q == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  // Golub-Welsch: eigenvalues of the Jacobi matrix, then one Newton polish.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  for (int i = 0; i < q; ++i) {
    double t = es.eigenvalues()[i];
    for (int it = 0; it < 2; ++it) {
      const double f = legendre(q, t);
      const double df = legendre_deriv(q, t);
      t -= f / df;
    }
    const double df = legendre_deriv(q, t);
    rule.nodes[i] = t;
    rule.weights[i] = 2.0 / ((1.0 - t * t) * df * df);
  }
  return rule;
}

double legendre(int k, double t) {
  double pm1 = 1.0, p = t;
  if (k == 0) return 1.0;
  for (int m = 2; m <= k; ++m) {
    const double pm2 = pm1;
    pm1 = p;
    p = ((2 * m - 1) * t * pm1 - (m - 1) * pm2) / m;
  }
  return p;
}

double legendre_deriv(int k, double t) {
  if (k == 0) return 0.0;
  double pm1 = 1.0, p = t;
  double dpm1 = 0.0, dp = 1.0;
  for (int m = 2; m <= k; ++m) {
    const double pm2 = pm1, dpm2 = dpm1;
    pm1 = p;
    dpm1 = dp;
    p = ((2 * m - 1) * t * pm1 - (m - 1) * pm2) / m;
    dp = ((2 * m - 1) * (pm1 + t * dpm1) - (m - 1) * dpm2) / m;
  }
  return dp;
}

Basis::Basis(int dim, int degree, double h) : dim_(dim), degree_(degree), h_(h) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("Basis: dim must be 1, 2, or 3");
  if (degree < 1) throw std::invalid_argument("Basis: degree >= 1 required");
  if (!(h > 0.0)) throw std::invalid_argument("Basis: element size must be positive");
  size_ = 1;
  for (int k = 0; k < dim; ++k) size_ *= degree + 1;
  norm_.resize(degree + 1);
  for (int k = 0; k <= degree; ++k) norm_[k] = std::sqrt((2.0 * k + 1.0) / h);
}

double Basis::eval1d(int k, double x) const {
  return norm_[k] * legendre(k, 2.0 * x / h_ - 1.0);
}

double Basis::eval1d_deriv(int k, double x) const {
  return norm_[k] * legendre_deriv(k, 2.0 * x / h_ - 1.0) * (2.0 / h_);
}

std::array<int, 3> Basis::decode(int a) const {
  std::array<int, 3> idx{0, 0, 0};
  const int m = degree_ + 1;
  for (int k = 0; k < dim_; ++k) {
    idx[k] = a % m;
    a /= m;
  }
  return idx;
}

void Basis::eval(const Vec3& local, Eigen::VectorXd& values) const {
  values.resize(size_);
  std::array<Eigen::VectorXd, 3> v1d;
  for (int k = 0; k < dim_; ++k) {
    v1d[k].resize(degree_ + 1);
    for (int m = 0; m <= degree_; ++m) v1d[k][m] = eval1d(m, local[k]);
  }
  for (int a = 0; a < size_; ++a) {
    const auto idx = decode(a);
    double prod = 1.0;
    for (int k = 0; k < dim_; ++k) prod *= v1d[k][idx[k]];
    values[a] = prod;
  }
}

void Basis::eval_deriv(const Vec3& local, int axis, Eigen::VectorXd& values) const {
  values.resize(size_);
  std::array<Eigen::VectorXd, 3> v1d;
  for (int k = 0; k < dim_; ++k) {
    v1d[k].resize(degree_ + 1);
    for (int m = 0; m <= degree_; ++m)
      v1d[k][m] = (k == axis) ? eval1d_deriv(m, local[k]) : eval1d(m, local[k]);
  }
  for (int a = 0; a < size_; ++a) {
    const auto idx = decode(a);
    double prod = 1.0;
    for (int k = 0; k < dim_; ++k) prod *= v1d[k][idx[k]];
    values[a] = prod;
  }
}

VolumeTables make_volume_tables(const Basis& basis, int q) {
  const int d = basis.dim();
  const GaussRule rule = gauss_legendre(q);
  int nq = 1;
  for (int k = 0; k < d; ++k) nq *= q;

  VolumeTables tables;
  tables.q = q;
  tables.points.resize(nq);
  tables.weights.resize(nq);
  const double half_h = 0.5 * basis.h();
  for (int n = 0; n < nq; ++n) {
    int rem = n;
    double w = 1.0;
    Vec3 x = Vec3::Zero();
    for (int k = 0; k < d; ++k) {
      const int i = rem % q;
      rem /= q;
      x[k] = half_h * (rule.nodes[i] + 1.0);
      w *= half_h * rule.weights[i];
    }
    tables.points[n] = x;
    tables.weights[n] = w;
  }

  const int nb = basis.size();
  tables.values.resize(nq, nb);
  Eigen::VectorXd row;
  for (int n = 0; n < nq; ++n) {
    basis.eval(tables.points[n], row);
    tables.values.row(n) = row.transpose();
  }
  for (int axis = 0; axis < d; ++axis) {
    tables.deriv[axis].resize(nq, nb);
    for (int n = 0; n < nq; ++n) {
      basis.eval_deriv(tables.points[n], axis, row);
      tables.deriv[axis].row(n) = row.transpose();
    }
  }
  return tables;
}

FaceTables make_face_tables(const Basis& basis, int axis, int q) {
  const int d = basis.dim();
  const GaussRule rule = gauss_legendre(q);
  int nqf = 1;
  for (int k = 0; k < d - 1; ++k) nqf *= q;

  FaceTables tables;
  tables.axis = axis;
  tables.q = q;
  tables.points.resize(nqf);
  tables.weights.resize(nqf);
  const double half_h = 0.5 * basis.h();
  for (int n = 0; n < nqf; ++n) {
    int rem = n;
    double w = 1.0;
    Vec3 x = Vec3::Zero();
    for (int k = 0; k < d; ++k) {
      if (k == axis) continue;
      const int i = rem % q;
      rem /= q;
      x[k] = half_h * (rule.nodes[i] + 1.0);
      w *= half_h * rule.weights[i];
    }
    tables.points[n] = x;
    tables.weights[n] = w;
  }

  const int nb = basis.size();
  tables.trace_hi.resize(nqf, nb);
  tables.trace_lo.resize(nqf, nb);
  Eigen::VectorXd row;
  for (int n = 0; n < nqf; ++n) {
    Vec3 x = tables.points[n];
    x[axis] = basis.h();
    basis.eval(x, row);
    tables.trace_hi.row(n) = row.transpose();
    x[axis] = 0.0;
    basis.eval(x, row);
    tables.trace_lo.row(n) = row.transpose();
  }
  return tables;
}

}  // namespace stokesmg
