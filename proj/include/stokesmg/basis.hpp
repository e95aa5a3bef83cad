#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace stokesmg {

using Vec3 = Eigen::Vector3d;

/// One-dimensional Gauss-Legendre rule on [-1,1]; exact for degree <= 2q-1.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussRule gauss_legendre(int q);

/// Legendre polynomial P_k and derivative at t in [-1,1].
double legendre(int k, double t);
double legendre_deriv(int k, double t);

/// Tensor-product Legendre basis on isotropic elements of size h, scaled so
/// that the element mass matrix is the identity. Multi-index a decodes with
/// axis 0 fastest: a = k0 + (p+1)*k1 + (p+1)^2*k2.
class Basis {
public:
  Basis(int dim, int degree, double h);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  double h() const { return h_; }
  int size() const { return size_; }

  /// Value of 1D factor k at local coordinate x in [0,h].
  double eval1d(int k, double x) const;
  double eval1d_deriv(int k, double x) const;

  /// All basis values at a local point (coordinates relative to the element
  /// low corner). Only the first dim() entries of `local` are read.
  void eval(const Vec3& local, Eigen::VectorXd& values) const;
  /// Values of d/dx_axis at a local point.
  void eval_deriv(const Vec3& local, int axis, Eigen::VectorXd& values) const;

  /// Decompose flat index into per-axis 1D degrees.
  std::array<int, 3> decode(int a) const;

private:
  int dim_;
  int degree_;
  double h_;
  int size_;
  Eigen::VectorXd norm_;  // per-1D-degree normalization sqrt((2k+1)/h)
};

/// Volume quadrature tables on one element: basis (and derivative) values at
/// tensor Gauss points, plus physical weights. All elements of a uniform mesh
/// share these tables.
struct VolumeTables {
  int q = 0;                             // points per axis
  Eigen::MatrixXd values;                // nq x nb
  std::array<Eigen::MatrixXd, 3> deriv;  // nq x nb per axis
  Eigen::VectorXd weights;               // nq, physical measure
  std::vector<Vec3> points;              // local coordinates
};

VolumeTables make_volume_tables(const Basis& basis, int q);

/// Face quadrature tables for faces orthogonal to one axis: traces of the
/// element basis from the "high" side (element below the face, evaluated at
/// x_axis = h) and the "low" side (element above, at x_axis = 0).
struct FaceTables {
  int axis = 0;
  int q = 0;
  Eigen::MatrixXd trace_hi;   // nqf x nb, from the element under the face
  Eigen::MatrixXd trace_lo;   // nqf x nb, from the element above the face
  Eigen::VectorXd weights;    // nqf, physical (d-1)-measure
  std::vector<Vec3> points;   // local tangential coordinates; points[axis]=0
};

FaceTables make_face_tables(const Basis& basis, int axis, int q);

}  // namespace stokesmg
