#pragma once

#include "stokesmg/basis.hpp"
#include "stokesmg/block_matrix.hpp"
#include "stokesmg/mesh.hpp"

#include <functional>

namespace stokesmg {

enum class FieldShape { Scalar, Vector, Matrix };

/// Coefficient vector of a piecewise polynomial field over the mesh, laid out
/// element-major with components inner: [element][component][basis].
struct DgField {
  FieldShape shape = FieldShape::Scalar;
  int dim = 2;
  int nb = 0;  // basis functions per element per component
  Eigen::VectorXd coeffs;

  int components() const {
    switch (shape) {
      case FieldShape::Scalar: return 1;
      case FieldShape::Vector: return dim;
      case FieldShape::Matrix: return dim * dim;
    }
    return 1;
  }
  long offset(int elem, int comp) const { return (static_cast<long>(elem) * components() + comp) * nb; }
  auto segment(int elem, int comp) { return coeffs.segment(offset(elem, comp), nb); }
  auto segment(int elem, int comp) const { return coeffs.segment(offset(elem, comp), nb); }
};

DgField make_field(const CartesianMesh& mesh, const Basis& basis, FieldShape shape);

/// Block-diagonal mass matrix weighted by a positive function of position and
/// phase; the unweighted matrix is the identity for the orthonormal basis.
/// Rejects weights that are not strictly positive at quadrature nodes.
BlockSparseMatrix mass_matrix(const CartesianMesh& mesh, const Basis& basis,
                              const std::function<double(const Vec3&, int)>& weight, int q);

/// Element-wise L^2 projection of a function given per component.
DgField l2_project(const CartesianMesh& mesh, const Basis& basis, FieldShape shape,
                   const std::function<double(const Vec3&, int chi, int comp)>& fn, int q);

/// Value of component `comp` of the field on element `elem` at physical point
/// x (trace evaluation when x lies on the element boundary).
double eval_field(const CartesianMesh& mesh, const Basis& basis, const DgField& field, int elem,
                  const Vec3& x, int comp = 0);

/// Same, locating the owning element from an interior point.
double eval_field(const CartesianMesh& mesh, const Basis& basis, const DgField& field, const Vec3& x,
                  int comp = 0);

}  // namespace stokesmg
