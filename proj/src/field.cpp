#include "stokesmg/field.hpp"

#include <stdexcept>

namespace stokesmg {

DgField make_field(const CartesianMesh& mesh, const Basis& basis, FieldShape shape) {
  DgField f;
  f.shape = shape;
  f.dim = mesh.dim();
  f.nb = basis.size();
  f.coeffs = Eigen::VectorXd::Zero(static_cast<long>(mesh.num_elements()) * f.components() * f.nb);
  return f;
}

BlockSparseMatrix mass_matrix(const CartesianMesh& mesh, const Basis& basis,
                              const std::function<double(const Vec3&, int)>& weight, int q) {
  const VolumeTables tables = make_volume_tables(basis, q);
  const int nb = basis.size();
  const int nq = static_cast<int>(tables.weights.size());
  BlockSparseMatrix m(mesh.num_elements(), mesh.num_elements(), nb, nb);
  Eigen::VectorXd wq(nq);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec3 lo = mesh.element_low_corner(e);
    const int chi = mesh.phase(e);
    for (int n = 0; n < nq; ++n) {
      const double w = weight(lo + tables.points[n], chi);
      if (!(w > 0.0)) throw std::invalid_argument("mass_matrix: weight must be positive");
      wq[n] = w * tables.weights[n];
    }
    m.block_ref(e, e).noalias() = tables.values.transpose() * wq.asDiagonal() * tables.values;
  }
  return m;
}

DgField l2_project(const CartesianMesh& mesh, const Basis& basis, FieldShape shape,
                   const std::function<double(const Vec3&, int chi, int comp)>& fn, int q) {
  const VolumeTables tables = make_volume_tables(basis, q);
  DgField field = make_field(mesh, basis, shape);
  const int nq = static_cast<int>(tables.weights.size());
  const int ncomp = field.components();
  Eigen::VectorXd fw(nq);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec3 lo = mesh.element_low_corner(e);
    const int chi = mesh.phase(e);
    for (int c = 0; c < ncomp; ++c) {
      for (int n = 0; n < nq; ++n) fw[n] = fn(lo + tables.points[n], chi, c) * tables.weights[n];
      field.segment(e, c).noalias() = tables.values.transpose() * fw;
    }
  }
  return field;
}

double eval_field(const CartesianMesh& mesh, const Basis& basis, const DgField& field, int elem,
                  const Vec3& x, int comp) {
  const Vec3 local = x - mesh.element_low_corner(elem);
  Eigen::VectorXd values;
  basis.eval(local, values);
  return values.dot(field.segment(elem, comp));
}

double eval_field(const CartesianMesh& mesh, const Basis& basis, const DgField& field, const Vec3& x,
                  int comp) {
  return eval_field(mesh, basis, field, mesh.locate(x), x, comp);
}

}  // namespace stokesmg
