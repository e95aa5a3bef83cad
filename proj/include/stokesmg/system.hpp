#pragma once

#include "stokesmg/block_matrix.hpp"
#include "stokesmg/mesh.hpp"

#include <array>
#include <vector>

namespace stokesmg {

/// Analytic kernel modes of the Stokes operator, by boundary-condition type.
enum class KernelModeKind { ConstVelocity, ConstPressure, Rotation };

struct KernelMode {
  KernelModeKind kind;
  int axis_a = 0;  // velocity component (ConstVelocity) or first rotation axis
  int axis_b = 1;  // second rotation axis
};

std::vector<KernelMode> kernel_modes(int dim, bool fully_periodic, bool any_dirichlet, bool any_stress,
                                     int gamma, bool timedep);

/// Assembled 2x2 block saddle-point operator. Unknowns are stored
/// element-major, per element the d velocity components then pressure, each a
/// block of nb coefficients. The operator is represented by its scalar-space
/// pieces; the viscous block A is kept materialized when it fits in memory
/// and otherwise applied through G and the weighted mass matrix.
struct StokesSystem {
  int dim = 2;
  int degree = 1;
  int nb = 0;
  int nelem = 0;
  int gamma = 0;
  bool timedep = false;
  double delta = 0.0;

  std::array<BlockSparseMatrix, 3> G;  // dim entries used
  BlockSparseMatrix M_mu;
  BlockSparseMatrix M_rho;             // time-dependent only
  BlockSparseMatrix Etilde;            // velocity penalty; may hold no blocks
  BlockSparseMatrix E;                 // pressure penalty (effective)
  BlockSparseMatrix E_mu, E_rho;       // time-dependent split, kept for coarsening
  std::vector<BlockSparseMatrix> A;    // empty, or 1 (gamma=0, shared diag), or dim*dim row-major

  Eigen::VectorXd b;
  std::vector<KernelMode> kernel;
  std::vector<int> phase;              // per element

  Eigen::VectorXd alpha, beta;         // recorded diagonal scaling; empty when unscaled

  int joint_block() const { return (dim + 1) * nb; }
  long size() const { return static_cast<long>(nelem) * joint_block(); }
  bool scaled() const { return alpha.size() > 0; }
  bool has_A() const { return !A.empty(); }
  const BlockSparseMatrix& A_block(int i, int j) const;

  long offset(int e, int comp) const { return (static_cast<long>(e) * (dim + 1) + comp) * nb; }

  /// Build A from G, M_mu, Etilde (and the M_rho shift stays separate).
  void materialize_A();
  void drop_A();
  /// Rebuild the transpose indices of G; call after G changes.
  void build_indices();

  /// y = A x.
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Action of block row e, excluding the (e,e) diagonal block, into y_e
  /// (size joint_block(), overwritten). Reads current values of x.
  void row_apply_offdiag(int e, const Eigen::VectorXd& x, Eigen::VectorXd& y_e) const;
  /// Dense joint diagonal block of element e.
  Eigen::MatrixXd diag_block(int e) const;
  /// Dense form of the whole operator; materializes A if needed (small
  /// systems only).
  Eigen::MatrixXd dense() const;

  /// || A - A^T ||_F and ||A||_F computed blockwise.
  std::pair<double, double> symmetry_error() const;

private:
  std::array<BlockSparseMatrix::ColumnIndex, 3> gcol_;
  void composed_row_apply(int e, const Eigen::VectorXd& x, Eigen::VectorXd& y_e, bool skip_diag) const;
};

/// Estimated bytes to store the materialized viscous block.
long estimate_A_bytes(int dim, int gamma, int nelem, int nb);

}  // namespace stokesmg
