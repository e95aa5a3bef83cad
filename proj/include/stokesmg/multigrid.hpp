#pragma once

#include "stokesmg/ldg.hpp"
#include "stokesmg/system.hpp"

#include <memory>

namespace stokesmg {

/// Injection interpolation between two hierarchy levels: a coarse polynomial
/// is copied onto its 2^d children. The per-octant coefficient blocks are the
/// same for every element of a uniform mesh. Restriction is the L^2
/// projection, which for the orthonormal basis is the plain transpose.
struct InjectionOp {
  int dim = 2;
  int nb = 0;
  int n_fine = 0;
  int n_coarse = 0;
  std::vector<int> parent;      // fine element -> coarse element
  std::vector<int> octant;      // fine element -> child position
  std::vector<Eigen::MatrixXd> child_block;  // nb x nb per octant

  /// xf = I xc on scalar coefficient vectors.
  void prolong_scalar(const Eigen::VectorXd& xc, Eigen::VectorXd& xf) const;
  /// xc = I^T xf.
  void restrict_scalar(const Eigen::VectorXd& xf, Eigen::VectorXd& xc) const;
  /// Joint-layout (d velocity components + pressure) variants.
  void prolong_joint(const Eigen::VectorXd& xc, Eigen::VectorXd& xf) const;
  void restrict_joint(const Eigen::VectorXd& xf, Eigen::VectorXd& xc) const;

  /// Explicit block-matrix form (tests and small problems).
  BlockSparseMatrix as_block_matrix() const;
};

InjectionOp make_injection(const Basis& fine_basis, const HierarchyMap& map, int fine_level);

/// I^T X I with an optional prefactor, streamed over the fine blocks.
BlockSparseMatrix galerkin_coarsen(const InjectionOp& inj, const BlockSparseMatrix& x, double prefactor);

/// Coarse-level operators for the steady system: Galerkin products of the
/// mass and gradient operators, penalty operators rescaled by 1/2 and 2, and
/// the viscous block rebuilt from the coarsened pieces.
StokesSystem coarsen_steady(const StokesSystem& fine, const InjectionOp& inj);

/// Time-dependent variant: additionally coarsens the density mass matrix and
/// the split pressure penalties, recombining them blockwise by the
/// Frobenius-norm weighting.
StokesSystem coarsen_timedep(const StokesSystem& fine, const InjectionOp& inj);

/// Blockwise recombination of the split pressure penalty operators.
BlockSparseMatrix recombine_pressure_penalty(const BlockSparseMatrix& e_mu, const BlockSparseMatrix& e_rho);

/// Greedy multicoloring of the element coupling graph (edge wherever any
/// off-diagonal block of the operator is present). Colors are ordered by
/// index, elements lexicographic within each color.
std::vector<std::vector<int>> color_elements(const StokesSystem& sys);

/// Factorization of one element's joint diagonal block. Small blocks use a
/// plain pivoted LU; large 3D blocks use a pressure Schur complement solve on
/// top of the velocity block to cut memory, with a dense fallback if either
/// factor looks singular.
class MiniBlockSolver {
public:
  MiniBlockSolver() = default;
  MiniBlockSolver(const StokesSystem& sys, int elem, bool force_dense);
  void solve_in_place(Eigen::VectorXd& r) const;

private:
  int dim_ = 0, nb_ = 0;
  bool dense_ = true;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;       // dense path
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_uu_;    // Schur path
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_s_;
  Eigen::MatrixXd g_;                             // nb*d x nb coupling (velocity, pressure)
};

struct MgOptions {
  int nu1 = 3;
  int nu2 = 3;
  double eps_snap = 1e-10;
};

struct MgLevel {
  StokesSystem sys;
  std::vector<std::vector<int>> colors;
  std::vector<MiniBlockSolver> factors;
  InjectionOp from_coarser;  // transfer from the next coarser level; unused on the bottom
};

/// Bottom-level pseudo-inverse through the symmetric eigendecomposition,
/// with near-zero eigenvalues snapped to exactly zero.
struct BottomSolver {
  Eigen::MatrixXd q;
  Eigen::VectorXd inv_eigenvalues;  // zero where snapped
  int snapped = 0;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
};

struct MgHierarchy {
  std::vector<MgLevel> levels;  // finest first
  BottomSolver bottom;
  MgOptions options;

  int num_levels() const { return static_cast<int>(levels.size()); }
};

MgHierarchy build_mg_hierarchy(StokesSystem fine, const Basis& basis, const HierarchyMap& map,
                               const MgOptions& options);

/// One multicolored block Gauss-Seidel sweep (in place, latest values).
void smooth(const MgLevel& level, Eigen::VectorXd& x, const Eigen::VectorXd& b, int sweeps);

/// Multigrid V-cycle from the given level down.
void vcycle(const MgHierarchy& mg, int level, Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Full V-cycle from the finest level; x is updated in place.
void vcycle(const MgHierarchy& mg, Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Bottom solve on the coarsest level's operator.
Eigen::VectorXd bottom_solve(const MgHierarchy& mg, const Eigen::VectorXd& b);

}  // namespace stokesmg
