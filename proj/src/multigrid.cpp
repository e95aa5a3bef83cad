#include "stokesmg/multigrid.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace stokesmg {

void InjectionOp::prolong_scalar(const Eigen::VectorXd& xc, Eigen::VectorXd& xf) const {
  xf.resize(static_cast<long>(n_fine) * nb);
  for (int e = 0; e < n_fine; ++e)
    xf.segment(static_cast<long>(e) * nb, nb).noalias() =
        child_block[octant[e]] * xc.segment(static_cast<long>(parent[e]) * nb, nb);
}

void InjectionOp::restrict_scalar(const Eigen::VectorXd& xf, Eigen::VectorXd& xc) const {
  xc.setZero(static_cast<long>(n_coarse) * nb);
  for (int e = 0; e < n_fine; ++e)
    xc.segment(static_cast<long>(parent[e]) * nb, nb).noalias() +=
        child_block[octant[e]].transpose() * xf.segment(static_cast<long>(e) * nb, nb);
}

void InjectionOp::prolong_joint(const Eigen::VectorXd& xc, Eigen::VectorXd& xf) const {
  const int ncomp = dim + 1;
  xf.resize(static_cast<long>(n_fine) * ncomp * nb);
  for (int e = 0; e < n_fine; ++e) {
    const auto& blk = child_block[octant[e]];
    for (int c = 0; c < ncomp; ++c)
      xf.segment((static_cast<long>(e) * ncomp + c) * nb, nb).noalias() =
          blk * xc.segment((static_cast<long>(parent[e]) * ncomp + c) * nb, nb);
  }
}

void InjectionOp::restrict_joint(const Eigen::VectorXd& xf, Eigen::VectorXd& xc) const {
  const int ncomp = dim + 1;
  xc.setZero(static_cast<long>(n_coarse) * ncomp * nb);
  for (int e = 0; e < n_fine; ++e) {
    const auto& blk = child_block[octant[e]];
    for (int c = 0; c < ncomp; ++c)
      xc.segment((static_cast<long>(parent[e]) * ncomp + c) * nb, nb).noalias() +=
          blk.transpose() * xf.segment((static_cast<long>(e) * ncomp + c) * nb, nb);
  }
}

BlockSparseMatrix InjectionOp::as_block_matrix() const {
  BlockSparseMatrix m(n_fine, n_coarse, nb, nb);
  for (int e = 0; e < n_fine; ++e) m.block_ref(e, parent[e]) = child_block[octant[e]];
  return m;
}

InjectionOp make_injection(const Basis& fine_basis, const HierarchyMap& map, int fine_level) {
  if (fine_level + 1 >= map.num_levels())
    throw std::invalid_argument("make_injection: no coarser level");
  const int d = fine_basis.dim();
  const int p = fine_basis.degree();
  const int nb = fine_basis.size();
  const int nf = map.cells_per_axis[fine_level];

  InjectionOp inj;
  inj.dim = d;
  inj.nb = nb;
  inj.parent = map.parent[fine_level];
  inj.n_fine = static_cast<int>(map.phase[fine_level].size());
  inj.n_coarse = static_cast<int>(map.phase[fine_level + 1].size());

  // Child position within the parent from the cell indices.
  inj.octant.resize(inj.n_fine);
  for (int e = 0; e < inj.n_fine; ++e) {
    int rem = e, oct = 0;
    for (int k = 0; k < d; ++k) {
      const int ik = rem % nf;
      rem /= nf;
      oct |= (ik & 1) << k;
    }
    inj.octant[e] = oct;
  }

  // Exact L^2 moments of coarse basis functions on each child element; the
  // resulting blocks are independent of the element size.
  const double hf = fine_basis.h();
  const Basis coarse_basis(d, p, 2.0 * hf);
  const VolumeTables vt = make_volume_tables(fine_basis, p + 1);
  const int noct = 1 << d;
  inj.child_block.resize(noct);
  Eigen::VectorXd cvals;
  for (int oct = 0; oct < noct; ++oct) {
    Eigen::MatrixXd coarse_at_q(vt.weights.size(), nb);
    for (long n = 0; n < vt.weights.size(); ++n) {
      Vec3 xc = vt.points[n];  // position within the coarse element
      for (int k = 0; k < d; ++k)
        if (oct & (1 << k)) xc[k] += hf;
      coarse_basis.eval(xc, cvals);
      coarse_at_q.row(n) = cvals.transpose();
    }
    inj.child_block[oct] = vt.values.transpose() * vt.weights.asDiagonal() * coarse_at_q;
  }
  return inj;
}

BlockSparseMatrix galerkin_coarsen(const InjectionOp& inj, const BlockSparseMatrix& x, double prefactor) {
  if (x.empty()) return BlockSparseMatrix();
  BlockSparseMatrix c(inj.n_coarse, inj.n_coarse, inj.nb, inj.nb);
  Eigen::MatrixXd tmp;
  for (int r = 0; r < x.block_rows(); ++r) {
    const auto& br = inj.child_block[inj.octant[r]];
    for (const auto& e : x.row(r)) {
      tmp.noalias() = br.transpose() * e.block;
      c.block_ref(inj.parent[r], inj.parent[e.col]).noalias() += tmp * inj.child_block[inj.octant[e.col]];
    }
  }
  if (prefactor != 1.0) c.scale(prefactor);
  return c;
}

namespace {

constexpr long kMaterializeLimitBytes = 500L << 20;

StokesSystem coarsen_common(const StokesSystem& fine, const InjectionOp& inj) {
  StokesSystem c;
  c.dim = fine.dim;
  c.degree = fine.degree;
  c.nb = fine.nb;
  c.nelem = inj.n_coarse;
  c.gamma = fine.gamma;
  c.timedep = fine.timedep;
  c.delta = fine.delta;
  c.kernel = fine.kernel;

  c.phase.assign(c.nelem, -1);
  for (int e = 0; e < inj.n_fine; ++e) c.phase[inj.parent[e]] = fine.phase[e];
  if (fine.scaled()) {
    c.alpha.resize(c.nelem);
    c.beta.resize(c.nelem);
    for (int e = 0; e < inj.n_fine; ++e) {
      c.alpha[inj.parent[e]] = fine.alpha[e];
      c.beta[inj.parent[e]] = fine.beta[e];
    }
  }

  for (int k = 0; k < fine.dim; ++k) c.G[k] = galerkin_coarsen(inj, fine.G[k], 1.0);
  c.M_mu = galerkin_coarsen(inj, fine.M_mu, 1.0);
  c.Etilde = fine.Etilde.num_blocks() > 0 ? galerkin_coarsen(inj, fine.Etilde, 0.5)
                                          : BlockSparseMatrix(c.nelem, c.nelem, c.nb, c.nb);
  c.b = Eigen::VectorXd::Zero(c.size());
  return c;
}

void finish_coarse(StokesSystem& c) {
  if (estimate_A_bytes(c.dim, c.gamma, c.nelem, c.nb) <= kMaterializeLimitBytes) c.materialize_A();
  c.build_indices();
}

}  // namespace

StokesSystem coarsen_steady(const StokesSystem& fine, const InjectionOp& inj) {
  StokesSystem c = coarsen_common(fine, inj);
  c.E = galerkin_coarsen(inj, fine.E, 2.0);
  finish_coarse(c);
  return c;
}

BlockSparseMatrix recombine_pressure_penalty(const BlockSparseMatrix& e_mu,
                                             const BlockSparseMatrix& e_rho) {
  BlockSparseMatrix e(e_mu.block_rows(), e_mu.block_cols(), e_mu.row_size(), e_mu.col_size());
  for (int r = 0; r < e_mu.block_rows(); ++r) {
    std::set<int> cols;
    for (const auto& entry : e_mu.row(r)) cols.insert(entry.col);
    for (const auto& entry : e_rho.row(r)) cols.insert(entry.col);
    for (int col : cols) {
      const Eigen::MatrixXd* bm = e_mu.block_at(r, col);
      const Eigen::MatrixXd* br = e_rho.block_at(r, col);
      const double nm = bm ? bm->norm() : 0.0;
      const double nr = br ? br->norm() : 0.0;
      if (nm + nr == 0.0) continue;
      const double wm = (nr / (nm + nr)) * (nr / (nm + nr));
      const double wr = (nm / (nm + nr)) * (nm / (nm + nr));
      Eigen::MatrixXd& out = e.block_ref(r, col);
      if (bm) out.noalias() += wm * (*bm);
      if (br) out.noalias() += wr * (*br);
    }
  }
  return e;
}

StokesSystem coarsen_timedep(const StokesSystem& fine, const InjectionOp& inj) {
  StokesSystem c = coarsen_common(fine, inj);
  c.M_rho = galerkin_coarsen(inj, fine.M_rho, 1.0);
  c.E_mu = galerkin_coarsen(inj, fine.E_mu, 2.0);
  c.E_rho = galerkin_coarsen(inj, fine.E_rho, 0.5);
  c.E = recombine_pressure_penalty(c.E_mu, c.E_rho);
  finish_coarse(c);
  return c;
}

std::vector<std::vector<int>> color_elements(const StokesSystem& sys) {
  const int n = sys.nelem;
  std::vector<std::set<int>> adj(n);
  auto link = [&](int a, int b) {
    if (a == b) return;
    adj[a].insert(b);
    adj[b].insert(a);
  };
  auto add_pattern = [&](const BlockSparseMatrix& m) {
    if (m.empty()) return;
    for (int r = 0; r < m.block_rows(); ++r)
      for (const auto& e : m.row(r)) link(r, e.col);
  };

  if (sys.has_A()) {
    for (const auto& a : sys.A) add_pattern(a);
  } else {
    // Couplings of the composed viscous operator: all element pairs reached
    // through a common gradient row.
    for (int c = 0; c < n; ++c) {
      if (sys.gamma == 0) {
        for (int k = 0; k < sys.dim; ++k)
          for (const auto& e1 : sys.G[k].row(c))
            for (const auto& e2 : sys.G[k].row(c)) link(e1.col, e2.col);
      } else {
        std::vector<int> reach;
        for (int k = 0; k < sys.dim; ++k)
          for (const auto& e : sys.G[k].row(c)) reach.push_back(e.col);
        for (int a : reach)
          for (int b : reach) link(a, b);
      }
    }
    add_pattern(sys.Etilde);
  }
  for (int k = 0; k < sys.dim; ++k) add_pattern(sys.G[k]);
  add_pattern(sys.E);

  std::vector<int> color(n, -1);
  int ncolors = 0;
  std::vector<char> used;
  for (int e = 0; e < n; ++e) {
    used.assign(ncolors + 1, 0);
    for (int nbr : adj[e])
      if (color[nbr] >= 0) used[color[nbr]] = 1;
    int cidx = 0;
    while (used[cidx]) ++cidx;
    color[e] = cidx;
    ncolors = std::max(ncolors, cidx + 1);
  }
  std::vector<std::vector<int>> classes(ncolors);
  for (int e = 0; e < n; ++e) classes[color[e]].push_back(e);
  return classes;
}

MiniBlockSolver::MiniBlockSolver(const StokesSystem& sys, int elem, bool force_dense) {
  dim_ = sys.dim;
  nb_ = sys.nb;
  const Eigen::MatrixXd block = sys.diag_block(elem);
  const int nu = dim_ * nb_;
  const double scale = block.cwiseAbs().maxCoeff();

  auto pivot_ok = [](const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, double ref) {
    return lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 1e-13 * ref;
  };

  if (!force_dense) {
    // Pressure Schur complement over the velocity block; for gamma = 0 the
    // velocity block is shared across components.
    bool ok = true;
    const Eigen::MatrixXd auu =
        (sys.gamma == 0) ? block.topLeftCorner(nb_, nb_) : block.topLeftCorner(nu, nu);
    lu_uu_.compute(auu);
    ok = pivot_ok(lu_uu_, auu.cwiseAbs().maxCoeff());
    if (ok) {
      g_ = block.topRightCorner(nu, nb_);
      Eigen::MatrixXd s = block.bottomRightCorner(nb_, nb_);
      if (sys.gamma == 0) {
        for (int i = 0; i < dim_; ++i)
          s.noalias() -= g_.middleRows(i * nb_, nb_).transpose() * lu_uu_.solve(g_.middleRows(i * nb_, nb_));
      } else {
        s.noalias() -= g_.transpose() * lu_uu_.solve(g_);
      }
      lu_s_.compute(s);
      const double sref = s.cwiseAbs().maxCoeff();
      ok = pivot_ok(lu_s_, sref > 0.0 ? sref : scale);
    }
    if (ok) {
      dense_ = false;
      return;
    }
  }
  dense_ = true;
  lu_.compute(block);
  if (lu_.matrixLU().diagonal().cwiseAbs().minCoeff() <= 1e-14 * scale)
    throw std::runtime_error("MiniBlockSolver: singular element block " + std::to_string(elem));
}

void MiniBlockSolver::solve_in_place(Eigen::VectorXd& r) const {
  if (dense_) {
    r = lu_.solve(r);
    return;
  }
  const int nu = dim_ * nb_;
  Eigen::VectorXd t(nu);
  if (lu_uu_.rows() == nb_) {
    for (int i = 0; i < dim_; ++i) t.segment(i * nb_, nb_) = lu_uu_.solve(r.segment(i * nb_, nb_));
  } else {
    t = lu_uu_.solve(r.head(nu));
  }
  const Eigen::VectorXd w = r.tail(nb_) - g_.transpose() * t;
  const Eigen::VectorXd q = lu_s_.solve(w);
  const Eigen::VectorXd gq = g_ * q;
  if (lu_uu_.rows() == nb_) {
    for (int i = 0; i < dim_; ++i)
      r.segment(i * nb_, nb_) = t.segment(i * nb_, nb_) - lu_uu_.solve(gq.segment(i * nb_, nb_));
  } else {
    r.head(nu) = t - lu_uu_.solve(gq);
  }
  r.tail(nb_) = q;
}

Eigen::VectorXd BottomSolver::solve(const Eigen::VectorXd& b) const {
  const Eigen::VectorXd coeffs = q.transpose() * b;
  return q * coeffs.cwiseProduct(inv_eigenvalues);
}

MgHierarchy build_mg_hierarchy(StokesSystem fine, const Basis& basis, const HierarchyMap& map,
                               const MgOptions& options) {
  MgHierarchy mg;
  mg.options = options;
  mg.levels.reserve(map.num_levels());
  mg.levels.push_back(MgLevel{std::move(fine), {}, {}, {}});

  for (int l = 0; l + 1 < map.num_levels(); ++l) {
    const Basis level_basis(basis.dim(), basis.degree(), 1.0 / map.cells_per_axis[l]);
    InjectionOp inj = make_injection(level_basis, map, l);
    const StokesSystem& prev = mg.levels[l].sys;
    StokesSystem coarse = prev.timedep ? coarsen_timedep(prev, inj) : coarsen_steady(prev, inj);
    mg.levels[l].from_coarser = std::move(inj);
    mg.levels.push_back(MgLevel{std::move(coarse), {}, {}, {}});
  }

  // Factorizations and colors are built only after the level array is final.
  for (auto& level : mg.levels) {
    level.colors = color_elements(level.sys);
    const long jb = level.sys.joint_block();
    const bool force_dense = static_cast<long>(level.sys.nelem) * jb * jb * 8 <= (350L << 20);
    level.factors.reserve(level.sys.nelem);
    for (int e = 0; e < level.sys.nelem; ++e) level.factors.emplace_back(level.sys, e, force_dense);
  }

  const StokesSystem& bot = mg.levels.back().sys;
  const SymEig eig = sym_eig(bot.dense());
  mg.bottom.q = eig.eigenvectors;
  const double lam_max = eig.eigenvalues.cwiseAbs().maxCoeff();
  mg.bottom.inv_eigenvalues.resize(eig.eigenvalues.size());
  mg.bottom.snapped = 0;
  for (long i = 0; i < eig.eigenvalues.size(); ++i) {
    if (std::abs(eig.eigenvalues[i]) <= options.eps_snap * lam_max) {
      mg.bottom.inv_eigenvalues[i] = 0.0;
      ++mg.bottom.snapped;
    } else {
      mg.bottom.inv_eigenvalues[i] = 1.0 / eig.eigenvalues[i];
    }
  }
  return mg;
}

void smooth(const MgLevel& level, Eigen::VectorXd& x, const Eigen::VectorXd& b, int sweeps) {
  const StokesSystem& sys = level.sys;
  const int jb = sys.joint_block();
  Eigen::VectorXd acc(jb), rhs(jb);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (const auto& color : level.colors) {
      for (int e : color) {
        sys.row_apply_offdiag(e, x, acc);
        rhs = b.segment(static_cast<long>(e) * jb, jb) - acc;
        level.factors[e].solve_in_place(rhs);
        x.segment(static_cast<long>(e) * jb, jb) = rhs;
      }
    }
  }
}

void vcycle(const MgHierarchy& mg, int level, Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  if (level == mg.num_levels() - 1) {
    x = mg.bottom.solve(b);
    return;
  }
  const MgLevel& lvl = mg.levels[level];
  smooth(lvl, x, b, mg.options.nu1);
  Eigen::VectorXd residual;
  lvl.sys.apply(x, residual);
  residual = b - residual;
  Eigen::VectorXd rc;
  lvl.from_coarser.restrict_joint(residual, rc);
  Eigen::VectorXd xc = Eigen::VectorXd::Zero(rc.size());
  vcycle(mg, level + 1, xc, rc);
  Eigen::VectorXd correction;
  lvl.from_coarser.prolong_joint(xc, correction);
  x += correction;
  smooth(lvl, x, b, mg.options.nu2);
}

void vcycle(const MgHierarchy& mg, Eigen::VectorXd& x, const Eigen::VectorXd& b) { vcycle(mg, 0, x, b); }

Eigen::VectorXd bottom_solve(const MgHierarchy& mg, const Eigen::VectorXd& b) {
  return mg.bottom.solve(b);
}

}  // namespace stokesmg
