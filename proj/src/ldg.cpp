#include "stokesmg/ldg.hpp"

#include <cmath>
#include <stdexcept>

namespace stokesmg {

namespace {

constexpr long kMaterializeLimitBytes = 500L << 20;

// Optimal pressure penalty prefactors, indexed by degree 1..5.
constexpr double kTauStandard2d[5] = {0.19, 0.10, 0.086, 0.019, 0.031};
constexpr double kTauStandard3d[5] = {0.12, 0.088, 0.084, -1.0, -1.0};
constexpr double kTauStress2d[5] = {0.14, 0.046, 0.034, 0.0095, 0.011};
constexpr double kTauStress3d[5] = {0.12, 0.039, 0.040, -1.0, -1.0};

// Per-axis face quadrature data: trace matrices, the four trace Gram products,
// and quadrature point offsets from the face center.
struct FaceGeometry {
  Eigen::MatrixXd hi, lo;          // nqf x nb traces
  Eigen::MatrixXd HH, HL, LH, LL;  // trace Grams with face weights
  Eigen::VectorXd w;
  std::vector<Vec3> offsets;
};

FaceGeometry make_face_geometry(const Basis& basis, int axis, int q) {
  const FaceTables ft = make_face_tables(basis, axis, q);
  FaceGeometry geo;
  geo.hi = ft.trace_hi;
  geo.lo = ft.trace_lo;
  geo.w = ft.weights;
  geo.HH = ft.trace_hi.transpose() * ft.weights.asDiagonal() * ft.trace_hi;
  geo.HL = ft.trace_hi.transpose() * ft.weights.asDiagonal() * ft.trace_lo;
  geo.LH = geo.HL.transpose();
  geo.LL = ft.trace_lo.transpose() * ft.weights.asDiagonal() * ft.trace_lo;
  geo.offsets.resize(ft.points.size());
  const double half_h = 0.5 * basis.h();
  for (std::size_t n = 0; n < ft.points.size(); ++n) {
    Vec3 off = Vec3::Zero();
    for (int k = 0; k < basis.dim(); ++k)
      if (k != axis) off[k] = ft.points[n][k] - half_h;
    geo.offsets[n] = off;
  }
  return geo;
}

// Trace Gram between the test and trial sides of a face; each side is the
// "minus" or "plus" element, and the normal sign fixes which physical trace
// that is (minus uses the high trace when the normal points up the axis).
const Eigen::MatrixXd& gram(const FaceGeometry& geo, int sign, bool test_minus, bool trial_minus) {
  const bool test_hi = (sign > 0) == test_minus;
  const bool trial_hi = (sign > 0) == trial_minus;
  if (test_hi && trial_hi) return geo.HH;
  if (test_hi) return geo.HL;
  if (trial_hi) return geo.LH;
  return geo.LL;
}

const Eigen::MatrixXd& trace(const FaceGeometry& geo, int sign, bool minus_side) {
  return ((sign > 0) == minus_side) ? geo.hi : geo.lo;
}

struct AssemblyContext {
  const CartesianMesh& mesh;
  const Basis& basis;
  int q;
  std::array<FaceGeometry, 3> face_geo;
  VolumeTables vol;

  AssemblyContext(const CartesianMesh& m, const Basis& b)
      : mesh(m), basis(b), q(b.degree() + 2), vol(make_volume_tables(b, b.degree() + 2)) {
    for (int k = 0; k < m.dim(); ++k) face_geo[k] = make_face_geometry(b, k, q);
  }
};

double face_mu(const ProblemSpec& problem, const CartesianMesh& mesh, const Face& face, int elem) {
  return problem.mu_at(face.center, mesh.phase(elem));
}

std::array<BlockSparseMatrix, 3> discrete_gradient_impl(const AssemblyContext& ctx) {
  const CartesianMesh& mesh = ctx.mesh;
  const int d = mesh.dim();
  const int nb = ctx.basis.size();
  const int nelem = mesh.num_elements();

  std::array<BlockSparseMatrix, 3> G;
  for (int k = 0; k < d; ++k) {
    G[k] = BlockSparseMatrix(nelem, nelem, nb, nb);
    const Eigen::MatrixXd vol_k =
        ctx.vol.values.transpose() * ctx.vol.weights.asDiagonal() * ctx.vol.deriv[k];
    for (int e = 0; e < nelem; ++e) G[k].block_ref(e, e) = vol_k;
  }

  for (const Face& f : mesh.faces()) {
    const int k = f.axis;
    const FaceGeometry& geo = ctx.face_geo[k];
    const double s = f.sign;
    switch (f.kind) {
      case FaceKind::Intraphase:
        // One-sided flux u^-: only the plus row lifts the jump.
        G[k].block_ref(f.plus, f.plus).noalias() += s * gram(geo, f.sign, false, false);
        G[k].block_ref(f.plus, f.minus).noalias() -= s * gram(geo, f.sign, false, true);
        break;
      case FaceKind::Interphase: {
        const double lm = f.lambda;
        G[k].block_ref(f.minus, f.plus).noalias() += s * (1.0 - lm) * gram(geo, f.sign, true, false);
        G[k].block_ref(f.minus, f.minus).noalias() -= s * (1.0 - lm) * gram(geo, f.sign, true, true);
        G[k].block_ref(f.plus, f.plus).noalias() += s * lm * gram(geo, f.sign, false, false);
        G[k].block_ref(f.plus, f.minus).noalias() -= s * lm * gram(geo, f.sign, false, true);
        break;
      }
      case FaceKind::Dirichlet:
        G[k].block_ref(f.minus, f.minus).noalias() -= s * gram(geo, f.sign, true, true);
        break;
      case FaceKind::Stress:
        break;  // u-flux equals the interior trace; no lifting term
    }
  }
  return G;
}

LiftedData lift_data_impl(const AssemblyContext& ctx, const ProblemSpec& problem) {
  const CartesianMesh& mesh = ctx.mesh;
  const int d = mesh.dim();

  LiftedData out;
  out.Jg = make_field(mesh, ctx.basis, FieldShape::Matrix);
  out.Jh = make_field(mesh, ctx.basis, FieldShape::Vector);
  out.Jgn = make_field(mesh, ctx.basis, FieldShape::Scalar);

  Eigen::VectorXd gq, hq;
  for (const Face& f : mesh.faces()) {
    const int k = f.axis;
    const FaceGeometry& geo = ctx.face_geo[k];
    const double s = f.sign;
    const int nqf = static_cast<int>(geo.w.size());
    Vec3 normal = Vec3::Zero();
    normal[k] = s;
    auto face_point = [&](int n) { return Vec3(f.center + geo.offsets[n]); };

    if (f.kind == FaceKind::Dirichlet && problem.g_dirichlet) {
      const int chi = mesh.phase(f.minus);
      const auto& tm = trace(geo, f.sign, true);
      for (int i = 0; i < d; ++i) {
        gq.resize(nqf);
        for (int n = 0; n < nqf; ++n) gq[n] = problem.g_dirichlet(face_point(n), chi)[i] * geo.w[n];
        out.Jg.segment(f.minus, i * d + k).noalias() += s * (tm.transpose() * gq);
        if (i == k) out.Jgn.segment(f.minus, 0).noalias() += s * (tm.transpose() * gq);
      }
    } else if (f.kind == FaceKind::Stress && problem.h_stress) {
      const int chi = mesh.phase(f.minus);
      const auto& tm = trace(geo, f.sign, true);
      for (int i = 0; i < d; ++i) {
        hq.resize(nqf);
        for (int n = 0; n < nqf; ++n) hq[n] = problem.h_stress(face_point(n), normal, chi)[i] * geo.w[n];
        out.Jh.segment(f.minus, i).noalias() += tm.transpose() * hq;
      }
    } else if (f.kind == FaceKind::Interphase) {
      const int lo = mesh.phase(f.minus), hi = mesh.phase(f.plus);
      const double lm = f.lambda;
      const auto& tm = trace(geo, f.sign, true);
      const auto& tp = trace(geo, f.sign, false);
      if (problem.g_jump) {
        for (int i = 0; i < d; ++i) {
          gq.resize(nqf);
          for (int n = 0; n < nqf; ++n) gq[n] = problem.g_jump(face_point(n), lo, hi)[i] * geo.w[n];
          out.Jg.segment(f.minus, i * d + k).noalias() += s * (1.0 - lm) * (tm.transpose() * gq);
          out.Jg.segment(f.plus, i * d + k).noalias() += s * lm * (tp.transpose() * gq);
          if (i == k) {
            out.Jgn.segment(f.minus, 0).noalias() += s * (1.0 - lm) * (tm.transpose() * gq);
            out.Jgn.segment(f.plus, 0).noalias() += s * lm * (tp.transpose() * gq);
          }
        }
      }
      if (problem.h_jump) {
        for (int i = 0; i < d; ++i) {
          hq.resize(nqf);
          for (int n = 0; n < nqf; ++n) hq[n] = problem.h_jump(face_point(n), normal, lo, hi)[i] * geo.w[n];
          out.Jh.segment(f.minus, i).noalias() += lm * (tm.transpose() * hq);
          out.Jh.segment(f.plus, i).noalias() += (1.0 - lm) * (tp.transpose() * hq);
        }
      }
    }
  }
  return out;
}

PenaltyOperators penalty_operators_impl(const AssemblyContext& ctx, const ProblemSpec& problem,
                                        const PenaltyConfig& pen) {
  const CartesianMesh& mesh = ctx.mesh;
  const int d = mesh.dim();
  const int nb = ctx.basis.size();
  const int nelem = mesh.num_elements();
  const double h = mesh.element_size();
  const double p = ctx.basis.degree();
  const bool timedep = problem.timedep();

  if (!(pen.tau > 0.0)) throw std::invalid_argument("penalty_operators: tau must be positive");
  if (timedep && !(pen.tau0 > 0.0)) throw std::invalid_argument("penalty_operators: tau0 must be positive");

  PenaltyOperators out;
  out.Etilde = BlockSparseMatrix(nelem, nelem, nb, nb);
  out.E = BlockSparseMatrix(nelem, nelem, nb, nb);
  if (timedep) {
    out.E_mu = BlockSparseMatrix(nelem, nelem, nb, nb);
    out.E_rho = BlockSparseMatrix(nelem, nelem, nb, nb);
  }
  out.rhs_u.assign(d, Eigen::VectorXd::Zero(static_cast<long>(nelem) * nb));

  Eigen::VectorXd gq;
  for (const Face& f : mesh.faces()) {
    const FaceGeometry& geo = ctx.face_geo[f.axis];
    const int nqf = static_cast<int>(geo.w.size());
    auto face_point = [&](int n) { return Vec3(f.center + geo.offsets[n]); };

    auto add_jump_penalty = [&](BlockSparseMatrix& m, double t) {
      m.block_ref(f.minus, f.minus).noalias() += t * gram(geo, f.sign, true, true);
      m.block_ref(f.minus, f.plus).noalias() -= t * gram(geo, f.sign, true, false);
      m.block_ref(f.plus, f.minus).noalias() -= t * gram(geo, f.sign, false, true);
      m.block_ref(f.plus, f.plus).noalias() += t * gram(geo, f.sign, false, false);
    };

    switch (f.kind) {
      case FaceKind::Intraphase: {
        const double mu = face_mu(problem, mesh, f, f.minus);
        if (pen.tau_u_intraphase > 0.0) add_jump_penalty(out.Etilde, pen.tau_u_intraphase * p * mu / h);
        const double rho = timedep ? problem.rho_at(mesh.phase(f.minus)) : 0.0;
        const double tau_p = pressure_penalty_value(problem, pen, h, mu, rho);
        if (!(tau_p > 0.0)) throw std::invalid_argument("penalty_operators: non-positive tau_p");
        add_jump_penalty(out.E, tau_p);
        if (timedep) {
          add_jump_penalty(out.E_mu, pen.tau * h / mu);
          add_jump_penalty(out.E_rho, pen.tau0 * problem.delta / (h * rho));
        }
        break;
      }
      case FaceKind::Interphase: {
        const double mu_m = face_mu(problem, mesh, f, f.minus);
        const double mu_p = face_mu(problem, mesh, f, f.plus);
        const double t = pen.c_interphase * p * std::min(mu_m, mu_p) / h;
        add_jump_penalty(out.Etilde, t);
        if (problem.g_jump) {
          const int lo = mesh.phase(f.minus), hi = mesh.phase(f.plus);
          const auto& tm = trace(geo, f.sign, true);
          const auto& tp = trace(geo, f.sign, false);
          for (int i = 0; i < d; ++i) {
            gq.resize(nqf);
            for (int n = 0; n < nqf; ++n) gq[n] = problem.g_jump(face_point(n), lo, hi)[i] * geo.w[n];
            out.rhs_u[i].segment(static_cast<long>(f.minus) * nb, nb).noalias() += t * (tm.transpose() * gq);
            out.rhs_u[i].segment(static_cast<long>(f.plus) * nb, nb).noalias() -= t * (tp.transpose() * gq);
          }
        }
        break;
      }
      case FaceKind::Dirichlet: {
        const double t = pen.c_dirichlet * p * face_mu(problem, mesh, f, f.minus) / h;
        out.Etilde.block_ref(f.minus, f.minus).noalias() += t * gram(geo, f.sign, true, true);
        if (problem.g_dirichlet) {
          const int chi = mesh.phase(f.minus);
          const auto& tm = trace(geo, f.sign, true);
          for (int i = 0; i < d; ++i) {
            gq.resize(nqf);
            for (int n = 0; n < nqf; ++n) gq[n] = problem.g_dirichlet(face_point(n), chi)[i] * geo.w[n];
            out.rhs_u[i].segment(static_cast<long>(f.minus) * nb, nb).noalias() += t * (tm.transpose() * gq);
          }
        }
        break;
      }
      case FaceKind::Stress:
        break;
    }
  }
  return out;
}

}  // namespace

double optimal_tau(int dim, int degree, int gamma) {
  if (degree < 1 || degree > 5) throw std::invalid_argument("optimal_tau: degree must be 1..5");
  const double* table = (dim == 2) ? (gamma == 0 ? kTauStandard2d : kTauStress2d)
                                   : (gamma == 0 ? kTauStandard3d : kTauStress3d);
  const double tau = table[degree - 1];
  if (tau <= 0.0) throw std::invalid_argument("optimal_tau: no tabulated value for 3D degree > 3");
  return tau;
}

PenaltyConfig make_penalty_config(int dim, int degree, int gamma) {
  PenaltyConfig pen;
  pen.tau = optimal_tau(dim, degree, gamma);
  pen.tau0 = 0.5 * degree;
  return pen;
}

double upwind_lambda(double mu_minus, double mu_plus) {
  if (!(mu_minus > 0.0) || !(mu_plus > 0.0))
    throw std::invalid_argument("upwind_lambda: viscosities must be positive");
  if (mu_minus < mu_plus) return 0.0;
  if (mu_minus > mu_plus) return 1.0;
  return 0.5;
}

void apply_viscosity_upwinding(CartesianMesh& mesh, const ProblemSpec& problem) {
  const auto& faces = mesh.faces();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = faces[f];
    if (face.kind != FaceKind::Interphase) continue;
    const double mu_m = problem.mu_at(face.center, mesh.phase(face.minus));
    const double mu_p = problem.mu_at(face.center, mesh.phase(face.plus));
    mesh.set_lambda(f, upwind_lambda(mu_m, mu_p));
  }
}

std::array<BlockSparseMatrix, 3> discrete_gradient(const CartesianMesh& mesh, const Basis& basis) {
  AssemblyContext ctx(mesh, basis);
  return discrete_gradient_impl(ctx);
}

std::array<BlockSparseMatrix, 3> adjoint_gradient(const std::array<BlockSparseMatrix, 3>& G, int dim) {
  std::array<BlockSparseMatrix, 3> adj;
  for (int k = 0; k < dim; ++k) {
    adj[k] = G[k].transpose();
    adj[k].scale(-1.0);
  }
  return adj;
}

LiftedData lift_data(const CartesianMesh& mesh, const Basis& basis, const ProblemSpec& problem) {
  AssemblyContext ctx(mesh, basis);
  return lift_data_impl(ctx, problem);
}

double pressure_penalty_value(const ProblemSpec& problem, const PenaltyConfig& pen, double h, double mu,
                              double rho) {
  if (problem.timedep()) return 1.0 / (h * rho / (pen.tau0 * problem.delta) + mu / (pen.tau * h));
  return pen.tau * h / mu;
}

PenaltyOperators penalty_operators(const CartesianMesh& mesh, const Basis& basis,
                                   const ProblemSpec& problem, const PenaltyConfig& penalties) {
  AssemblyContext ctx(mesh, basis);
  return penalty_operators_impl(ctx, problem, penalties);
}

Eigen::MatrixXd kernel_vectors(const CartesianMesh& mesh, const Basis& basis,
                               const std::vector<KernelMode>& modes, const Eigen::VectorXd* inv_alpha,
                               const Eigen::VectorXd* inv_beta) {
  const int d = mesh.dim();
  const int nb = basis.size();
  const int nelem = mesh.num_elements();
  const long n = static_cast<long>(nelem) * (d + 1) * nb;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, static_cast<long>(modes.size()));
  const VolumeTables vt = make_volume_tables(basis, basis.degree() + 1);

  for (std::size_t m = 0; m < modes.size(); ++m) {
    const KernelMode& mode = modes[m];
    auto fn = [&](const Vec3& x, int comp) -> double {
      switch (mode.kind) {
        case KernelModeKind::ConstVelocity: return comp == mode.axis_a ? 1.0 : 0.0;
        case KernelModeKind::ConstPressure: return comp == d ? 1.0 : 0.0;
        case KernelModeKind::Rotation:
          if (comp == mode.axis_a) return -x[mode.axis_b];
          if (comp == mode.axis_b) return x[mode.axis_a];
          return 0.0;
      }
      return 0.0;
    };
    Eigen::VectorXd fw(vt.weights.size());
    for (int e = 0; e < nelem; ++e) {
      const Vec3 lo = mesh.element_low_corner(e);
      for (int c = 0; c <= d; ++c) {
        for (long q = 0; q < vt.weights.size(); ++q) fw[q] = fn(lo + vt.points[q], c) * vt.weights[q];
        const double scale = (c < d) ? (inv_alpha ? 1.0 / (*inv_alpha)[e] : 1.0)
                                     : (inv_beta ? 1.0 / (*inv_beta)[e] : 1.0);
        K.block((static_cast<long>(e) * (d + 1) + c) * nb, m, nb, 1) = scale * (vt.values.transpose() * fw);
      }
    }
  }

  // Orthonormalize (modified Gram-Schmidt, two passes).
  for (int pass = 0; pass < 2; ++pass) {
    for (long j = 0; j < K.cols(); ++j) {
      for (long i = 0; i < j; ++i) K.col(j) -= K.col(i).dot(K.col(j)) * K.col(i);
      const double norm = K.col(j).norm();
      if (norm > 1e-12) K.col(j) /= norm;
    }
  }
  return K;
}

StokesSystem assemble_stokes(const CartesianMesh& mesh, const Basis& basis, const ProblemSpec& problem,
                             const PenaltyConfig& penalties) {
  const int d = mesh.dim();
  if (problem.gamma != 0 && problem.gamma != 1)
    throw std::invalid_argument("assemble_stokes: gamma must be 0 or 1");
  if (!problem.mu_fn)
    for (double mu : problem.mu_phase)
      if (!(mu > 0.0)) throw std::invalid_argument("assemble_stokes: viscosities must be positive");
  if (problem.timedep()) {
    if (!(problem.delta > 0.0)) throw std::invalid_argument("assemble_stokes: delta must be positive");
    for (double rho : problem.rho_phase)
      if (!(rho > 0.0)) throw std::invalid_argument("assemble_stokes: densities must be positive");
  }

  AssemblyContext ctx(mesh, basis);
  StokesSystem sys;
  sys.dim = d;
  sys.degree = basis.degree();
  sys.nb = basis.size();
  sys.nelem = mesh.num_elements();
  sys.gamma = problem.gamma;
  sys.timedep = problem.timedep();
  sys.delta = problem.delta;
  sys.phase.resize(sys.nelem);
  for (int e = 0; e < sys.nelem; ++e) sys.phase[e] = mesh.phase(e);

  sys.G = discrete_gradient_impl(ctx);
  sys.M_mu = mass_matrix(mesh, basis, [&](const Vec3& x, int chi) { return problem.mu_at(x, chi); },
                         basis.degree() + 2);
  if (sys.timedep)
    sys.M_rho = mass_matrix(mesh, basis, [&](const Vec3&, int chi) { return problem.rho_at(chi); },
                            basis.degree() + 2);

  PenaltyOperators pen = penalty_operators_impl(ctx, problem, penalties);
  sys.Etilde = std::move(pen.Etilde);
  sys.E = std::move(pen.E);
  if (sys.timedep) {
    sys.E_mu = std::move(pen.E_mu);
    sys.E_rho = std::move(pen.E_rho);
  }

  const LiftedData lifts = lift_data_impl(ctx, problem);
  const int nb = sys.nb;
  const long ns = static_cast<long>(sys.nelem) * nb;

  auto component = [&](const DgField& f, int comp) {
    Eigen::VectorXd v(ns);
    for (int e = 0; e < sys.nelem; ++e) v.segment(static_cast<long>(e) * nb, nb) = f.segment(e, comp);
    return v;
  };

  std::vector<Eigen::VectorXd> bu(d);
  DgField f_proj;
  if (problem.f_momentum)
    f_proj = l2_project(mesh, basis, FieldShape::Vector,
                        [&](const Vec3& x, int chi, int c) { return problem.f_momentum(x, chi)[c]; },
                        basis.degree() + 2);
  for (int i = 0; i < d; ++i) {
    bu[i] = std::move(pen.rhs_u[i]);
    if (problem.f_momentum) bu[i] += component(f_proj, i);
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd jg = component(lifts.Jg, i * d + j);
      if (problem.gamma == 1) jg += component(lifts.Jg, j * d + i);
      if (jg.isZero(0.0)) continue;
      Eigen::VectorXd t;
      sys.G[j].apply_transpose(jg, t);
      bu[i] -= t;
    }
    bu[i] += component(lifts.Jh, i);
  }
  Eigen::VectorXd bp = component(lifts.Jgn, 0);
  if (problem.f_div) {
    const DgField fd = l2_project(mesh, basis, FieldShape::Scalar,
                                  [&](const Vec3& x, int chi, int) { return problem.f_div(x, chi); },
                                  basis.degree() + 2);
    bp += fd.coeffs;
  }

  sys.b.resize(sys.size());
  for (int e = 0; e < sys.nelem; ++e) {
    for (int i = 0; i < d; ++i)
      sys.b.segment(sys.offset(e, i), nb) = bu[i].segment(static_cast<long>(e) * nb, nb);
    sys.b.segment(sys.offset(e, d), nb) = bp.segment(static_cast<long>(e) * nb, nb);
  }

  sys.kernel = kernel_modes(d, mesh.fully_periodic(), mesh.has_dirichlet(), mesh.has_stress(),
                            problem.gamma, sys.timedep);
  if (!sys.kernel.empty() && sys.b.norm() > 0.0) {
    const Eigen::MatrixXd K = kernel_vectors(mesh, basis, sys.kernel);
    const Eigen::VectorXd coeffs = K.transpose() * sys.b;
    // Quadrature round-off can leave a small kernel component in b.
    if (coeffs.cwiseAbs().maxCoeff() > 1e-10 * sys.b.norm()) sys.b -= K * coeffs;
  }

  if (estimate_A_bytes(d, sys.gamma, sys.nelem, nb) <= kMaterializeLimitBytes) sys.materialize_A();
  sys.build_indices();
  return sys;
}

void diagonal_scaling(StokesSystem& sys, const CartesianMesh& mesh, const ProblemSpec& problem) {
  if (sys.scaled()) throw std::logic_error("diagonal_scaling: system already scaled");
  const int nelem = sys.nelem;
  sys.alpha.resize(nelem);
  sys.beta.resize(nelem);
  for (int e = 0; e < nelem; ++e) {
    const double mu = problem.mu_at(mesh.element_center(e), mesh.phase(e));
    if (!(mu > 0.0)) throw std::invalid_argument("diagonal_scaling: non-positive element viscosity");
    sys.alpha[e] = 1.0 / std::sqrt(mu);
    sys.beta[e] = std::sqrt(mu);
  }

  for (int k = 0; k < sys.dim; ++k) sys.G[k].scale_rows_cols(sys.beta, sys.alpha);
  sys.M_mu.scale_rows_cols(sys.alpha, sys.alpha);  // M / beta^2 since alpha*beta = 1
  if (sys.timedep) sys.M_rho.scale_rows_cols(sys.alpha, sys.alpha);
  sys.Etilde.scale_rows_cols(sys.alpha, sys.alpha);
  sys.E.scale_rows_cols(sys.beta, sys.beta);
  if (sys.timedep) {
    sys.E_mu.scale_rows_cols(sys.beta, sys.beta);
    sys.E_rho.scale_rows_cols(sys.beta, sys.beta);
  }
  for (auto& a : sys.A) a.scale_rows_cols(sys.alpha, sys.alpha);

  for (int e = 0; e < nelem; ++e) {
    for (int i = 0; i < sys.dim; ++i) sys.b.segment(sys.offset(e, i), sys.nb) *= sys.alpha[e];
    sys.b.segment(sys.offset(e, sys.dim), sys.nb) *= sys.beta[e];
  }
  sys.build_indices();
}

}  // namespace stokesmg
