#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "stokesmg/field.hpp"

#include <cmath>

using namespace stokesmg;

namespace {
int single_phase(const std::array<int, 3>&) { return 1; }
const auto unit_weight = [](const Vec3&, int) { return 1.0; };
}  // namespace

TEST_CASE("unit-weight mass matrix is the identity") {
  const auto mesh = build_mesh(2, 4, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 2, mesh.element_size());
  const auto m = mass_matrix(mesh, basis, unit_weight, basis.degree() + 1);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto* b = m.block_at(e, e);
    REQUIRE(b != nullptr);
    CHECK((*b - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("constant-weight mass matrix scales the identity") {
  const auto mesh = build_mesh(2, 2, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 1, mesh.element_size());
  const auto m = mass_matrix(mesh, basis, [](const Vec3&, int) { return 2.0; }, 3);
  const auto* b = m.block_at(0, 0);
  CHECK((*b - 2.0 * Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("variable-viscosity mass matrix matches a high-order quadrature oracle") {
  // q chosen so the rule resolves the sinusoidal weight below the comparison
  // tolerance; the q+4 oracle then isolates assembly errors.
  const auto mesh = build_mesh(2, 16, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 2, mesh.element_size());
  auto weight = [](const Vec3& x, int) {
    return 1.0 + 0.5 * std::sin(4.0 * M_PI * x[0]) * std::sin(4.0 * M_PI * x[1]);
  };
  const int q = 8;
  const auto m = mass_matrix(mesh, basis, weight, q);
  const auto oracle = mass_matrix(mesh, basis, weight, q + 4);
  double max_diff = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    max_diff = std::max(max_diff, (*m.block_at(e, e) - *oracle.block_at(e, e)).cwiseAbs().maxCoeff());
  CHECK(max_diff < 1e-12);
}

TEST_CASE("polynomial-weight mass matrix is quadrature exact") {
  const auto mesh = build_mesh(2, 4, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 2, mesh.element_size());
  auto weight = [](const Vec3& x, int) { return 1.0 + x[0] * x[1]; };
  const auto m = mass_matrix(mesh, basis, weight, basis.degree() + 2);
  const auto oracle = mass_matrix(mesh, basis, weight, basis.degree() + 6);
  for (int e = 0; e < mesh.num_elements(); ++e)
    CHECK((*m.block_at(e, e) - *oracle.block_at(e, e)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("mass matrix rejects non-positive weights") {
  const auto mesh = build_mesh(2, 2, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 1, mesh.element_size());
  CHECK_THROWS(mass_matrix(mesh, basis, [](const Vec3& x, int) { return x[0] - 0.2; }, 3));
}

TEST_CASE("weighted mass eigenvalues sit between the weight bounds") {
  const auto mesh = build_mesh(2, 2, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 2, mesh.element_size());
  auto weight = [](const Vec3& x, int) { return 1.5 + std::sin(2.0 * M_PI * x[0]); };
  const auto m = mass_matrix(mesh, basis, weight, basis.degree() + 3);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const SymEig eig = sym_eig(*m.block_at(e, e));
    CHECK(eig.eigenvalues.minCoeff() >= 0.5 - 1e-10);
    CHECK(eig.eigenvalues.maxCoeff() <= 2.5 + 1e-10);
  }
}

TEST_CASE("projection reproduces fields in the space") {
  const auto mesh = build_mesh(2, 4, single_phase, BcSpec::all_dirichlet());
  const Basis basis(2, 2, mesh.element_size());

  const auto ones = l2_project(mesh, basis, FieldShape::Scalar,
                               [](const Vec3&, int, int) { return 1.0; }, basis.degree() + 2);
  for (double x : {0.1, 0.33, 0.71})
    CHECK(std::abs(eval_field(mesh, basis, ones, Vec3(x, x, 0)) - 1.0) < 1e-13);

  // a polynomial of full tensor degree p is reproduced exactly
  auto poly = [](const Vec3& x, int, int) { return (3 * x[0] * x[0] - 1) * (x[1] * x[1] + 0.5 * x[1]); };
  const auto pf = l2_project(mesh, basis, FieldShape::Scalar, poly, basis.degree() + 2);
  for (double x : {0.05, 0.4, 0.9})
    for (double y : {0.18, 0.52, 0.97})
      CHECK(std::abs(eval_field(mesh, basis, pf, Vec3(x, y, 0)) - poly(Vec3(x, y, 0), 1, 0)) < 1e-12);
}

TEST_CASE("projection error decays at order p+1") {
  const int p = 2;
  std::vector<double> hs, errs;
  for (int n : {8, 16, 32}) {
    const auto mesh = build_mesh(2, n, single_phase, BcSpec::all_periodic());
    const Basis basis(2, p, mesh.element_size());
    auto fn = [](const Vec3& x, int, int) { return std::sin(2.0 * M_PI * x[0]); };
    const auto f = l2_project(mesh, basis, FieldShape::Scalar, fn, basis.degree() + 2);
    double max_err = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Vec3 lo = mesh.element_low_corner(e);
      for (double a : {0.12, 0.5, 0.93})
        for (double b : {0.21, 0.77}) {
          const Vec3 x = lo + Vec3(a * mesh.element_size(), b * mesh.element_size(), 0.0);
          max_err = std::max(max_err, std::abs(eval_field(mesh, basis, f, e, x) - fn(x, 1, 0)));
        }
    }
    hs.push_back(mesh.element_size());
    errs.push_back(max_err);
  }
  const double slope01 = std::log(errs[0] / errs[1]) / std::log(hs[0] / hs[1]);
  const double slope12 = std::log(errs[1] / errs[2]) / std::log(hs[1] / hs[2]);
  CHECK(slope01 > p + 0.5);
  CHECK(slope12 > p + 0.5);
}

TEST_CASE("trace evaluation distinguishes sides of a face") {
  const auto mesh = build_mesh(2, 2, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 1, mesh.element_size());
  // discontinuous field: equals the element index
  DgField f = make_field(mesh, basis, FieldShape::Scalar);
  for (int e = 0; e < mesh.num_elements(); ++e)
    f.segment(e, 0)[0] = e * std::pow(mesh.element_size(), mesh.dim() / 2.0);
  const Vec3 on_face(0.5, 0.25, 0.0);  // between elements 0 and 1
  const double left = eval_field(mesh, basis, f, 0, on_face);
  const double right = eval_field(mesh, basis, f, 1, on_face);
  CHECK(left != right);
}

TEST_CASE("vector projection fills components independently") {
  const auto mesh = build_mesh(2, 2, single_phase, BcSpec::all_periodic());
  const Basis basis(2, 1, mesh.element_size());
  const auto f = l2_project(mesh, basis, FieldShape::Vector,
                            [](const Vec3& x, int, int c) { return c == 0 ? x[0] : -x[1]; },
                            basis.degree() + 2);
  CHECK(std::abs(eval_field(mesh, basis, f, Vec3(0.3, 0.6, 0), 0) - 0.3) < 1e-13);
  CHECK(std::abs(eval_field(mesh, basis, f, Vec3(0.3, 0.6, 0), 1) + 0.6) < 1e-13);
}
