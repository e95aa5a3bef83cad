#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stokesmg/basis.hpp"

#include <cmath>

using namespace stokesmg;

TEST_CASE("gauss rule integrates polynomials of degree 2q-1 exactly") {
  for (int q = 1; q <= 10; ++q) {
    const GaussRule rule = gauss_legendre(q);
    for (int deg = 0; deg <= 2 * q - 1; ++deg) {
      double num = 0.0;
      for (int i = 0; i < q; ++i) num += rule.weights[i] * std::pow(rule.nodes[i], deg);
      const double exact = (deg % 2 == 0) ? 2.0 / (deg + 1) : 0.0;
      CHECK(std::abs(num - exact) < 1e-14);
    }
    CHECK(std::abs(rule.weights.sum() - 2.0) < 1e-14);
  }
}

TEST_CASE("legendre recurrence matches closed forms") {
  for (double t : {-0.9, -0.3, 0.0, 0.4, 1.0}) {
    CHECK(legendre(0, t) == 1.0);
    CHECK(legendre(1, t) == t);
    CHECK(std::abs(legendre(2, t) - 0.5 * (3 * t * t - 1)) < 1e-15);
    CHECK(std::abs(legendre_deriv(2, t) - 3 * t) < 1e-15);
    CHECK(std::abs(legendre_deriv(3, t) - 0.5 * (15 * t * t - 3)) < 1e-14);
  }
}

TEST_CASE("element basis is orthonormal") {
  for (int d : {2, 3}) {
    for (int p : {1, 2, 3}) {
      const double h = 0.125;
      const Basis basis(d, p, h);
      const VolumeTables vt = make_volume_tables(basis, p + 1);
      const Eigen::MatrixXd mass = vt.values.transpose() * vt.weights.asDiagonal() * vt.values;
      const Eigen::MatrixXd err = mass - Eigen::MatrixXd::Identity(basis.size(), basis.size());
      CHECK(err.cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("volume derivative tables match finite differences") {
  const Basis basis(2, 3, 0.25);
  const Vec3 x(0.1, 0.2, 0.0);
  Eigen::VectorXd v0, v1, dv;
  for (int axis = 0; axis < 2; ++axis) {
    Vec3 hi = x, lo = x;
    hi[axis] += 1e-6;
    lo[axis] -= 1e-6;
    basis.eval(hi, v1);
    basis.eval(lo, v0);
    basis.eval_deriv(x, axis, dv);
    CHECK(((v1 - v0) / 2e-6 - dv).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("face tables integrate trace products") {
  // On the unit-square element scaled to h, the trace of phi against itself
  // over a face equals the (d-1)-dimensional mass of the trace values.
  const double h = 0.5;
  const Basis basis(2, 2, h);
  const FaceTables ft = make_face_tables(basis, 0, 4);
  CHECK(std::abs(ft.weights.sum() - h) < 1e-14);
  // the constant basis function traces to h^{-d/2} on both sides, so the
  // trace Gram entry is h^{-d} * (face measure h)
  const Eigen::MatrixXd gram = ft.trace_hi.transpose() * ft.weights.asDiagonal() * ft.trace_hi;
  CHECK(std::abs(gram(0, 0) - std::pow(h, -2.0) * h) < 1e-13);
}
