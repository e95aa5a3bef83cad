#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "stokesmg/block_matrix.hpp"

#include <random>

using namespace stokesmg;

namespace {

BlockSparseMatrix random_block_matrix(int rows, int cols, int rb, int cb, double density, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  BlockSparseMatrix m(rows, cols, rb, cb);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (r != c && coin(gen) > density) continue;
      auto& b = m.block_ref(r, c);
      for (int i = 0; i < rb; ++i)
        for (int j = 0; j < cb; ++j) b(i, j) = dist(gen);
    }
  return m;
}

}  // namespace

TEST_CASE("spmv identity and zero") {
  BlockSparseMatrix id(3, 3, 2, 2);
  for (int r = 0; r < 3; ++r) id.block_ref(r, r) = Eigen::Matrix2d::Identity();
  const Eigen::VectorXd x = oracles::random_coeffs(6, 7);
  CHECK((id.apply(x) - x).norm() == 0.0);

  BlockSparseMatrix zero(3, 3, 2, 2);
  CHECK(zero.apply(x).norm() == 0.0);
}

TEST_CASE("spmv matches dense expansion") {
  const auto m = random_block_matrix(5, 5, 3, 3, 0.4, 11);
  const Eigen::VectorXd x = oracles::random_coeffs(15, 3);
  const Eigen::VectorXd y = m.apply(x);
  const Eigen::VectorXd yd = m.to_dense() * x;
  CHECK((y - yd).cwiseAbs().maxCoeff() < 1e-13);

  Eigen::VectorXd yt;
  m.apply_transpose(x, yt);
  CHECK((yt - m.to_dense().transpose() * x).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spmv is linear") {
  const auto m = random_block_matrix(4, 4, 3, 3, 0.5, 23);
  const Eigen::VectorXd x = oracles::random_coeffs(12, 5);
  const Eigen::VectorXd y = oracles::random_coeffs(12, 6);
  const Eigen::VectorXd lhs = m.apply(2.5 * x - 0.5 * y);
  const Eigen::VectorXd rhs = 2.5 * m.apply(x) - 0.5 * m.apply(y);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("double transpose is exact") {
  const auto m = random_block_matrix(4, 6, 2, 3, 0.5, 29);
  const auto mtt = m.transpose().transpose();
  CHECK(m.block_rows() == mtt.block_rows());
  for (int r = 0; r < m.block_rows(); ++r) {
    CHECK(m.row(r).size() == mtt.row(r).size());
    for (std::size_t i = 0; i < m.row(r).size(); ++i) {
      CHECK(m.row(r)[i].col == mtt.row(r)[i].col);
      CHECK((m.row(r)[i].block - mtt.row(r)[i].block).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("triple product with identities returns the middle factor") {
  const auto a = random_block_matrix(4, 4, 2, 2, 0.6, 31);
  BlockSparseMatrix id(4, 4, 2, 2);
  for (int r = 0; r < 4; ++r) id.block_ref(r, r) = Eigen::Matrix2d::Identity();
  const auto rap = triple_product(id, a, id);
  CHECK((rap.to_dense() - a.to_dense()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("triple product matches dense oracle") {
  const auto r = random_block_matrix(3, 6, 2, 2, 0.5, 37);
  const auto a = random_block_matrix(6, 6, 2, 2, 0.4, 41);
  const auto p = random_block_matrix(6, 3, 2, 2, 0.5, 43);
  const auto rap = triple_product(r, a, p);
  const Eigen::MatrixXd dense = r.to_dense() * a.to_dense() * p.to_dense();
  CHECK((rap.to_dense() - dense).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("triple product transpose identity") {
  auto a = random_block_matrix(6, 6, 2, 2, 0.4, 47);
  // symmetrize
  const Eigen::MatrixXd sym = 0.5 * (a.to_dense() + a.to_dense().transpose());
  BlockSparseMatrix as(6, 6, 2, 2);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      const Eigen::MatrixXd b = sym.block(2 * r, 2 * c, 2, 2);
      if (b.cwiseAbs().maxCoeff() > 0) as.block_ref(r, c) = b;
    }
  const auto p = random_block_matrix(6, 4, 2, 2, 0.6, 53);
  const auto r = p.transpose();
  const auto rap = triple_product(r, as, p);
  CHECK((rap.to_dense() - rap.to_dense().transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("factor_block solves small systems") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd rhs = oracles::random_coeffs(4, 59);
  CHECK((factor_block(id).solve(rhs) - rhs).norm() == 0.0);

  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  Eigen::VectorXd b(2);
  b << 1, 2;
  const Eigen::VectorXd x = factor_block(swap).solve(b);
  CHECK(x[0] == 2.0);
  CHECK(x[1] == 1.0);
}

TEST_CASE("factor_block handles random symmetric indefinite blocks") {
  std::mt19937 gen(61);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd a(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = dist(gen);
  const Eigen::VectorXd b = oracles::random_coeffs(50, 67);
  const Eigen::VectorXd x = factor_block(a).solve(b);
  CHECK((a * x - b).norm() / b.norm() < 1e-12);
}

TEST_CASE("factor_block rejects singular blocks") {
  Eigen::MatrixXd sing = Eigen::MatrixXd::Zero(3, 3);
  sing(0, 0) = 1.0;
  sing(1, 1) = 1.0;
  CHECK_THROWS(factor_block(sing));
}

TEST_CASE("sym_eig on small matrices") {
  Eigen::MatrixXd diag = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const SymEig e1 = sym_eig(diag);
  CHECK(std::abs(e1.eigenvalues[0] - 1) < 1e-14);
  CHECK(std::abs(e1.eigenvalues[1] - 2) < 1e-14);
  CHECK(std::abs(e1.eigenvalues[2] - 3) < 1e-14);

  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const SymEig e2 = sym_eig(swap);
  CHECK(std::abs(e2.eigenvalues[0] + 1) < 1e-14);
  CHECK(std::abs(e2.eigenvalues[1] - 1) < 1e-14);
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  std::mt19937 gen(71);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd a(100, 100);
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = dist(gen);
  const SymEig e = sym_eig(a);
  const Eigen::MatrixXd rec = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
  CHECK((rec - a).norm() <= 1e-11 * a.norm());
  const Eigen::MatrixXd qtq = e.eigenvectors * e.eigenvectors.transpose();
  CHECK((qtq - Eigen::MatrixXd::Identity(100, 100)).norm() < 1e-12 * 100);
}

TEST_CASE("dimension mismatches are rejected") {
  const auto a = random_block_matrix(3, 3, 2, 2, 0.5, 73);
  Eigen::VectorXd wrong(5);
  wrong.setZero();
  CHECK_THROWS(a.apply(wrong));
  const auto b = random_block_matrix(4, 4, 2, 2, 0.5, 79);
  CHECK_THROWS(a * b);
}
