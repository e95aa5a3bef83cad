#include "stokesmg/block_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace stokesmg {

Eigen::MatrixXd& BlockSparseMatrix::block_ref(int r, int c) {
  auto& row = rows_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const Entry& e, int col) { return e.col < col; });
  if (it == row.end() || it->col != c)
    it = row.insert(it, Entry{c, Eigen::MatrixXd::Zero(row_size_, col_size_)});
  return it->block;
}

const Eigen::MatrixXd* BlockSparseMatrix::block_at(int r, int c) const {
  const auto& row = rows_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const Entry& e, int col) { return e.col < col; });
  if (it == row.end() || it->col != c) return nullptr;
  return &it->block;
}

std::size_t BlockSparseMatrix::num_blocks() const {
  std::size_t count = 0;
  for (const auto& row : rows_) count += row.size();
  return count;
}

void BlockSparseMatrix::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (x.size() != cols()) throw std::invalid_argument("BlockSparseMatrix::apply: dimension mismatch");
  y.setZero(rows());
  for (int r = 0; r < block_rows_; ++r) {
    auto out = y.segment(static_cast<long>(r) * row_size_, row_size_);
    for (const auto& e : rows_[r])
      out.noalias() += e.block * x.segment(static_cast<long>(e.col) * col_size_, col_size_);
  }
}

Eigen::VectorXd BlockSparseMatrix::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  apply(x, y);
  return y;
}

void BlockSparseMatrix::apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (x.size() != rows()) throw std::invalid_argument("BlockSparseMatrix::apply_transpose: dimension mismatch");
  y.setZero(cols());
  for (int r = 0; r < block_rows_; ++r) {
    const auto in = x.segment(static_cast<long>(r) * row_size_, row_size_);
    for (const auto& e : rows_[r])
      y.segment(static_cast<long>(e.col) * col_size_, col_size_).noalias() += e.block.transpose() * in;
  }
}

void BlockSparseMatrix::row_apply(int r, const Eigen::VectorXd& x, Eigen::VectorXd& y_r,
                                  bool skip_diagonal) const {
  for (const auto& e : rows_[r]) {
    if (skip_diagonal && e.col == r) continue;
    y_r.noalias() += e.block * x.segment(static_cast<long>(e.col) * col_size_, col_size_);
  }
}

void BlockSparseMatrix::scale(double s) {
  for (auto& row : rows_)
    for (auto& e : row) e.block *= s;
}

void BlockSparseMatrix::scale_rows_cols(const Eigen::VectorXd& row_s, const Eigen::VectorXd& col_s) {
  if (empty()) return;
  for (int r = 0; r < block_rows_; ++r)
    for (auto& e : rows_[r]) e.block *= row_s[r] * col_s[e.col];
}

void BlockSparseMatrix::add_scaled(const BlockSparseMatrix& other, double s) {
  if (other.block_rows_ != block_rows_ || other.block_cols_ != block_cols_ ||
      other.row_size_ != row_size_ || other.col_size_ != col_size_)
    throw std::invalid_argument("BlockSparseMatrix::add_scaled: shape mismatch");
  for (int r = 0; r < block_rows_; ++r)
    for (const auto& e : other.rows_[r]) block_ref(r, e.col) += s * e.block;
}

BlockSparseMatrix BlockSparseMatrix::transpose() const {
  BlockSparseMatrix t(block_cols_, block_rows_, col_size_, row_size_);
  for (int r = 0; r < block_rows_; ++r)
    for (const auto& e : rows_[r]) t.block_ref(e.col, r) = e.block.transpose();
  return t;
}

Eigen::MatrixXd BlockSparseMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(rows(), cols());
  for (int r = 0; r < block_rows_; ++r)
    for (const auto& e : rows_[r])
      dense.block(static_cast<long>(r) * row_size_, static_cast<long>(e.col) * col_size_, row_size_,
                  col_size_) = e.block;
  return dense;
}

BlockSparseMatrix::ColumnIndex BlockSparseMatrix::build_column_index() const {
  ColumnIndex index;
  index.cols.resize(block_cols_);
  for (int r = 0; r < block_rows_; ++r)
    for (const auto& e : rows_[r]) index.cols[e.col].emplace_back(r, &e.block);
  return index;
}

void BlockSparseMatrix::column_apply(const ColumnIndex& index, int c, const Eigen::VectorXd& x,
                                     Eigen::VectorXd& y_c, bool skip_diagonal) const {
  for (const auto& [r, block] : index.cols[c]) {
    if (skip_diagonal && r == c) continue;
    y_c.noalias() += block->transpose() * x.segment(static_cast<long>(r) * row_size_, row_size_);
  }
}

BlockSparseMatrix operator*(const BlockSparseMatrix& a, const BlockSparseMatrix& b) {
  if (a.block_cols() != b.block_rows() || a.col_size() != b.row_size())
    throw std::invalid_argument("BlockSparseMatrix multiply: dimension mismatch");
  BlockSparseMatrix c(a.block_rows(), b.block_cols(), a.row_size(), b.col_size());
  for (int r = 0; r < a.block_rows(); ++r) {
    for (const auto& ea : a.row(r)) {
      for (const auto& eb : b.row(ea.col)) c.block_ref(r, eb.col).noalias() += ea.block * eb.block;
    }
  }
  return c;
}

BlockSparseMatrix triple_product(const BlockSparseMatrix& r, const BlockSparseMatrix& a,
                                 const BlockSparseMatrix& p) {
  return (r * a) * p;
}

DenseFactorization::DenseFactorization(const Eigen::MatrixXd& a) : lu_(a) {
  const double scale = a.cwiseAbs().maxCoeff();
  const double tol = 1e-14 * (scale > 0.0 ? scale : 1.0);
  const auto diag = lu_.matrixLU().diagonal();
  for (int i = 0; i < diag.size(); ++i)
    if (std::abs(diag[i]) <= tol) throw std::runtime_error("factor_block: numerically singular block");
}

Eigen::VectorXd DenseFactorization::solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }

void DenseFactorization::solve_in_place(Eigen::VectorXd& rhs) const { rhs = lu_.solve(rhs); }

DenseFactorization factor_block(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("factor_block: square block required");
  return DenseFactorization(a);
}

SymEig sym_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: square matrix required");
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
  return SymEig{es.eigenvalues(), es.eigenvectors()};
}

}  // namespace stokesmg
