#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace stokesmg {

/// Sparse matrix of dense element-by-element blocks with uniform block sizes.
/// Rows hold their (column, block) entries sorted by column; all products and
/// sweeps stream rows in order, so results are deterministic.
class BlockSparseMatrix {
public:
  struct Entry {
    int col;
    Eigen::MatrixXd block;
  };

  BlockSparseMatrix() = default;
  BlockSparseMatrix(int block_rows, int block_cols, int row_size, int col_size)
      : block_rows_(block_rows), block_cols_(block_cols), row_size_(row_size), col_size_(col_size),
        rows_(block_rows) {}

  int block_rows() const { return block_rows_; }
  int block_cols() const { return block_cols_; }
  int row_size() const { return row_size_; }
  int col_size() const { return col_size_; }
  long rows() const { return static_cast<long>(block_rows_) * row_size_; }
  long cols() const { return static_cast<long>(block_cols_) * col_size_; }
  bool empty() const { return block_rows_ == 0; }

  const std::vector<Entry>& row(int r) const { return rows_[r]; }

  /// Block at (r,c), inserted as zero if absent (kept sorted by column).
  Eigen::MatrixXd& block_ref(int r, int c);
  /// Block at (r,c) or nullptr.
  const Eigen::MatrixXd* block_at(int r, int c) const;

  std::size_t num_blocks() const;

  /// y = A x (y resized and overwritten).
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// y = A^T x via a column gather over the transpose index.
  void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

  /// Accumulate the action of row r on x into y_r (size row_size); when
  /// skip_diagonal is set the (r,r) block is omitted.
  void row_apply(int r, const Eigen::VectorXd& x, Eigen::VectorXd& y_r, bool skip_diagonal = false) const;

  void scale(double s);
  /// Block (r,c) *= row_s[r] * col_s[c].
  void scale_rows_cols(const Eigen::VectorXd& row_s, const Eigen::VectorXd& col_s);
  /// this += s * other (merging sparsity).
  void add_scaled(const BlockSparseMatrix& other, double s);

  BlockSparseMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

  /// Column-major index of (row, block pointer) pairs, valid while the matrix
  /// is unmodified. Built on demand for transpose-side row streaming.
  struct ColumnIndex {
    std::vector<std::vector<std::pair<int, const Eigen::MatrixXd*>>> cols;
  };
  ColumnIndex build_column_index() const;
  /// Accumulate the action of row r of A^T on x into y_r using the index.
  void column_apply(const ColumnIndex& index, int c, const Eigen::VectorXd& x, Eigen::VectorXd& y_c,
                    bool skip_diagonal = false) const;

private:
  int block_rows_ = 0;
  int block_cols_ = 0;
  int row_size_ = 0;
  int col_size_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

BlockSparseMatrix operator*(const BlockSparseMatrix& a, const BlockSparseMatrix& b);

/// R * A * P with merged sparsity; dimensions are checked.
BlockSparseMatrix triple_product(const BlockSparseMatrix& r, const BlockSparseMatrix& a,
                                 const BlockSparseMatrix& p);

/// Reusable direct solve of a small dense block via pivoted factorization.
/// Rejects numerically singular blocks (pivot below 1e-14 * ||A||).
class DenseFactorization {
public:
  DenseFactorization() = default;
  explicit DenseFactorization(const Eigen::MatrixXd& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  void solve_in_place(Eigen::VectorXd& rhs) const;
  int size() const { return static_cast<int>(lu_.rows()); }

private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

DenseFactorization factor_block(const Eigen::MatrixXd& a);

/// Symmetric eigendecomposition A = Q diag(lambda) Q^T; the input is
/// symmetrized before decomposition.
struct SymEig {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

SymEig sym_eig(const Eigen::MatrixXd& a);

}  // namespace stokesmg
