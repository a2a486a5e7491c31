#pragma once

#include <optional>

#include "fqrep/field.hpp"

namespace fqrep {

// Dense matrix over a fixed finite field level.  Value semantics; operations
// return fresh matrices.  Entries are element codes of the level.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}

  // Caps for user-supplied sizes are enforced at the input boundaries
  // (algebra/module constructors, file loaders), not on internal scratch.
  Matrix(FqRef F, u32 rows, u32 cols)
      : F_(std::move(F)), rows_(rows), cols_(cols),
        a_(static_cast<size_t>(rows) * cols, 0) {
    if (static_cast<u64>(rows) * cols > (u64{1} << 27))
      throw CapError("Matrix: implausibly large allocation");
  }

  static Matrix identity(FqRef F, u32 n) {
    Matrix m(std::move(F), n, n);
    for (u32 i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  static Matrix from_rows(FqRef F, const std::vector<std::vector<u32>>& rows) {
    u32 r = static_cast<u32>(rows.size());
    u32 c = r ? static_cast<u32>(rows[0].size()) : 0;
    Matrix m(std::move(F), r, c);
    for (u32 i = 0; i < r; ++i) {
      require(rows[i].size() == c, "Matrix: ragged rows");
      for (u32 j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
  }

  // n*n matrix from a flat row-major vector (as produced by FqLevel helpers)
  static Matrix from_flat(FqRef F, u32 rows, u32 cols, const std::vector<u32>& v) {
    require(v.size() == static_cast<size_t>(rows) * cols, "Matrix: bad flat size");
    Matrix m(std::move(F), rows, cols);
    m.a_ = v;
    return m;
  }

  u32 rows() const { return rows_; }
  u32 cols() const { return cols_; }
  bool empty_shape() const { return rows_ == 0 || cols_ == 0; }
  FqRef field() const { return F_; }
  const FqLevel& F() const { return *F_; }

  u32 at(u32 i, u32 j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  void set(u32 i, u32 j, u32 v) { a_[static_cast<size_t>(i) * cols_ + j] = v; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  bool is_zero() const {
    for (u32 v : a_)
      if (v) return false;
    return true;
  }

  Matrix operator+(const Matrix& o) const {
    check_same_shape(o);
    Matrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = F_->add(a_[i], o.a_[i]);
    return r;
  }

  Matrix operator-(const Matrix& o) const {
    check_same_shape(o);
    Matrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = F_->sub(a_[i], o.a_[i]);
    return r;
  }

  Matrix neg() const {
    Matrix r = *this;
    for (auto& v : r.a_) v = F_->neg(v);
    return r;
  }

  Matrix scal(u32 c) const {
    Matrix r = *this;
    for (auto& v : r.a_) v = F_->mul(c, v);
    return r;
  }

  Matrix operator*(const Matrix& o) const {
    require(F_ && o.F_ && F_->q() == o.F_->q() && F_->p() == o.F_->p(),
            "Matrix: field mismatch in product");
    require(cols_ == o.rows_, "Matrix: shape mismatch in product");
    Matrix r(F_, rows_, o.cols_);
    for (u32 i = 0; i < rows_; ++i) {
      for (u32 k = 0; k < cols_; ++k) {
        u32 v = at(i, k);
        if (!v) continue;
        const size_t orow = static_cast<size_t>(k) * o.cols_;
        const size_t rrow = static_cast<size_t>(i) * o.cols_;
        for (u32 j = 0; j < o.cols_; ++j) {
          u32 t = F_->mul(v, o.a_[orow + j]);
          r.a_[rrow + j] = F_->add(r.a_[rrow + j], t);
        }
      }
    }
    return r;
  }

  Matrix transpose() const {
    Matrix r(F_, cols_, rows_);
    for (u32 i = 0; i < rows_; ++i)
      for (u32 j = 0; j < cols_; ++j) r.set(j, i, at(i, j));
    return r;
  }

  Matrix submatrix(u32 r0, u32 c0, u32 nrows, u32 ncols) const {
    require(r0 + nrows <= rows_ && c0 + ncols <= cols_, "Matrix: bad submatrix");
    Matrix r(F_, nrows, ncols);
    for (u32 i = 0; i < nrows; ++i)
      for (u32 j = 0; j < ncols; ++j) r.set(i, j, at(r0 + i, c0 + j));
    return r;
  }

  Matrix col(u32 j) const { return submatrix(0, j, rows_, 1); }

  static Matrix hstack(const Matrix& a, const Matrix& b) {
    require(a.rows_ == b.rows_, "hstack: row mismatch");
    Matrix r(a.F_ ? a.F_ : b.F_, a.rows_, a.cols_ + b.cols_);
    for (u32 i = 0; i < a.rows_; ++i) {
      for (u32 j = 0; j < a.cols_; ++j) r.set(i, j, a.at(i, j));
      for (u32 j = 0; j < b.cols_; ++j) r.set(i, a.cols_ + j, b.at(i, j));
    }
    return r;
  }

  static Matrix vstack(const Matrix& a, const Matrix& b) {
    require(a.cols_ == b.cols_, "vstack: col mismatch");
    Matrix r(a.F_ ? a.F_ : b.F_, a.rows_ + b.rows_, a.cols_);
    for (u32 i = 0; i < a.rows_; ++i)
      for (u32 j = 0; j < a.cols_; ++j) r.set(i, j, a.at(i, j));
    for (u32 i = 0; i < b.rows_; ++i)
      for (u32 j = 0; j < a.cols_; ++j) r.set(a.rows_ + i, j, b.at(i, j));
    return r;
  }

  // Kronecker product (row-major vec convention)
  static Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix r(a.F_, a.rows_ * b.rows_, a.cols_ * b.cols_);
    for (u32 i = 0; i < a.rows_; ++i)
      for (u32 j = 0; j < a.cols_; ++j) {
        u32 v = a.at(i, j);
        if (!v) continue;
        for (u32 k = 0; k < b.rows_; ++k)
          for (u32 l = 0; l < b.cols_; ++l) {
            u32 t = a.F_->mul(v, b.at(k, l));
            if (t) r.set(i * b.rows_ + k, j * b.cols_ + l, t);
          }
      }
    return r;
  }

  Matrix pow(u64 e) const {
    require(rows_ == cols_, "Matrix: pow needs a square matrix");
    Matrix r = identity(F_, rows_);
    Matrix b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    require(rows_ == o.rows_ && cols_ == o.cols_, "Matrix: shape mismatch");
  }

  FqRef F_;
  u32 rows_, cols_;
  std::vector<u32> a_;
  friend struct EchelonWork;
};

// ---------------------------------------------------------------------------
// Gauss-Jordan elimination.  Generic path uses field tables; F_2 gets a
// bit-packed path (rows as u64 words).
// ---------------------------------------------------------------------------

struct Echelon {
  Matrix R;                    // reduced row echelon form
  std::vector<u32> pivot_cols; // one per nonzero row, increasing
  u32 rank = 0;
};

struct EchelonWork {
  // Pivots are searched only among the first `limit` columns (row operations
  // still apply across the full width); limit == UINT32_MAX means all columns.
  static Echelon run(const Matrix& A, u32 limit = UINT32_MAX) {
    if (limit > A.cols()) limit = A.cols();
    if (A.field() && A.F().p() == 2 && A.F().degree() == 1) return run_f2(A, limit);
    return run_generic(A, limit);
  }

  static Echelon run_generic(const Matrix& A, u32 limit) {
    const FqLevel& F = A.F();
    u32 rows = A.rows(), cols = A.cols();
    std::vector<std::vector<u32>> m(rows, std::vector<u32>(cols));
    for (u32 i = 0; i < rows; ++i)
      for (u32 j = 0; j < cols; ++j) m[i][j] = A.at(i, j);
    std::vector<u32> pivots;
    u32 r = 0;
    for (u32 c = 0; c < limit && r < rows; ++c) {
      u32 pr = r;
      while (pr < rows && m[pr][c] == 0) ++pr;
      if (pr == rows) continue;
      std::swap(m[pr], m[r]);
      u32 inv = F.inv(m[r][c]);
      if (inv != 1)
        for (u32 j = c; j < cols; ++j) m[r][j] = F.mul(inv, m[r][j]);
      for (u32 i = 0; i < rows; ++i) {
        if (i == r) continue;
        u32 f = m[i][c];
        if (!f) continue;
        for (u32 j = c; j < cols; ++j)
          m[i][j] = F.sub(m[i][j], F.mul(f, m[r][j]));
      }
      pivots.push_back(c);
      ++r;
    }
    Echelon e;
    e.R = Matrix(A.field(), rows, cols);
    for (u32 i = 0; i < rows; ++i)
      for (u32 j = 0; j < cols; ++j) e.R.set(i, j, m[i][j]);
    e.pivot_cols = std::move(pivots);
    e.rank = r;
    return e;
  }

  static Echelon run_f2(const Matrix& A, u32 limit) {
    u32 rows = A.rows(), cols = A.cols();
    u32 words = (cols + 63) / 64;
    std::vector<std::vector<u64>> m(rows, std::vector<u64>(words, 0));
    for (u32 i = 0; i < rows; ++i)
      for (u32 j = 0; j < cols; ++j)
        if (A.at(i, j)) m[i][j >> 6] |= (u64{1} << (j & 63));
    std::vector<u32> pivots;
    u32 r = 0;
    for (u32 c = 0; c < limit && r < rows; ++c) {
      u32 w = c >> 6;
      u64 bit = u64{1} << (c & 63);
      u32 pr = r;
      while (pr < rows && !(m[pr][w] & bit)) ++pr;
      if (pr == rows) continue;
      std::swap(m[pr], m[r]);
      for (u32 i = 0; i < rows; ++i) {
        if (i != r && (m[i][w] & bit)) {
          u64* dst = m[i].data();
          const u64* src = m[r].data();
          for (u32 k = w; k < words; ++k) dst[k] ^= src[k];
        }
      }
      pivots.push_back(c);
      ++r;
    }
    Echelon e;
    e.R = Matrix(A.field(), rows, cols);
    for (u32 i = 0; i < rows; ++i)
      for (u32 j = 0; j < cols; ++j)
        if (m[i][j >> 6] & (u64{1} << (j & 63))) e.R.set(i, j, 1);
    e.pivot_cols = std::move(pivots);
    e.rank = r;
    return e;
  }
};

inline Echelon rref(const Matrix& A) { return EchelonWork::run(A); }

inline u32 rank(const Matrix& A) {
  if (A.empty_shape()) return 0;
  return EchelonWork::run(A).rank;
}

// columns form a basis of { x : A x = 0 }
inline Matrix kernel_basis(const Matrix& A) {
  u32 n = A.cols();
  if (n == 0) return Matrix(A.field(), 0, 0);
  if (A.rows() == 0) return Matrix::identity(A.field(), n);
  Echelon e = EchelonWork::run(A);
  const FqLevel& F = A.F();
  std::vector<bool> is_pivot(n, false);
  for (u32 c : e.pivot_cols) is_pivot[c] = true;
  u32 nfree = n - e.rank;
  Matrix K(A.field(), n, nfree);
  u32 fc = 0;
  for (u32 c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    K.set(c, fc, 1);
    for (u32 r = 0; r < e.rank; ++r) {
      u32 pc = e.pivot_cols[r];
      u32 v = e.R.at(r, c);
      if (v) K.set(pc, fc, F.neg(v));
    }
    ++fc;
  }
  return K;
}

struct LinSolve {
  bool consistent = false;         // all columns solvable
  std::vector<bool> col_ok;        // per-column solvability
  Matrix particular;               // column j solves A x = B col j (where ok)
  Matrix kernel;                   // kernel basis of A
};

// Solve A X = B column-wise; also returns ker A.
inline LinSolve solve_linear(const Matrix& A, const Matrix& B) {
  require(A.rows() == B.rows(), "solve_linear: row mismatch");
  LinSolve out;
  u32 n = A.cols(), k = B.cols();
  // pivots restricted to A's block, so B's columns stay independent
  Echelon e = EchelonWork::run(Matrix::hstack(A, B), n);
  const FqLevel& F = A.F();
  out.col_ok.assign(k, true);
  for (u32 r = e.rank; r < A.rows(); ++r)
    for (u32 j = 0; j < k; ++j)
      if (e.R.at(r, n + j)) out.col_ok[j] = false;
  out.consistent = true;
  for (bool ok : out.col_ok)
    if (!ok) out.consistent = false;
  out.particular = Matrix(A.field(), n, k);
  for (u32 r = 0; r < e.rank; ++r) {
    u32 pc = e.pivot_cols[r];
    for (u32 j = 0; j < k; ++j)
      if (out.col_ok[j]) out.particular.set(pc, j, e.R.at(r, n + j));
  }
  std::vector<bool> is_pivot(n, false);
  for (u32 c : e.pivot_cols) is_pivot[c] = true;
  u32 nfree = n - e.rank;
  out.kernel = Matrix(A.field(), n, nfree);
  u32 fc = 0;
  for (u32 c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    out.kernel.set(c, fc, 1);
    for (u32 r = 0; r < e.rank; ++r) {
      u32 v = e.R.at(r, c);
      if (v) out.kernel.set(e.pivot_cols[r], fc, F.neg(v));
    }
    ++fc;
  }
  return out;
}

inline std::optional<Matrix> inverse(const Matrix& A) {
  require(A.rows() == A.cols(), "inverse: square matrix required");
  if (A.rows() == 0) return Matrix(A.field(), 0, 0);
  Echelon e = EchelonWork::run(
      Matrix::hstack(A, Matrix::identity(A.field(), A.rows())), A.cols());
  if (e.rank < A.rows()) return std::nullopt;
  return e.R.submatrix(0, A.cols(), A.rows(), A.cols());
}

inline bool is_invertible(const Matrix& A) {
  return A.rows() == A.cols() && rank(A) == A.rows();
}

// stack a list of equal-width matrices vertically
inline Matrix vstack_all(FqRef F, const std::vector<Matrix>& ms, u32 cols) {
  u32 rows = 0;
  for (const auto& m : ms) rows += m.rows();
  Matrix r(F, rows, cols);
  u32 off = 0;
  for (const auto& m : ms) {
    for (u32 i = 0; i < m.rows(); ++i)
      for (u32 j = 0; j < m.cols(); ++j) r.set(off + i, j, m.at(i, j));
    off += m.rows();
  }
  return r;
}

}  // namespace fqrep
