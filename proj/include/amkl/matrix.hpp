#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace amkl {

/// Dense row-major matrix of 64-bit reals. All problem data, parameter blocks
/// and residuals in this library are instances of this type; sizes stay at
/// desk scale (a few thousand entries), so the storage is a flat vector.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);  // zero-initialized
  Matrix(int rows, int cols, std::vector<double> data);

  static Matrix identity(int n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;
  std::string shape_str() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// ---- elementwise algebra ----
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double c, const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Standard product; each output entry accumulates over the inner index in
/// ascending order, so results are bit-reproducible.
Matrix matmul(const Matrix& a, const Matrix& b);

/// a * transpose(a), assembled exactly symmetric (upper triangle mirrored).
Matrix gram(const Matrix& a);

/// Square root of the sum of squared entries (Frobenius norm).
double frob_norm(const Matrix& a);

/// Frobenius inner product tr(a b^T).
double frob_inner(const Matrix& a, const Matrix& b);

/// Solves a x = b for symmetric positive definite `a` via an unpivoted
/// Cholesky factorization. A pivot <= 1e-12 * trace(a) is treated as
/// numerically indefinite and raises SingularError; the returned solution
/// honors the residual bound ||a x - b|| <= 1e-10 * (1 + ||b||).
Matrix solve_spd(const Matrix& a, const Matrix& b);

// ---- text serialization ----
// First line "rows cols", then one line per row, entries space-separated in
// full 17-significant-digit decimal.
void write_matrix_text(std::ostream& os, const Matrix& m);
Matrix read_matrix_text(std::istream& is);

}  // namespace amkl
