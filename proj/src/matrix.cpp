#include "amkl/matrix.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "amkl/errors.hpp"
#include "amkl/numfmt.hpp"

namespace amkl {

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw ShapeError("Matrix: dimensions must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> data) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0 ||
      data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ShapeError("Matrix: data length " + std::to_string(data.size()) +
                     " does not match shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  data_ = std::move(data);
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ShapeError("Matrix::from_rows: empty input");
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(m.cols())) {
      throw ShapeError("Matrix::from_rows: ragged row " + std::to_string(i));
    }
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                     b.shape_str());
  }
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix operator*(double c, const Matrix& a) {
  Matrix out = a;
  for (double& v : out.data()) v *= c;
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shape mismatch (" + a.shape_str() + ")*(" + b.shape_str() + ")");
  }
  Matrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix gram(const Matrix& a) {
  Matrix out(a.rows(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i; j < a.rows(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols(); ++k) acc += a(i, k) * a(j, k);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

double frob_norm(const Matrix& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v * v;
  return std::sqrt(acc);
}

double frob_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frob_inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
  return acc;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) {
    throw ShapeError("solve_spd: matrix not square, " + a.shape_str());
  }
  if (a.rows() != b.rows()) {
    throw ShapeError("solve_spd: rhs rows mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
  const int n = a.rows();
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += a(i, i);
  const double pivot_tol = 1e-12 * trace;

  // Lower Cholesky factor, in place.
  Matrix chol(n, n);
  for (int j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (int k = 0; k < j; ++k) diag -= chol(j, k) * chol(j, k);
    if (diag <= pivot_tol) {
      throw SingularError("solve_spd: pivot " + format_g17(diag) + " at column " +
                          std::to_string(j) + " (matrix not positive definite)");
    }
    chol(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (int k = 0; k < j; ++k) v -= chol(i, k) * chol(j, k);
      chol(i, j) = v / chol(j, j);
    }
  }

  // Forward and back substitution, one rhs column at a time.
  Matrix x = b;
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = 0; i < n; ++i) {
      double v = x(i, c);
      for (int k = 0; k < i; ++k) v -= chol(i, k) * x(k, c);
      x(i, c) = v / chol(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = x(i, c);
      for (int k = i + 1; k < n; ++k) v -= chol(k, i) * x(k, c);
      x(i, c) = v / chol(i, i);
    }
  }

  const double resid = frob_norm(matmul(a, x) - b);
  if (!(resid <= 1e-10 * (1.0 + frob_norm(b)))) {
    throw SingularError("solve_spd: residual " + format_g17(resid) +
                        " exceeds bound (matrix too ill-conditioned)");
  }
  return x;
}

void write_matrix_text(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ' ';
      os << format_g17(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix_text(std::istream& is) {
  int rows = 0;
  int cols = 0;
  if (!(is >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw ShapeError("read_matrix_text: bad header");
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      if (!(is >> m(i, j))) throw ShapeError("read_matrix_text: truncated data");
    }
  return m;
}

}  // namespace amkl
