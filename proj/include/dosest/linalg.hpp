#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dosest {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sized for the small systems simulated here
/// (agents in a network, plant states), not for general numerics.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  /// Builds from nested rows; throws std::invalid_argument on ragged input.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_rows(const std::vector<Vector>& rows);
  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] bool is_symmetric(double tol = 0.0) const;
  [[nodiscard]] double one_norm() const;
  [[nodiscard]] double max_abs() const;
  [[nodiscard]] std::vector<Vector> to_rows() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Vector operator*(const Matrix& a, std::span<const double> x);
  friend Matrix operator*(double s, Matrix m) { return m *= s; }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Euclidean norm.
[[nodiscard]] double norm(std::span<const double> x);

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations. Iterates until every off-diagonal entry is below
/// 1e-12 * max(1, max|a_ij|). Throws std::invalid_argument if the input is
/// not square and symmetric.
[[nodiscard]] Vector symmetric_eigenvalues(const Matrix& a);

/// Matrix exponential by scaling and squaring around a truncated Taylor
/// series; accurate to roughly 1e-13 relative for the well-scaled matrices
/// used by the plants.
[[nodiscard]] Matrix expm(const Matrix& a);

}  // namespace dosest
