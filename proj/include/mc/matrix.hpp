#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mc/errors.hpp"

namespace mc {

/// Dense real matrix, row-major storage. The universal carrier type for the
/// whole toolkit. Entries are guaranteed finite: constructors and every
/// operation producing a matrix validate against NaN/Inf.
class DenseMatrix {
public:
  DenseMatrix() : rows_(0), cols_(0) {}

  /// Zero matrix of the given shape.
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  /// Takes ownership of row-major data; throws if the length does not match
  /// or any entry is non-finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }
  std::span<const double> entries() const { return data_; }

  DenseMatrix transpose() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double scalar);

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  /// Throws NumericalError if any entry is NaN or Inf.
  void check_finite(const char* context) const;

private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

/// C = A * B (BLAS dgemm underneath).
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

/// C = A^T * B.
DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b);

/// C = A * B^T.
DenseMatrix multiply_a_bt(const DenseMatrix& a, const DenseMatrix& b);

/// sqrt(sum of squared entries).
double frobenius_norm(const DenseMatrix& x);

/// trace(X^T Y); shapes must conform.
double inner_product(const DenseMatrix& x, const DenseMatrix& y);

double max_abs_entry(const DenseMatrix& x);

}  // namespace mc
