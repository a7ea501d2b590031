#include "mc/matrix.hpp"

#include <cblas.h>

#include <cmath>
#include <utility>

namespace mc {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw DimensionError("DenseMatrix: data length does not match rows*cols");
  check_finite("DenseMatrix construction");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  m.check_finite("DenseMatrix::diagonal");
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  if (!same_shape(other)) throw DimensionError("operator+=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  check_finite("operator+=");
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  if (!same_shape(other)) throw DimensionError("operator-=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  check_finite("operator-=");
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double scalar) {
  for (double& v : data_) v *= scalar;
  check_finite("operator*=");
  return *this;
}

void DenseMatrix::check_finite(const char* context) const {
  for (double v : data_) {
    if (!std::isfinite(v))
      throw NumericalError(std::string("non-finite entry after ") + context);
  }
}

namespace {

DenseMatrix gemm(CBLAS_TRANSPOSE ta, CBLAS_TRANSPOSE tb, const DenseMatrix& a,
                 const DenseMatrix& b) {
  const std::size_t m = (ta == CblasNoTrans) ? a.rows() : a.cols();
  const std::size_t k = (ta == CblasNoTrans) ? a.cols() : a.rows();
  const std::size_t kb = (tb == CblasNoTrans) ? b.rows() : b.cols();
  const std::size_t n = (tb == CblasNoTrans) ? b.cols() : b.rows();
  if (k != kb) throw DimensionError("multiply: inner dimensions do not conform");
  DenseMatrix c(m, n);
  if (m == 0 || n == 0) return c;
  if (k == 0) return c;
  cblas_dgemm(CblasRowMajor, ta, tb, static_cast<int>(m), static_cast<int>(n),
              static_cast<int>(k), 1.0, a.data(), static_cast<int>(a.cols()), b.data(),
              static_cast<int>(b.cols()), 0.0, c.data(), static_cast<int>(n));
  c.check_finite("multiply");
  return c;
}

}  // namespace

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  return gemm(CblasNoTrans, CblasNoTrans, a, b);
}

DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  return gemm(CblasTrans, CblasNoTrans, a, b);
}

DenseMatrix multiply_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  return gemm(CblasNoTrans, CblasTrans, a, b);
}

double frobenius_norm(const DenseMatrix& x) {
  double s = 0.0;
  for (double v : x.entries()) s += v * v;
  return std::sqrt(s);
}

double inner_product(const DenseMatrix& x, const DenseMatrix& y) {
  if (!x.same_shape(y)) throw DimensionError("inner_product: shape mismatch");
  double s = 0.0;
  auto xe = x.entries(), ye = y.entries();
  for (std::size_t k = 0; k < xe.size(); ++k) s += xe[k] * ye[k];
  return s;
}

double max_abs_entry(const DenseMatrix& x) {
  double m = 0.0;
  for (double v : x.entries()) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace mc
