#include "mc/sampling.hpp"

#include <algorithm>
#include <numeric>

#include "mc/errors.hpp"

namespace mc {

ObservationSet::ObservationSet(std::size_t rows, std::size_t cols,
                               std::vector<std::pair<std::size_t, std::size_t>> indices)
    : rows_(rows), cols_(cols), sorted_(std::move(indices)) {
  if (rows_ == 0 || cols_ == 0) throw ParameterError("ObservationSet: empty grid");
  std::sort(sorted_.begin(), sorted_.end());
  members_.reserve(sorted_.size() * 2);
  for (const auto& [i, j] : sorted_) {
    if (i >= rows_ || j >= cols_)
      throw ParameterError("ObservationSet: index out of range");
    if (!members_.insert(i * cols_ + j).second)
      throw ParameterError("ObservationSet: duplicate index");
  }
}

ObservationSet ObservationSet::complement() const {
  std::vector<std::pair<std::size_t, std::size_t>> rest;
  rest.reserve(rows_ * cols_ - count());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (!contains(i, j)) rest.emplace_back(i, j);
  return ObservationSet(rows_, cols_, std::move(rest));
}

bool ObservationSet::has_unsampled_line() const {
  std::vector<char> row_seen(rows_, 0), col_seen(cols_, 0);
  for (const auto& [i, j] : sorted_) {
    row_seen[i] = 1;
    col_seen[j] = 1;
  }
  return std::find(row_seen.begin(), row_seen.end(), 0) != row_seen.end() ||
         std::find(col_seen.begin(), col_seen.end(), 0) != col_seen.end();
}

ObservationSet sample_uniform(std::size_t n1, std::size_t n2, std::size_t m, RngSeed rng) {
  const std::size_t total = n1 * n2;
  if (m > total) throw ParameterError("sample_uniform: m exceeds n1*n2");
  CounterRng gen(rng);
  std::vector<std::size_t> flat(total);
  std::iota(flat.begin(), flat.end(), 0);
  // Partial Fisher-Yates: after k swaps the prefix is a uniform size-k subset.
  std::vector<std::pair<std::size_t, std::size_t>> picked;
  picked.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = k + gen.next_below(total - k);
    std::swap(flat[k], flat[j]);
    picked.emplace_back(flat[k] / n2, flat[k] % n2);
  }
  return ObservationSet(n1, n2, std::move(picked));
}

ObservationSet sample_bernoulli(std::size_t n1, std::size_t n2, double p, RngSeed rng) {
  if (p < 0.0 || p > 1.0) throw ParameterError("sample_bernoulli: p must be in [0,1]");
  CounterRng gen(rng);
  std::vector<std::pair<std::size_t, std::size_t>> picked;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      if (gen.next_uniform() < p) picked.emplace_back(i, j);
  return ObservationSet(n1, n2, std::move(picked));
}

DenseMatrix project_omega(const DenseMatrix& x, const ObservationSet& omega) {
  if (x.rows() != omega.rows() || x.cols() != omega.cols())
    throw DimensionError("project_omega: matrix shape does not match observation grid");
  DenseMatrix out(x.rows(), x.cols());
  for (const auto& [i, j] : omega.indices()) out(i, j) = x(i, j);
  return out;
}

}  // namespace mc
