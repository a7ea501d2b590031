#pragma once

#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mc/matrix.hpp"
#include "mc/rng.hpp"

namespace mc {

/// The observed index set. Immutable after construction. Keeps both a hash
/// set (membership) and a sorted vector (deterministic iteration order).
class ObservationSet {
public:
  ObservationSet(std::size_t rows, std::size_t cols,
                 std::vector<std::pair<std::size_t, std::size_t>> indices);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t count() const { return sorted_.size(); }
  double fraction() const {
    return static_cast<double>(count()) / static_cast<double>(rows_ * cols_);
  }

  bool contains(std::size_t i, std::size_t j) const {
    return members_.count(i * cols_ + j) != 0;
  }

  /// Indices in row-major sorted order.
  const std::vector<std::pair<std::size_t, std::size_t>>& indices() const {
    return sorted_;
  }

  ObservationSet complement() const;

  /// True if some row or column of the grid has no observation at all
  /// (completion is hopeless for such lines; solvers proceed but flag it).
  bool has_unsampled_line() const;

private:
  std::size_t rows_, cols_;
  std::vector<std::pair<std::size_t, std::size_t>> sorted_;
  std::unordered_set<std::size_t> members_;  // flattened i*cols+j
};

/// Exactly m distinct entries, uniform over all size-m subsets
/// (partial Fisher-Yates over the flattened index range).
ObservationSet sample_uniform(std::size_t n1, std::size_t n2, std::size_t m, RngSeed rng);

/// Each entry included independently with probability p.
ObservationSet sample_bernoulli(std::size_t n1, std::size_t n2, double p, RngSeed rng);

/// P_Omega: entries on Omega copied, everything else exactly zero.
DenseMatrix project_omega(const DenseMatrix& x, const ObservationSet& omega);

}  // namespace mc
