#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mc/matrix.hpp"
#include "mc/sampling.hpp"

namespace mc {

/// CSV matrix file: optional header line `# rows cols`, row-major comma
/// separated rows; empty fields mark missing entries (value 0 in `values`,
/// position listed in `missing`).
struct CsvMatrix {
  DenseMatrix values;
  std::vector<std::pair<std::size_t, std::size_t>> missing;
};

CsvMatrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const DenseMatrix& m, const std::string& path);

/// Observation file: header `# rows cols count`, then one `i<TAB>j<TAB>value`
/// line per observation, 0-based indices.
struct ObservationData {
  ObservationSet omega;
  DenseMatrix y_omega;
};

ObservationData read_observation_file(const std::string& path);
void write_observation_file(const DenseMatrix& y_omega, const ObservationSet& omega,
                            const std::string& path);

/// CSV with holes reinterpreted as observations: present cells become the
/// observed set, empty fields are unobserved.
ObservationData observations_from_csv(const CsvMatrix& csv);

/// Shortest round-trip-exact decimal representation of a double; used for
/// all numeric file output so records are byte-stable.
std::string format_double(double v);

}  // namespace mc
