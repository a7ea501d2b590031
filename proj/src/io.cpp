#include "mc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mc/errors.hpp"

namespace mc {

std::string format_double(double v) {
  // Shortest representation that round-trips exactly.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

namespace {

double parse_double(const std::string& field, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || !std::isfinite(v))
    throw IoError(path + ":" + std::to_string(line) + ": bad numeric field '" + field + "'");
  return v;
}

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

CsvMatrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<std::pair<bool, double>>> rows;  // (present, value)
  std::size_t expected_cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    if (trimmed[0] == '#') continue;  // header / comments carry no payload we need
    std::vector<std::pair<bool, double>> row;
    std::stringstream ss(trimmed);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const std::string f = strip(field);
      if (f.empty())
        row.emplace_back(false, 0.0);
      else
        row.emplace_back(true, parse_double(f, path, lineno));
    }
    if (!trimmed.empty() && trimmed.back() == ',') row.emplace_back(false, 0.0);
    if (expected_cols == 0) expected_cols = row.size();
    if (row.size() != expected_cols)
      throw IoError(path + ":" + std::to_string(lineno) + ": ragged row (expected " +
                    std::to_string(expected_cols) + " fields, got " +
                    std::to_string(row.size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no data rows");

  CsvMatrix out;
  out.values = DenseMatrix(rows.size(), expected_cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < expected_cols; ++j) {
      if (rows[i][j].first)
        out.values(i, j) = rows[i][j].second;
      else
        out.missing.emplace_back(i, j);
    }
  return out;
}

void write_csv_matrix(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "# " << m.rows() << " " << m.cols() << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ",";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

ObservationData read_observation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  std::size_t rows = 0, cols = 0, count = 0;
  {
    std::stringstream ss(line);
    std::string hash;
    ss >> hash >> rows >> cols >> count;
    if (hash != "#" || rows == 0 || cols == 0)
      throw IoError(path + ":1: expected header '# rows cols count'");
  }
  std::vector<std::pair<std::size_t, std::size_t>> indices;
  DenseMatrix y(rows, cols);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    std::stringstream ss(trimmed);
    std::size_t i, j;
    double v;
    if (!(ss >> i >> j >> v) || !std::isfinite(v))
      throw IoError(path + ":" + std::to_string(lineno) + ": expected 'i<TAB>j<TAB>value'");
    if (i >= rows || j >= cols)
      throw IoError(path + ":" + std::to_string(lineno) + ": index out of range");
    indices.emplace_back(i, j);
    y(i, j) = v;
  }
  if (indices.size() != count)
    throw IoError(path + ": header count " + std::to_string(count) + " but " +
                  std::to_string(indices.size()) + " observation lines");
  return ObservationData{ObservationSet(rows, cols, std::move(indices)), std::move(y)};
}

void write_observation_file(const DenseMatrix& y_omega, const ObservationSet& omega,
                            const std::string& path) {
  if (y_omega.rows() != omega.rows() || y_omega.cols() != omega.cols())
    throw DimensionError("write_observation_file: shape mismatch");
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "# " << omega.rows() << " " << omega.cols() << " " << omega.count() << "\n";
  for (const auto& [i, j] : omega.indices())
    out << i << "\t" << j << "\t" << format_double(y_omega(i, j)) << "\n";
  if (!out) throw IoError(path + ": write failed");
}

ObservationData observations_from_csv(const CsvMatrix& csv) {
  std::vector<char> missing_mask(csv.values.size(), 0);
  for (const auto& [i, j] : csv.missing) missing_mask[i * csv.values.cols() + j] = 1;
  std::vector<std::pair<std::size_t, std::size_t>> present;
  for (std::size_t i = 0; i < csv.values.rows(); ++i)
    for (std::size_t j = 0; j < csv.values.cols(); ++j)
      if (!missing_mask[i * csv.values.cols() + j]) present.emplace_back(i, j);
  ObservationSet omega(csv.values.rows(), csv.values.cols(), std::move(present));
  DenseMatrix y = project_omega(csv.values, omega);
  return ObservationData{std::move(omega), std::move(y)};
}

}  // namespace mc
