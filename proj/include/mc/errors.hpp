#pragma once

#include <stdexcept>
#include <string>

namespace mc {

// Bad user-supplied parameter (out-of-range m, negative tolerance, ...).
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-conforming shapes.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Iterative method failed to converge, LAPACK breakdown, NaN/Inf encountered.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Problem is singular / not expected to have a solution (e.g. certificate
// construction when the sampling operator is not injective on T).
class IllPosedError : public std::runtime_error {
public:
  explicit IllPosedError(const std::string& what) : std::runtime_error(what) {}
};

// File ingestion problems; message carries the offending location.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mc
