#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sczm {

// Error taxonomy. Each class maps to a distinct CLI exit code.
struct InvalidInputError : std::runtime_error {
  explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

struct TopologyError : std::runtime_error {
  explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateGeometryError : std::runtime_error {
  explicit DegenerateGeometryError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when opposed rays keep disagreeing on parity; carries the counts.
struct InconsistentClassificationError : std::runtime_error {
  std::vector<long> ray_counts;
  InconsistentClassificationError(const std::string& what, std::vector<long> counts)
      : std::runtime_error(what), ray_counts(std::move(counts)) {}
};

struct CoverageError : std::runtime_error {
  explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ProjectionError : std::runtime_error {
  explicit ProjectionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sczm
