#pragma once

#include <stdexcept>
#include <string>

namespace decflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Topology problems: non-manifold faces, bad indices, orientation.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Degenerate simplices and points outside the expected cell.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Hodge star cannot be formed (zero dual measure, interface not well-centered, bad permeability).
class HodgeError : public Error {
 public:
  using Error::Error;
};

/// Linear solver failures: non-convergence, singular systems, size limits.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Ill-posed Darcy problem data (consistency, viscosity, pin, disconnected domain).
class ProblemError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files or configuration values.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// File system failures while reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace decflow
