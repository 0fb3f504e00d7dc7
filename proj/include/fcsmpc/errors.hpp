#pragma once

#include <stdexcept>
#include <string>

namespace fcsmpc {

/// Error categories surfaced through the C API status codes and the CLI
/// exit statuses.
enum class ErrorCode {
  validation,   ///< malformed or out-of-contract input
  dimension,    ///< matrix/vector shape mismatch
  singular,     ///< (numerically) singular linear system
  unstable,     ///< spectral radius >= 1 where Schur stability is required
  infeasible,   ///< no admissible input sequence satisfies the constraints
  capacity,     ///< enumeration budget exceeded
  io,           ///< file or parse failure
  internal,     ///< unexpected condition
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what)
      : Error(ErrorCode::validation, what) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what)
      : Error(ErrorCode::dimension, what) {}
};

struct SingularMatrixError : Error {
  explicit SingularMatrixError(const std::string& what)
      : Error(ErrorCode::singular, what) {}
};

struct UnstableSystemError : Error {
  explicit UnstableSystemError(const std::string& what)
      : Error(ErrorCode::unstable, what) {}
};

struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& what)
      : Error(ErrorCode::infeasible, what) {}
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& what)
      : Error(ErrorCode::capacity, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace fcsmpc
