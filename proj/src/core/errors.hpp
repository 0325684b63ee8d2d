#pragma once

#include <stdexcept>
#include <string>

namespace kgb {

// Error categories map one-to-one onto the C API status codes and the CLI
// exit codes (config 1, numeric 2, io 3).
enum class ErrorKind {
  Domain,
  Numeric,
  Config,
  Io,
  Monotonicity,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

struct MonotonicityError : Error {
  explicit MonotonicityError(const std::string& what) : Error(ErrorKind::Monotonicity, what) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& what) : Error(ErrorKind::Internal, what) {}
};

// Root finding / quadrature failure; carries the last residual seen.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double residual)
      : Error(ErrorKind::Numeric, what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace kgb
