#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlitho {

enum class ErrorKind {
  argument,
  domain,
  capability,
  resolution,
  convergence,
  construction,
  parse,
  validation,
  io,
};

/// Base class of every exception thrown by the library. The kind is what the
/// C API maps onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

/// Momentum outside the propagating light cone, or a rotation leaving the
/// forward half-space.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

/// The requested computation path is not available for this input (e.g. tensor
/// quadrature beyond three dimensions).
class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what) : Error(ErrorKind::capability, what) {}
};

class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, double required_density)
      : Error(ErrorKind::resolution, what), required_density_(required_density) {}
  /// Samples per unit length (or per unit momentum) that would satisfy the check.
  double required_density() const noexcept { return required_density_; }

 private:
  double required_density_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::complex<double> best, double error)
      : Error(ErrorKind::convergence, what), best_(best), error_(error) {}
  std::complex<double> best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return error_; }

 private:
  std::complex<double> best_;
  double error_;
};

class ConstructionError : public Error {
 public:
  explicit ConstructionError(const std::string& what) : Error(ErrorKind::construction, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(ErrorKind::parse, what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Aggregates every violation found while validating a scenario.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(ErrorKind::validation, join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "scenario validation failed:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace qlitho
