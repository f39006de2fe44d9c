#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace porecouple {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IncompatibleFields : public Error {
 public:
  using Error::Error;
};

/// Malformed MFF file; carries the byte offset where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// An iterative solver stopped without meeting its tolerance.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class DuplicateKey : public Error {
 public:
  using Error::Error;
};

class UnknownImplementation : public Error {
 public:
  using Error::Error;
};

class IllPosedProblem : public Error {
 public:
  using Error::Error;
};

/// A time step that cannot be taken as requested; suggests a smaller one.
class StepRejected : public Error {
 public:
  StepRejected(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

class SpeciationFailure : public Error {
 public:
  using Error::Error;
};

class ComponentError : public Error {
 public:
  using Error::Error;
};

class SimulationAbort : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace porecouple
