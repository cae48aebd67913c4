#pragma once

#include <stdexcept>
#include <string>

namespace cpshell {

/// Base of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (x <= 0, r <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Request outside what the implementation supports (order cap, asymptotic validity).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A series or quadrature did not reach its tolerance within the caps.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double partial, double bound)
      : Error(what), partial_(partial), bound_(bound) {}
  double partial() const noexcept { return partial_; }
  double bound() const noexcept { return bound_; }

 private:
  double partial_;
  double bound_;
};

/// Evaluation hit a zero of a continued Jost function.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, int order, double location)
      : Error(what), order_(order), location_(location) {}
  int order() const noexcept { return order_; }
  double location() const noexcept { return location_; }

 private:
  int order_;
  double location_;
};

/// Asymptotic formula requested outside its validity region.
class RegimeError : public Error {
 public:
  RegimeError(const std::string& what, double slack) : Error(what), slack_(slack) {}
  double slack() const noexcept { return slack_; }

 private:
  double slack_;
};

/// Numerical differentiation could not resolve the requested precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Root or threshold search found no bracket.
class SearchError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration; carries the offending field path.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpshell
