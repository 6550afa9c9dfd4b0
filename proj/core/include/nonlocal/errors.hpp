#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "nonlocal/types.hpp"

namespace nonlocal {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain where the construction is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The radial tail integral does not converge for the declared growth.
class DivergentTailError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A field or kernel produced a non-finite value.
class InputError : public Error {
 public:
  InputError(const std::string& what, double where)
      : Error(what), where_(where) {}
  double where() const noexcept { return where_; }

 private:
  double where_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A lemma or replay hypothesis is violated at a sampled point.
class PreconditionFailure : public Error {
 public:
  PreconditionFailure(const std::string& what, Vec point)
      : Error(what), point_(std::move(point)) {}
  const Vec& point() const noexcept { return point_; }

 private:
  Vec point_;
};

/// A sampled value of the operator exceeded a certified constant.
class CertificationFailure : public Error {
 public:
  CertificationFailure(const std::string& what, Vec point, double value,
                       double bound)
      : Error(what), point_(std::move(point)), value_(value), bound_(bound) {}
  const Vec& point() const noexcept { return point_; }
  double value() const noexcept { return value_; }
  double bound() const noexcept { return bound_; }

 private:
  Vec point_;
  double value_;
  double bound_;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace nonlocal
