#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coxaff {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated (negative horizon, non-positive parameters, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent dimensions inside a model.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Riccati solution blew up before reaching the requested horizon.
class ExplosionError : public Error {
 public:
  ExplosionError(double time, const std::string& what)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Jet arithmetic lost too much precision (large negative probabilities).
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// Bad input data: non-finite observation, unparseable file, ...
class DataError : public Error {
 public:
  DataError(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  explicit DataError(const std::string& what) : Error(what), index_(npos) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Numerical failure inside a filter or solver.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// No optimizer start produced a finite likelihood.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace coxaff
