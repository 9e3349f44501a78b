#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsipca {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed header, CSV, JSON or raw payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

class SymmetryError : public Error {
 public:
  SymmetryError(std::size_t row, std::size_t col, double difference);

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  double difference() const noexcept { return difference_; }

 private:
  std::size_t row_;
  std::size_t col_;
  double difference_;
};

// Jacobi iteration hit its sweep cap before the stop condition held.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::size_t sweeps, double residual_offdiag_norm,
                   double residual_max_offdiag);

  std::size_t sweeps() const noexcept { return sweeps_; }
  double residual_norm() const noexcept { return residual_norm_; }
  double residual_max() const noexcept { return residual_max_; }

 private:
  std::size_t sweeps_;
  double residual_norm_;
  double residual_max_;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsipca
