#include "hsipca/error.hpp"

#include <sstream>

namespace hsipca {

namespace {

std::string symmetry_message(std::size_t row, std::size_t col, double difference) {
  std::ostringstream out;
  out << "matrix is not symmetric: worst pair (" << row << "," << col
      << ") differs by " << difference;
  return out.str();
}

std::string convergence_message(std::size_t sweeps, double norm, double max_entry) {
  std::ostringstream out;
  out << "Jacobi did not converge after " << sweeps
      << " sweeps: residual off-diagonal norm " << norm << ", largest entry " << max_entry;
  return out.str();
}

}  // namespace

SymmetryError::SymmetryError(std::size_t row, std::size_t col, double difference)
    : Error(symmetry_message(row, col, difference)),
      row_(row),
      col_(col),
      difference_(difference) {}

ConvergenceError::ConvergenceError(std::size_t sweeps, double residual_offdiag_norm,
                                   double residual_max_offdiag)
    : Error(convergence_message(sweeps, residual_offdiag_norm, residual_max_offdiag)),
      sweeps_(sweeps),
      residual_norm_(residual_offdiag_norm),
      residual_max_(residual_max_offdiag) {}

}  // namespace hsipca
