#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsipca {

// Dense square matrix, row-major. Used for eigenvector accumulators.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}

  static SquareMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }

  std::span<const double> entries() const noexcept { return entries_; }
  std::span<double> entries() noexcept { return entries_; }

  std::vector<double> column(std::size_t c) const;

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

// Symmetric matrix with full row-major storage.
//
// The public mutators keep (i,j) and (j,i) identical. The Jacobi solver
// writes through raw_entries() during a rotation batch and calls
// mirror_upper() afterwards to restore exact symmetry.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}

  // Throws SymmetryError naming the worst pair when |a_ij - a_ji| exceeds
  // `tolerance`; otherwise stores the average of each pair.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows,
                             double tolerance = 0.0);
  static SymMatrix from_dense(std::size_t dim, std::span<const double> entries,
                              double tolerance = 0.0);
  static SymMatrix diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> entries() const noexcept { return entries_; }
  std::span<double> raw_entries() noexcept { return entries_; }
  void mirror_upper();

  double trace() const;
  double frobenius_norm() const;
  void scale(double factor);

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

}  // namespace hsipca
