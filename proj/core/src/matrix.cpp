#include "hsipca/matrix.hpp"

#include <cmath>

#include "hsipca/error.hpp"

namespace hsipca {

SquareMatrix SquareMatrix::identity(std::size_t dim) {
  SquareMatrix m(dim);
  for (std::size_t k = 0; k < dim; ++k) m(k, k) = 1.0;
  return m;
}

std::vector<double> SquareMatrix::column(std::size_t c) const {
  std::vector<double> out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) out[r] = (*this)(r, c);
  return out;
}

SymMatrix SymMatrix::from_dense(std::size_t dim, std::span<const double> entries,
                                double tolerance) {
  if (entries.size() != dim * dim)
    throw InvalidArgument("dense matrix needs " + std::to_string(dim * dim) + " entries, got " +
                          std::to_string(entries.size()));
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double a = entries[i * dim + j];
      const double b = entries[j * dim + i];
      if (!std::isfinite(a) || !std::isfinite(b))
        throw InvalidArgument("matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not finite");
      const double d = std::fabs(a - b);
      if (d > worst) {
        worst = d;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > tolerance) throw SymmetryError(wi, wj, worst);

  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (!std::isfinite(entries[i * dim + i]))
      throw InvalidArgument("matrix entry (" + std::to_string(i) + "," + std::to_string(i) +
                            ") is not finite");
    m.entries_[i * dim + i] = entries[i * dim + i];
    for (std::size_t j = i + 1; j < dim; ++j)
      m.set(i, j, 0.5 * (entries[i * dim + j] + entries[j * dim + i]));
  }
  return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows, double tolerance) {
  const std::size_t dim = rows.size();
  std::vector<double> dense;
  dense.reserve(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    if (rows[r].size() != dim)
      throw InvalidArgument("row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " entries, expected " +
                            std::to_string(dim));
    dense.insert(dense.end(), rows[r].begin(), rows[r].end());
  }
  return from_dense(dim, dense, tolerance);
}

SymMatrix SymMatrix::diagonal(std::span<const double> values) {
  SymMatrix m(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) m.entries_[k * m.dim_ + k] = values[k];
  return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  entries_[i * dim_ + j] = value;
  entries_[j * dim_ + i] = value;
}

void SymMatrix::mirror_upper() {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i + 1; j < dim_; ++j) entries_[j * dim_ + i] = entries_[i * dim_ + j];
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) t += entries_[k * dim_ + k];
  return t;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : entries_) s += v * v;
  return std::sqrt(s);
}

void SymMatrix::scale(double factor) {
  for (double& v : entries_) v *= factor;
}

}  // namespace hsipca
