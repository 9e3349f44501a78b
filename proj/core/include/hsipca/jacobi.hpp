#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsipca/matrix.hpp"
#include "hsipca/parallel.hpp"

namespace hsipca {

enum class PivotStrategy {
  classical,  // largest off-diagonal entry each rotation
  cyclic,     // row-wise sweep over the upper triangle
  parallel,   // batches of pivots with pairwise disjoint indices
};

std::string_view to_string(PivotStrategy strategy);
PivotStrategy parse_strategy(std::string_view text);

struct JacobiConfig {
  PivotStrategy strategy = PivotStrategy::cyclic;
  // Stop once every |c_ij| <= epsilon_rel * (largest initial |c_ij|, or 1).
  double epsilon_rel = 1e-10;
  std::size_t max_sweeps = 50;
  bool record_history = false;
  // Flip each eigenvector so its largest-magnitude entry is positive.
  bool normalize_signs = false;

  void validate() const;
};

// Plane rotation that zeroes c_ij. The rotation matrix P equals the identity
// except P_ii = P_jj = cos_a, P_ij = sin_a, P_ji = -sin_a.
struct RotationParams {
  std::size_t i = 0;
  std::size_t j = 0;
  double m = 0.0;  // 2 c_ij / (c_jj - c_ii), +-inf when the diagonal ties
  double t = 0.0;  // tan(alpha), |t| <= 1
  double cos_a = 1.0;
  double sin_a = 0.0;
};

struct SweepRecord {
  std::size_t sweep = 0;
  double offdiag_norm = 0.0;
  std::size_t rotations = 0;
};

struct EigenDecomposition {
  std::size_t dim = 0;
  std::vector<double> eigenvalues;  // descending
  SquareMatrix eigenvectors;        // column k pairs with eigenvalues[k]
  std::size_t sweeps_used = 0;
  std::size_t rotations_used = 0;
  std::vector<SweepRecord> history;

  std::vector<double> eigenvector(std::size_t k) const { return eigenvectors.column(k); }
};

RotationParams rotation_params(double c_ii, double c_jj, double c_ij, std::size_t i,
                               std::size_t j);

// C <- P^T C P and E <- E P for one rotation: rows i, j first, then columns
// i, j. c(i,j) and c(j,i) are written as exact zeros.
void apply_rotation(SymMatrix& c, SquareMatrix& e, const RotationParams& r);

// Same for a batch of rotations with pairwise disjoint indices: every row
// update, a barrier, every column update. Symmetry is restored from the
// upper triangle afterwards.
void apply_rotation_batch(SymMatrix& c, SquareMatrix& e, std::span<const RotationParams> batch,
                          Executor& exec = serial_executor());

// sqrt(sum over i != j of c_ij^2)
double offdiag_norm(const SymMatrix& c);
double max_offdiag(const SymMatrix& c);

// Throws ConvergenceError once max_sweeps is exhausted. For the classical
// strategy a "sweep" is n(n-1)/2 rotations.
EigenDecomposition jacobi_eigen(const SymMatrix& c, const JacobiConfig& cfg = {},
                                Executor& exec = serial_executor());

// index,eigenvalue,explained_variance (share of the total eigenvalue mass)
std::string eigen_summary_csv(const EigenDecomposition& eig);
void write_eigen_summary_csv(const EigenDecomposition& eig, const std::filesystem::path& path);
// sweep,offdiag_norm,rotations
void write_history_csv(const EigenDecomposition& eig, const std::filesystem::path& path);

}  // namespace hsipca
