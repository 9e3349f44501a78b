#include "hsipca/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <limits>
#include <numeric>

#include "hsipca/error.hpp"

namespace hsipca {

std::string_view to_string(PivotStrategy strategy) {
  switch (strategy) {
    case PivotStrategy::classical: return "classical";
    case PivotStrategy::cyclic: return "cyclic";
    case PivotStrategy::parallel: return "parallel";
  }
  return "unknown";
}

PivotStrategy parse_strategy(std::string_view text) {
  if (text == "classical") return PivotStrategy::classical;
  if (text == "cyclic") return PivotStrategy::cyclic;
  if (text == "parallel") return PivotStrategy::parallel;
  throw InvalidArgument("unknown pivot strategy '" + std::string(text) +
                        "' (expected classical, cyclic or parallel)");
}

void JacobiConfig::validate() const {
  if (!(epsilon_rel > 0.0) || !std::isfinite(epsilon_rel))
    throw InvalidArgument("epsilon_rel must be a positive finite number");
  if (max_sweeps < 1) throw InvalidArgument("max_sweeps must be at least 1");
}

RotationParams rotation_params(double c_ii, double c_jj, double c_ij, std::size_t i,
                               std::size_t j) {
  if (i >= j) throw InvalidArgument("rotation pivot needs i < j");
  RotationParams r;
  r.i = i;
  r.j = j;
  if (c_ij == 0.0) return r;

  const double diff = c_jj - c_ii;
  if (diff == 0.0) {
    r.m = std::copysign(std::numeric_limits<double>::infinity(), c_ij);
    r.t = std::copysign(1.0, c_ij);
  } else {
    r.m = 2.0 * c_ij / diff;
    // (-1 + sqrt(1 + m^2)) / m rewritten without the cancellation.
    r.t = std::isfinite(r.m) ? r.m / (1.0 + std::hypot(1.0, r.m)) : std::copysign(1.0, r.m);
  }
  r.cos_a = 1.0 / std::sqrt(1.0 + r.t * r.t);
  r.sin_a = r.t * r.cos_a;
  return r;
}

namespace {

void check_pivot(std::size_t dim, const RotationParams& r) {
  if (r.i >= r.j || r.j >= dim)
    throw InvalidArgument("rotation pivot (" + std::to_string(r.i) + "," + std::to_string(r.j) +
                          ") out of range for dimension " + std::to_string(dim));
}

// Rows i and j of P^T C.
void update_rows(std::span<double> a, std::size_t n, const RotationParams& r) {
  const double pii = r.cos_a, pij = r.sin_a, pji = -r.sin_a, pjj = r.cos_a;
  double* row_i = a.data() + r.i * n;
  double* row_j = a.data() + r.j * n;
  for (std::size_t k = 0; k < n; ++k) {
    const double aik = row_i[k];
    const double ajk = row_j[k];
    row_i[k] = pii * aik + pji * ajk;
    row_j[k] = pij * aik + pjj * ajk;
  }
}

// Columns i and j of C P, and of the accumulator E P.
void update_columns(std::span<double> a, std::span<double> e, std::size_t n,
                    const RotationParams& r) {
  const double pii = r.cos_a, pij = r.sin_a, pji = -r.sin_a, pjj = r.cos_a;
  for (std::size_t k = 0; k < n; ++k) {
    double* row = a.data() + k * n;
    const double aki = row[r.i];
    const double akj = row[r.j];
    row[r.i] = aki * pii + akj * pji;
    row[r.j] = aki * pij + akj * pjj;

    double* erow = e.data() + k * n;
    const double pki = erow[r.i];
    const double pkj = erow[r.j];
    erow[r.i] = pki * pii + pkj * pji;
    erow[r.j] = pki * pij + pkj * pjj;
  }
}

double offdiag_sumsq(const SymMatrix& c) {
  const std::size_t n = c.dim();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += c(i, j) * c(i, j);
  return 2.0 * s;
}

// Largest |a_ik| with k > i for each row, kept current across rotations so
// the classical pivot search costs O(n) instead of O(n^2).
class RowMaxIndex {
 public:
  explicit RowMaxIndex(const SymMatrix& c) : c_(c), best_(c.dim(), 0) {
    for (std::size_t r = 0; r + 1 < c.dim(); ++r) recompute(r);
  }

  // Ties resolve to the smallest row, then the smallest column.
  std::pair<std::size_t, std::size_t> pick() const {
    std::size_t row = 0;
    double best = -1.0;
    for (std::size_t r = 0; r + 1 < c_.dim(); ++r) {
      const double v = std::fabs(c_(r, best_[r]));
      if (v > best) {
        best = v;
        row = r;
      }
    }
    return {row, best_[row]};
  }

  void after_rotation(std::size_t i, std::size_t j) {
    const std::size_t n = c_.dim();
    for (std::size_t r = 0; r + 1 < n; ++r) {
      if (r == i || r == j || best_[r] == i || best_[r] == j) {
        recompute(r);
        continue;
      }
      if (r < i) offer(r, i);
      if (r < j) offer(r, j);
    }
  }

 private:
  void recompute(std::size_t r) {
    std::size_t col = r + 1;
    double best = std::fabs(c_(r, col));
    for (std::size_t k = r + 2; k < c_.dim(); ++k) {
      const double v = std::fabs(c_(r, k));
      if (v > best) {
        best = v;
        col = k;
      }
    }
    best_[r] = col;
  }

  void offer(std::size_t r, std::size_t col) {
    const double v = std::fabs(c_(r, col));
    const double cur = std::fabs(c_(r, best_[r]));
    if (v > cur || (v == cur && col < best_[r])) best_[r] = col;
  }

  const SymMatrix& c_;
  std::vector<std::size_t> best_;
};

struct SolverState {
  SymMatrix c;
  SquareMatrix e;
  double threshold = 0.0;
  std::size_t rotations = 0;
  std::size_t sweeps = 0;
  std::vector<SweepRecord> history;
  bool record = false;

  void rotate(std::size_t i, std::size_t j) {
    apply_rotation(c, e, rotation_params(c(i, i), c(j, j), c(i, j), i, j));
    ++rotations;
  }

  void log_sweep(std::size_t rotations_in_sweep) {
    if (record) history.push_back({sweeps, offdiag_norm(c), rotations_in_sweep});
  }

  [[noreturn]] void fail() const { throw ConvergenceError(sweeps, offdiag_norm(c), max_offdiag(c)); }
};

void run_classical(SolverState& s, const JacobiConfig& cfg) {
  const std::size_t n = s.c.dim();
  const std::size_t per_sweep = n * (n - 1) / 2;
  const std::size_t cap = cfg.max_sweeps * per_sweep;
  RowMaxIndex index(s.c);
  std::size_t in_sweep = 0;
  for (;;) {
    const auto [i, j] = index.pick();
    if (std::fabs(s.c(i, j)) <= s.threshold) break;
    if (s.rotations == cap) {
      s.sweeps = cfg.max_sweeps;
      s.fail();
    }
    s.rotate(i, j);
    index.after_rotation(i, j);
    if (++in_sweep == per_sweep) {
      ++s.sweeps;
      s.log_sweep(in_sweep);
      in_sweep = 0;
    }
  }
  if (in_sweep > 0) {
    ++s.sweeps;
    s.log_sweep(in_sweep);
  }
}

void run_cyclic(SolverState& s, const JacobiConfig& cfg) {
  const std::size_t n = s.c.dim();
  while (max_offdiag(s.c) > s.threshold) {
    if (s.sweeps == cfg.max_sweeps) s.fail();
    ++s.sweeps;
    std::size_t in_sweep = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::fabs(s.c(i, j)) > s.threshold) {
          s.rotate(i, j);
          ++in_sweep;
        }
    s.log_sweep(in_sweep);
  }
}

// Pivot search of the batched scheme: row-wise scan selecting entries above
// threshold (cond1), not yet rotated this sweep (cond2), and sharing no index
// with an earlier pick of the batch (cond3).
void run_parallel(SolverState& s, const JacobiConfig& cfg, Executor& exec) {
  const std::size_t n = s.c.dim();
  if (max_offdiag(s.c) <= s.threshold) return;
  std::vector<char> rotated(n * n, 0);
  std::vector<char> used(n, 0);
  std::vector<RotationParams> batch;
  batch.reserve(n / 2);
  s.sweeps = 1;
  std::size_t in_sweep = 0;
  for (;;) {
    batch.clear();
    std::fill(used.begin(), used.end(), 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (used[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (used[j] || rotated[i * n + j] || std::fabs(s.c(i, j)) <= s.threshold) continue;
        batch.push_back(rotation_params(s.c(i, i), s.c(j, j), s.c(i, j), i, j));
        rotated[i * n + j] = 1;
        used[i] = used[j] = 1;
        break;
      }
    }
    if (batch.empty()) {
      s.log_sweep(in_sweep);
      if (max_offdiag(s.c) <= s.threshold) return;
      if (s.sweeps == cfg.max_sweeps) s.fail();
      std::fill(rotated.begin(), rotated.end(), 0);
      ++s.sweeps;
      in_sweep = 0;
      continue;
    }
    apply_rotation_batch(s.c, s.e, batch, exec);
    s.rotations += batch.size();
    in_sweep += batch.size();
  }
}

}  // namespace

void apply_rotation(SymMatrix& c, SquareMatrix& e, const RotationParams& r) {
  const std::size_t n = c.dim();
  check_pivot(n, r);
  if (e.dim() != n) throw InvalidArgument("eigenvector accumulator dimension mismatch");
  auto a = c.raw_entries();
  update_rows(a, n, r);
  update_columns(a, e.entries(), n, r);
  a[r.i * n + r.j] = 0.0;
  a[r.j * n + r.i] = 0.0;
}

void apply_rotation_batch(SymMatrix& c, SquareMatrix& e, std::span<const RotationParams> batch,
                          Executor& exec) {
  const std::size_t n = c.dim();
  if (e.dim() != n) throw InvalidArgument("eigenvector accumulator dimension mismatch");
  std::vector<char> seen(n, 0);
  for (const auto& r : batch) {
    check_pivot(n, r);
    if (seen[r.i] || seen[r.j])
      throw InvalidArgument("rotation batch pivots must not share an index");
    seen[r.i] = seen[r.j] = 1;
  }
  auto a = c.raw_entries();
  auto acc = e.entries();
  exec.run(batch.size(), [&](std::size_t k) { update_rows(a, n, batch[k]); });
  exec.run(batch.size(), [&](std::size_t k) { update_columns(a, acc, n, batch[k]); });
  for (const auto& r : batch) {
    a[r.i * n + r.j] = 0.0;
    a[r.j * n + r.i] = 0.0;
  }
  c.mirror_upper();
}

double offdiag_norm(const SymMatrix& c) { return std::sqrt(offdiag_sumsq(c)); }

double max_offdiag(const SymMatrix& c) {
  const std::size_t n = c.dim();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, std::fabs(c(i, j)));
  return m;
}

EigenDecomposition jacobi_eigen(const SymMatrix& c, const JacobiConfig& cfg, Executor& exec) {
  cfg.validate();
  const std::size_t n = c.dim();
  if (n < 1) throw InvalidArgument("jacobi_eigen needs a matrix of dimension >= 1");
  for (double v : c.entries())
    if (!std::isfinite(v)) throw InvalidArgument("jacobi_eigen input has non-finite entries");

  SolverState s;
  s.c = c;
  s.e = SquareMatrix::identity(n);
  s.record = cfg.record_history;
  const double initial = max_offdiag(c);
  s.threshold = cfg.epsilon_rel * (initial > 0.0 ? initial : 1.0);

  if (n > 1) {
    switch (cfg.strategy) {
      case PivotStrategy::classical: run_classical(s, cfg); break;
      case PivotStrategy::cyclic: run_cyclic(s, cfg); break;
      case PivotStrategy::parallel: run_parallel(s, cfg, exec); break;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.c(a, a) > s.c(b, b); });

  EigenDecomposition out;
  out.dim = n;
  out.eigenvalues.resize(n);
  out.eigenvectors = SquareMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = s.c(src, src);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = s.e(r, src);
  }
  if (cfg.normalize_signs) {
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t arg = 0;
      for (std::size_t r = 1; r < n; ++r)
        if (std::fabs(out.eigenvectors(r, k)) > std::fabs(out.eigenvectors(arg, k))) arg = r;
      if (out.eigenvectors(arg, k) < 0.0)
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = -out.eigenvectors(r, k);
    }
  }
  out.sweeps_used = s.sweeps;
  out.rotations_used = s.rotations;
  out.history = std::move(s.history);
  return out;
}

std::string eigen_summary_csv(const EigenDecomposition& eig) {
  double total = 0.0;
  for (double v : eig.eigenvalues) total += std::max(0.0, v);
  std::ostringstream out;
  out << "index,eigenvalue,explained_variance\n";
  out.precision(17);
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const double share = total > 0.0 ? std::max(0.0, eig.eigenvalues[k]) / total : 0.0;
    out << k << ',' << eig.eigenvalues[k] << ',' << share << "\n";
  }
  return out.str();
}

void write_eigen_summary_csv(const EigenDecomposition& eig, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << eigen_summary_csv(eig);
  if (!out) throw IoError("failed writing " + path.string());
}

void write_history_csv(const EigenDecomposition& eig, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "sweep,offdiag_norm,rotations\n";
  out.precision(17);
  for (const auto& h : eig.history) out << h.sweep << ',' << h.offdiag_norm << ',' << h.rotations << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace hsipca
