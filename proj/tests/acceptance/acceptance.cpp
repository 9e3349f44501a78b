// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Thresholds are fixed here, not tuned per run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hsipca/bench.hpp"
#include "hsipca/hypercube.hpp"
#include "hsipca/jacobi.hpp"
#include "hsipca/pca.hpp"
#include "support/oracles.hpp"

namespace {

using namespace hsipca;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double orthonormality_error(const SquareMatrix& e) {
  const Eigen::MatrixXd m = testing::to_eigen(e);
  return (m.transpose() * m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

double reconstruction_error(const SymMatrix& c, const EigenDecomposition& eig) {
  const Eigen::MatrixXd e = testing::to_eigen(eig.eigenvectors);
  Eigen::VectorXd lambda(eig.dim);
  for (std::size_t k = 0; k < eig.dim; ++k) lambda(k) = eig.eigenvalues[k];
  const Eigen::MatrixXd ref = testing::to_eigen(c);
  return (e * lambda.asDiagonal() * e.transpose() - ref).norm() / ref.norm();
}

const PivotStrategy kStrategies[] = {PivotStrategy::classical, PivotStrategy::cyclic,
                                     PivotStrategy::parallel};

// 1. 2x2 analytic case
Outcome analytic_two_by_two() {
  const SymMatrix c = SymMatrix::from_rows({{1.0, 1.0}, {1.0, 3.0}});
  const double hi = 2.0 + std::sqrt(2.0), lo = 2.0 - std::sqrt(2.0);
  Outcome o;
  double worst_value = 0.0, worst_orth = 0.0;
  for (PivotStrategy s : kStrategies) {
    JacobiConfig cfg;
    cfg.strategy = s;
    const auto eig = jacobi_eigen(c, cfg);
    worst_value = std::max({worst_value, std::fabs(eig.eigenvalues[0] - hi),
                            std::fabs(eig.eigenvalues[1] - lo)});
    worst_orth = std::max(worst_orth, orthonormality_error(eig.eigenvectors));
  }
  JacobiConfig classical;
  classical.strategy = PivotStrategy::classical;
  jacobi_eigen(c, classical);  // warm-up
  const auto t0 = Clock::now();
  const auto eig = jacobi_eigen(c, classical);
  const double elapsed = ms_since(t0);
  o.pass = worst_value <= 1e-10 && worst_orth <= 1e-12 && eig.rotations_used == 1 && elapsed < 1.0;
  o.detail = "max |lambda - (2+-sqrt2)| = " + fmt("%.2e", worst_value) + ", |E^T E - I|max = " +
             fmt("%.2e", worst_orth) + ", classical rotations = " +
             std::to_string(eig.rotations_used) + ", time = " + fmt("%.4f", elapsed) + " ms";
  return o;
}

// 2. all strategies against an independent eigensolver
Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> dim(2, 64);
  double worst_orth = 0.0, worst_recon = 0.0, worst_value = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = dim(rng);
    const SymMatrix c = testing::random_symmetric(n, 1000 + trial);
    const auto oracle = testing::oracle_eigenvalues(c);
    double scale = 0.0;
    for (double v : oracle) scale = std::max(scale, std::fabs(v));
    for (PivotStrategy s : kStrategies) {
      JacobiConfig cfg;
      cfg.strategy = s;
      const auto eig = jacobi_eigen(c, cfg);
      worst_orth = std::max(worst_orth, orthonormality_error(eig.eigenvectors));
      worst_recon = std::max(worst_recon, reconstruction_error(c, eig));
      for (std::size_t k = 0; k < n; ++k)
        worst_value = std::max(worst_value, std::fabs(eig.eigenvalues[k] - oracle[k]) / scale);
    }
  }
  const double elapsed = ms_since(t0) / 1000.0;
  Outcome o;
  o.pass = worst_orth <= 1e-5 && worst_recon <= 1e-6 && worst_value <= 1e-6 && elapsed < 30.0;
  o.detail = "300 decompositions: |E^T E - I|max = " + fmt("%.2e", worst_orth) +
             ", |E L E^T - C|F/|C|F = " + fmt("%.2e", worst_recon) +
             ", max |lambda - oracle|/max|lambda| = " + fmt("%.2e", worst_value) + ", time = " +
             fmt("%.2f", elapsed) + " s";
  return o;
}

// Off-diagonal squares in rows and columns i and j, the only entries a
// rotation in the (i, j) plane changes. Everything else cancels exactly in
// the before/after difference.
long double touched_offdiag_squares(const SymMatrix& c, std::size_t i, std::size_t j) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < c.dim(); ++k) {
    if (k != i) s += 2.0L * static_cast<long double>(c(i, k)) * c(i, k);
    if (k != j && k != i) s += 2.0L * static_cast<long double>(c(j, k)) * c(j, k);
  }
  return s;
}

long double frobenius_squares(const SymMatrix& c) {
  long double s = 0.0L;
  for (double v : c.entries()) s += static_cast<long double>(v) * v;
  return s;
}

// 3. single-rotation identities
Outcome rotation_identity() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> dim(2, 24);
  double worst_drop = 0.0, worst_trace = 0.0, worst_frob = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = dim(rng);
    SymMatrix c = testing::random_symmetric(n, 5000 + trial);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t i = pick(rng), j = pick(rng);
    while (j == i) j = pick(rng);
    if (i > j) std::swap(i, j);
    const double cij = c(i, j);
    const long double before = touched_offdiag_squares(c, i, j);
    const long double frob_before = frobenius_squares(c);
    const double trace_before = c.trace();
    SquareMatrix e = SquareMatrix::identity(n);
    apply_rotation(c, e, rotation_params(c(i, i), c(j, j), cij, i, j));
    const long double expected = 2.0L * cij * cij;
    worst_drop = std::max(worst_drop,
                          double(std::fabs((before - touched_offdiag_squares(c, i, j)) - expected) / expected));
    worst_trace = std::max(worst_trace, std::fabs(c.trace() - trace_before) /
                                            std::max(std::fabs(trace_before), 1e-300));
    worst_frob = std::max(worst_frob,
                          double(std::fabs(std::sqrt(frobenius_squares(c)) - std::sqrt(frob_before)) /
                                 std::sqrt(frob_before)));
  }
  Outcome o;
  o.pass = worst_drop <= 1e-9 && worst_trace <= 1e-9 && worst_frob <= 1e-9;
  o.detail = "1000 rotations: off-diagonal drop rel err = " + fmt("%.2e", worst_drop) +
             ", trace rel err = " + fmt("%.2e", worst_trace) + ", Frobenius rel err = " +
             fmt("%.2e", worst_frob);
  return o;
}

// 4. blocked covariance
Outcome blocked_covariance() {
  struct Shape {
    std::size_t w, h, m;
  };
  double worst = 0.0, worst_oracle = 0.0;
  for (const Shape s : {Shape{16, 16, 4}, Shape{64, 64, 16}, Shape{128, 128, 32},
                        Shape{256, 256, 64}}) {
    const auto x = mean_center(testing::random_cube(s.w, s.h, s.m, s.w * 1000 + s.m));
    const SymMatrix direct = covariance(x);
    worst_oracle = std::max(worst_oracle,
                            testing::relative_frobenius(direct, testing::naive_covariance(x.cube)));
    for (std::size_t splits : {1u, 2u, 4u, 8u, 16u})
      worst = std::max(worst, testing::relative_frobenius(covariance_blocked(x, splits), direct));
  }
  const CenteredCube hand{HyperCube(2, 1, 2, {1.0f, -1.0f, 2.0f, -2.0f}), {}};
  const SymMatrix expected = SymMatrix::from_rows({{2.0, 4.0}, {4.0, 8.0}});
  bool hand_ok = covariance(hand) == expected;
  for (std::size_t splits : {1u, 2u}) hand_ok = hand_ok && covariance_blocked(hand, splits) == expected;
  Outcome o;
  o.pass = worst <= 1e-6 && worst_oracle <= 1e-6 && hand_ok;
  o.detail = "splits {1,2,4,8,16} up to 256x256x64: rel Frobenius vs direct = " +
             fmt("%.2e", worst) + " (direct vs loop oracle " + fmt("%.2e", worst_oracle) +
             "), hand example " + (hand_ok ? "exact" : "MISMATCH");
  return o;
}

// 5. projected variance equals the eigenvalue
Outcome variance_identity() {
  const auto sigs = builtin_signatures(16, 10, 3);
  const auto syn = generate_synthetic(sigs, 64, 64, 10, 40.0, 3);
  const auto x = mean_center(syn.cube);
  const auto eig = jacobi_eigen(covariance(x));
  const auto proj = project(x, eig, 5);
  double worst = 0.0;
  for (std::size_t k = 0; k < 5; ++k)
    worst = std::max(worst, std::fabs(testing::sample_variance(proj.component(k)) -
                                      eig.eigenvalues[k]) / eig.eigenvalues[k]);
  Outcome o;
  o.pass = worst <= 1e-4;
  o.detail = "64x64x16, k <= 5: max |var - lambda|/lambda = " + fmt("%.2e", worst);
  return o;
}

// 6. rank of a 10-endmember mixture
Outcome rank_recovery() {
  const auto t0 = Clock::now();
  const auto sigs = builtin_signatures(50, 10, 1);
  const auto syn = generate_synthetic(sigs, 300, 300, 10, 70.0, 1);
  const auto eig = jacobi_eigen(covariance(mean_center(syn.cube)));
  const double ev = explained_variance(eig, 10);
  const double ratio = eig.eigenvalues[10] / eig.eigenvalues[0];
  const double elapsed = ms_since(t0) / 1000.0;
  Outcome o;
  o.pass = ev >= 0.999 && ratio <= 1e-3 && elapsed < 60.0;
  o.detail = "300x300x50 at 70 dB: EV(10) = " + fmt("%.7f", ev) + ", lambda11/lambda1 = " +
             fmt("%.2e", ratio) + ", measured SNR = " + fmt("%.2f", syn.measured_snr_db) +
             " dB, time = " + fmt("%.2f", elapsed) + " s";
  return o;
}

// 7. throughput figures for known external timings
Outcome metrics() {
  struct Check {
    const char* name;
    double value, printed, half_unit;
  };
  const PlatformDesc gpu{"GPU", 1536, 1058.0};
  const PlatformDesc fpga{"FPGA", 1, 76.0};
  const Check checks[] = {
      {"CPS(166.48 ms)", cps(166.48), 6.01, 0.005},
      {"CPS/(core*MHz)(166.48 ms, 1536, 1058)", cps_normalized(166.48, gpu, true), 3.698e-6,
       0.0005e-6},
      {"CPS(1490.0 ms)", cps(1490.0), 0.67, 0.005},
      {"CPS/MHz(1490.0 ms, 76)", cps_normalized(1490.0, fpga, false), 8.831e-3, 0.0005e-3},
  };
  Outcome o;
  for (const auto& c : checks) {
    const bool ok = std::fabs(c.value - c.printed) <= c.half_unit;
    o.pass = o.pass && ok;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += std::string(c.name) + " = " + fmt("%.6g", c.value) + " vs " +
                fmt("%.6g", c.printed) + (ok ? " ok" : " OFF");
  }
  return o;
}

// 8. FLOP model magnitude
Outcome flop_claim() {
  const auto f = flop_estimate(262144, 224, 1);
  Outcome o;
  o.pass = f.total > 1000000000000000ull;
  o.detail = "flop_estimate(262144, 224, 1).total = " + fmt("%.4e", double(f.total)) +
             " (corrected covariance model: " + fmt("%.4e", double(f.total_corrected)) + ")";
  return o;
}

// 9. bit-identical outputs across worker counts
Outcome determinism() {
  const auto sigs = builtin_signatures(24, 8, 9);
  struct Outputs {
    HyperCube cube;
    CenteredCube centered;
    SymMatrix cov, blocked;
    std::vector<EigenDecomposition> eig;
    std::vector<Projection> proj;
  };
  auto run = [&](std::size_t workers) {
    Executor exec(ExecPlan{workers, ExecMode::deterministic, 0});
    Outputs out;
    out.cube = generate_synthetic(sigs, 96, 80, 8, 30.0, 9, exec).cube;
    out.centered = mean_center(out.cube, exec);
    out.cov = covariance(out.centered, exec);
    out.blocked = covariance_blocked(out.centered, 8, exec);
    for (PivotStrategy s : kStrategies) {
      JacobiConfig cfg;
      cfg.strategy = s;
      out.eig.push_back(jacobi_eigen(out.cov, cfg, exec));
      out.proj.push_back(project(out.centered, out.eig.back(), 5, exec));
    }
    return out;
  };
  const Outputs ref = run(1);
  std::string mismatches;
  for (std::size_t workers : {2u, 4u, 8u}) {
    const Outputs o = run(workers);
    bool same = o.cube == ref.cube && o.centered.cube == ref.centered.cube &&
                o.centered.band_means == ref.centered.band_means && o.cov == ref.cov &&
                o.blocked == ref.blocked;
    for (std::size_t k = 0; k < o.eig.size(); ++k)
      same = same && o.eig[k].eigenvalues == ref.eig[k].eigenvalues &&
             o.eig[k].eigenvectors == ref.eig[k].eigenvectors && o.proj[k] == ref.proj[k];
    if (!same) mismatches += " " + std::to_string(workers);
  }
  Outcome o;
  o.pass = mismatches.empty();
  o.detail = mismatches.empty()
                 ? "workers {1,2,4,8}: synthetic cube, centering, covariance (direct and blocked), "
                   "three strategies and projections bit-identical"
                 : "outputs differ for workers:" + mismatches;
  return o;
}

// 10. stage 2+3 growth: bands versus pixels
Outcome scaling_shape() {
  auto stage23 = [](std::size_t side, std::size_t bands) {
    const auto sigs = builtin_signatures(bands, 10, 1);
    const auto x = mean_center(generate_synthetic(sigs, side, side, 10, 70.0, 1).cube);
    double best = INFINITY;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      const auto eig = jacobi_eigen(covariance(x));
      best = std::min(best, ms_since(t0));
      if (eig.dim != bands) return double(NAN);
    }
    return best;
  };
  const double b20 = stage23(300, 20), b200 = stage23(300, 200);
  const double p100 = stage23(100, 50), p500 = stage23(500, 50);
  const double band_ratio = b200 / b20, pixel_ratio = p500 / p100;
  Outcome o;
  o.pass = band_ratio > pixel_ratio;
  o.detail = "bands 20->200 at 300x300: x" + fmt("%.1f", band_ratio) + " (" + fmt("%.1f", b20) +
             " -> " + fmt("%.1f", b200) + " ms); pixels 100^2->500^2 at 50 bands: x" +
             fmt("%.1f", pixel_ratio) + " (" + fmt("%.1f", p100) + " -> " + fmt("%.1f", p500) +
             " ms)";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 11. file round trips and the golden first-component image
Outcome io_round_trips() {
  const fs::path dir = fs::temp_directory_path() / "hsipca_acceptance";
  fs::create_directories(dir);
  std::string notes;
  bool ok = true;

  const HyperCube source = testing::random_cube(17, 13, 7, 5, -3.0f, 3.0f);
  std::vector<float> data(source.data().begin(), source.data().end());
  data[0] = -0.0f;
  data[1] = std::numeric_limits<float>::denorm_min();
  data[2] = std::numeric_limits<float>::max();
  data[3] = std::numeric_limits<float>::lowest();
  const HyperCube cube(17, 13, 7, data);
  save_cube(cube, dir / "cube");
  const HyperCube back = load_cube(dir / "cube");
  const bool cube_ok = back.header() == cube.header() && back.data().size() == data.size() &&
                       std::memcmp(back.data().data(), data.data(), data.size() * sizeof(float)) == 0;
  ok = ok && cube_ok;
  notes += std::string("cube ") + (cube_ok ? "bit-exact" : "DIFFERS");

  const auto x = mean_center(testing::random_cube(20, 20, 8, 6));
  const auto eig = jacobi_eigen(covariance(x));
  BenchRun run;
  run.timings = {0.1234567890123, 1.0 / 3.0, 2.5e-7, 17.0, 19.0, 2};
  run.sweeps_used = eig.sweeps_used;
  run.explained_variance = explained_variance(eig, 2);
  run.eigenvalues.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + 2);
  run.projection_digest = projection_digest(project(x, eig, 2).scores);
  const BenchReport report =
      make_report(PlatformDesc{"node \"a\"", 3, 2345.678}, ImageDesc{"img", 20, 20, 8}, {run});
  emit_report({report}, ReportFormat::json, dir / "report.json");
  const auto loaded = load_reports_json(dir / "report.json");
  const bool report_ok = loaded.size() == 1 && loaded[0] == report &&
                         parse_report_json(report_to_json(report)) == report;
  ok = ok && report_ok;
  notes += std::string(", report JSON ") + (report_ok ? "lossless" : "LOSSY");

  auto render = [&](const fs::path& out, std::size_t workers) {
    Executor exec(ExecPlan{workers, ExecMode::deterministic, 0});
    const auto sigs = builtin_signatures(30, 6, 7);
    const auto syn = generate_synthetic(sigs, 48, 40, 6, 50.0, 7, exec);
    const auto centered = mean_center(syn.cube, exec);
    const auto e = jacobi_eigen(covariance(centered, exec), {}, exec);
    render_band_pgm(project(centered, e, 1, exec).component(0), 48, 40, out);
  };
  render(dir / "pc1_a.pgm", 1);
  render(dir / "pc1_b.pgm", 4);
  const std::string a = slurp(dir / "pc1_a.pgm");
  const std::string golden = slurp(fs::path(HSIPCA_GOLDEN_DIR) / "pc1_seed7.pgm");
  const bool runs_ok = a == slurp(dir / "pc1_b.pgm") && !a.empty();
  const bool golden_ok = !golden.empty() && a == golden;
  ok = ok && runs_ok && golden_ok;
  notes += std::string(", PC1 PGM ") + (runs_ok ? "identical across runs" : "DIFFERS across runs") +
           (golden_ok ? " and matches golden" : " and DIFFERS from golden");
  fs::remove_all(dir);
  return {ok, notes};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {1, "2x2 analytic", analytic_two_by_two},
      {2, "oracle equivalence", oracle_equivalence},
      {3, "rotation identity", rotation_identity},
      {4, "blocked covariance", blocked_covariance},
      {5, "variance identity", variance_identity},
      {6, "rank recovery", rank_recovery},
      {7, "metric reproduction", metrics},
      {8, "FLOP claim", flop_claim},
      {9, "determinism", determinism},
      {10, "scaling shape", scaling_shape},
      {11, "I/O round trips", io_round_trips},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %2d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
