#include "hsipca/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hsipca/bench.hpp"
#include "hsipca/error.hpp"
#include "hsipca/hypercube.hpp"
#include "hsipca/jacobi.hpp"
#include "hsipca/parallel.hpp"
#include "hsipca/pca.hpp"

namespace hsipca::cli {

namespace {

// Raised for bad flag values found after CLI11 has parsed the command line.
struct UsageError : Error {
  using Error::Error;
};

struct Shared {
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::string mode = "deterministic";
  std::uint64_t seed = 1;
};

struct SynthFlags {
  std::size_t width = 100;
  std::size_t height = 100;
  std::size_t bands = 50;
  std::size_t endmembers = 10;
  std::string snr_db = "70";
  std::string signatures;
};

struct SolverFlags {
  std::string strategy = "cyclic";
  double epsilon = 1e-10;
  std::size_t max_sweeps = 50;
  std::size_t blocked = 1;
  std::string precision = "mixed";
};

struct Options {
  Shared shared;

  SynthFlags synth;
  std::string synth_out;

  std::string reduce_input;
  std::string reduce_out;
  std::size_t reduce_pcs = 3;
  bool reduce_project_raw = false;
  std::string reduce_render;
  std::string reduce_history;
  SolverFlags reduce_solver;

  std::string eigen_matrix;
  std::string eigen_input;
  std::size_t eigen_dim = 0;
  double eigen_symmetry_tol = 1e-9;
  std::string eigen_out;
  std::string eigen_vectors;
  SolverFlags eigen_solver;

  std::string bench_input;
  SynthFlags bench_synth;
  std::vector<std::size_t> bench_pcs{1, 3, 5};
  std::string bench_format = "json";
  std::string bench_out;
  std::string bench_platform;
  std::size_t bench_cores = 0;
  double bench_freq = 0.0;
  std::string bench_image;
  bool bench_project_raw = false;
  SolverFlags bench_solver;

  std::vector<std::string> report_inputs;
  std::vector<std::string> report_external;
  std::string report_format = "markdown";
  std::string report_out;
};

double parse_snr(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "inf" || t == "+inf" || t == "infinity") return kNoiseless;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || end != t.data() + t.size() || !std::isfinite(v))
    throw UsageError("--snr-db expects a number or 'inf', got '" + text + "'");
  return v;
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  const auto [end, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || end != last || first == last)
    throw FormatError("invalid number '" + text + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

Executor make_executor(const Shared& s) {
  ExecPlan plan;
  plan.workers = s.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : s.workers;
  plan.mode = parse_exec_mode(s.mode);
  plan.validate();
  return Executor(plan);
}

JacobiConfig jacobi_config(const SolverFlags& f) {
  JacobiConfig cfg;
  cfg.strategy = parse_strategy(f.strategy);
  cfg.epsilon_rel = f.epsilon;
  cfg.max_sweeps = f.max_sweeps;
  cfg.validate();
  if (f.blocked < 1) throw UsageError("--blocked expects at least 1 split");
  parse_precision(f.precision);
  return cfg;
}

SyntheticCube make_synthetic(const SynthFlags& f, std::uint64_t seed, Executor& exec) {
  const double snr = parse_snr(f.snr_db);
  SignatureSet sigs = f.signatures.empty() ? builtin_signatures(f.bands, f.endmembers, seed)
                                           : load_signatures_csv(f.signatures);
  if (sigs.bands != f.bands)
    throw UsageError("signature library has " + std::to_string(sigs.bands) +
                     " bands but --bands is " + std::to_string(f.bands));
  return generate_synthetic(sigs, f.width, f.height, f.endmembers, snr, seed, exec);
}

std::string db_text(double db) {
  if (std::isinf(db)) return "inf";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << db;
  return s.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("failed writing " + path);
}

// ---- synth ----

int cmd_synth(const Options& o, std::ostream& out) {
  Executor exec = make_executor(o.shared);
  const SyntheticCube syn = make_synthetic(o.synth, o.shared.seed, exec);
  save_cube(syn.cube, o.synth_out);
  out << "wrote " << header_path_for(o.synth_out).string() << "\n";
  out << "wrote " << data_path_for(o.synth_out).string() << "\n";
  out << "endmembers:";
  for (std::size_t k : syn.endmember_indices) out << ' ' << k;
  out << "\nmeasured SNR (dB): " << db_text(syn.measured_snr_db) << "\n";
  return kExitOk;
}

// ---- reduce ----

int cmd_reduce(const Options& o, std::ostream& out) {
  const JacobiConfig cfg = jacobi_config(o.reduce_solver);
  const Precision precision = parse_precision(o.reduce_solver.precision);
  Executor exec = make_executor(o.shared);

  const HyperCube cube = load_cube(o.reduce_input);
  if (o.reduce_pcs < 1 || o.reduce_pcs > cube.bands())
    throw UsageError("--pcs must be in [1, " + std::to_string(cube.bands()) + "]");

  using Clock = std::chrono::steady_clock;
  const auto ms = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  const auto t0 = Clock::now();
  const CenteredCube centered = mean_center(cube, exec, precision);
  const auto t1 = Clock::now();
  const SymMatrix cov = o.reduce_solver.blocked == 1
                            ? covariance(centered, exec, precision)
                            : covariance_blocked(centered, o.reduce_solver.blocked, exec, precision);
  const auto t2 = Clock::now();
  JacobiConfig solver = cfg;
  solver.record_history = !o.reduce_history.empty();
  const EigenDecomposition eig = jacobi_eigen(cov, solver, exec);
  const auto t3 = Clock::now();
  const Projection proj = o.reduce_project_raw ? project(cube, eig, o.reduce_pcs, exec)
                                               : project(centered, eig, o.reduce_pcs, exec);
  const auto t4 = Clock::now();

  const std::string stem = o.reduce_out;
  write_projection(proj, cube.width(), cube.height(), stem);
  write_eigen_summary_csv(eig, stem + ".eigen.csv");
  write_band_means_csv(centered.band_means, stem + ".means.csv");

  BenchRun run;
  run.timings = {ms(t0, t1), ms(t1, t2), ms(t2, t3), ms(t3, t4), ms(t0, t4), o.reduce_pcs};
  run.sweeps_used = eig.sweeps_used;
  run.rotations_used = eig.rotations_used;
  run.explained_variance = explained_variance(eig, o.reduce_pcs);
  run.eigenvalues.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + o.reduce_pcs);
  run.projection_digest = projection_digest(proj.scores);
  const ImageDesc image{std::filesystem::path(o.reduce_input).filename().string(), cube.width(),
                        cube.height(), cube.bands()};
  const BenchReport report = make_report(PlatformDesc::detect(), image, {run});
  write_text(stem + ".report.json", report_to_json(report), out);

  out << "wrote " << stem << ".raw, " << stem << ".json, " << stem << ".eigen.csv, " << stem
      << ".means.csv, " << stem << ".report.json\n";
  if (!o.reduce_history.empty()) {
    write_history_csv(eig, o.reduce_history);
    out << "wrote " << o.reduce_history << "\n";
  }
  if (!o.reduce_render.empty()) {
    render_band_pgm(proj.component(0), cube.width(), cube.height(), o.reduce_render);
    out << "wrote " << o.reduce_render << "\n";
  }
  out << "sweeps: " << eig.sweeps_used << ", rotations: " << eig.rotations_used << "\n";
  out << "explained variance (" << o.reduce_pcs << " PCs): " << std::setprecision(9)
      << run.explained_variance << "\n";
  return kExitOk;
}

// ---- eigen ----

std::vector<std::vector<double>> parse_rows(const std::vector<std::string>& lines,
                                            const std::string& what) {
  std::vector<std::vector<double>> rows;
  for (const auto& line : lines) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::string trimmed = line;
    if (!trimmed.empty() && trimmed.back() == '\r') trimmed.pop_back();
    for (const auto& cell : split(trimmed, ',')) row.push_back(parse_double(cell, what));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(what + " holds no matrix rows");
  for (const auto& r : rows)
    if (r.size() != rows.size())
      throw FormatError(what + " is not square: " + std::to_string(rows.size()) + " rows but a row of " +
                        std::to_string(r.size()) + " entries");
  return rows;
}

SymMatrix load_matrix(const Options& o) {
  std::vector<std::vector<double>> rows;
  if (!o.eigen_matrix.empty()) {
    rows = parse_rows(split(o.eigen_matrix, ';'), "--matrix");
  } else {
    const std::filesystem::path path(o.eigen_input);
    if (path.extension() == ".csv" || path.extension() == ".txt") {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open " + path.string());
      std::vector<std::string> lines;
      for (std::string line; std::getline(in, line);) lines.push_back(line);
      rows = parse_rows(lines, path.string());
    } else {
      if (o.eigen_dim == 0) throw UsageError("raw matrix input needs --dim");
      const std::vector<float> v = read_f32_le(path);
      if (v.size() != o.eigen_dim * o.eigen_dim)
        throw FormatError(path.string() + ": expected " + std::to_string(o.eigen_dim * o.eigen_dim) +
                          " float32 values, found " + std::to_string(v.size()));
      rows.assign(o.eigen_dim, std::vector<double>(o.eigen_dim));
      for (std::size_t i = 0; i < o.eigen_dim; ++i)
        for (std::size_t j = 0; j < o.eigen_dim; ++j) rows[i][j] = v[i * o.eigen_dim + j];
    }
  }
  double scale = 0.0;
  for (const auto& r : rows)
    for (double x : r) {
      if (!std::isfinite(x)) throw FormatError("matrix holds a non-finite entry");
      scale = std::max(scale, std::fabs(x));
    }
  return SymMatrix::from_rows(rows, o.eigen_symmetry_tol * scale);
}

int cmd_eigen(const Options& o, std::ostream& out) {
  if (o.eigen_matrix.empty() == o.eigen_input.empty())
    throw UsageError("eigen needs exactly one of --matrix or --input");
  if (o.eigen_symmetry_tol < 0.0) throw UsageError("--symmetry-tol must be nonnegative");
  const JacobiConfig cfg = jacobi_config(o.eigen_solver);
  Executor exec = make_executor(o.shared);

  const SymMatrix c = load_matrix(o);
  const EigenDecomposition eig = jacobi_eigen(c, cfg, exec);
  write_text(o.eigen_out, eigen_summary_csv(eig), out);
  if (!o.eigen_vectors.empty()) {
    std::ostringstream v;
    v.precision(17);
    for (std::size_t r = 0; r < eig.dim; ++r) {
      for (std::size_t k = 0; k < eig.dim; ++k) v << (k ? "," : "") << eig.eigenvectors(r, k);
      v << "\n";
    }
    write_text(o.eigen_vectors, v.str(), out);
  }
  return kExitOk;
}

// ---- bench ----

int cmd_bench(const Options& o, std::ostream& out) {
  BenchOptions opt;
  opt.pcs_list = o.bench_pcs;
  opt.jacobi = jacobi_config(o.bench_solver);
  opt.covariance_splits = o.bench_solver.blocked;
  opt.precision = parse_precision(o.bench_solver.precision);
  opt.project_raw = o.bench_project_raw;
  const ReportFormat format = parse_report_format(o.bench_format);
  PlatformDesc platform = PlatformDesc::detect();
  if (!o.bench_platform.empty()) platform.name = o.bench_platform;
  if (o.bench_cores > 0) platform.cores = o.bench_cores;
  if (o.bench_freq > 0.0) platform.freq_mhz = o.bench_freq;
  platform.validate();
  Executor exec = make_executor(o.shared);

  HyperCube cube;
  ImageDesc image;
  if (!o.bench_input.empty()) {
    cube = load_cube(o.bench_input);
    image.name = std::filesystem::path(o.bench_input).filename().string();
  } else {
    cube = make_synthetic(o.bench_synth, o.shared.seed, exec).cube;
    image.name = "synthetic";
  }
  if (!o.bench_image.empty()) image.name = o.bench_image;
  image.width = cube.width();
  image.height = cube.height();
  image.bands = cube.bands();

  const auto runs = run_benchmark(cube, opt, exec);
  write_text(o.bench_out, render_report({make_report(platform, image, runs)}, format), out);
  if (!o.bench_out.empty() && o.bench_out != "-") out << "wrote " << o.bench_out << "\n";
  return kExitOk;
}

// ---- report ----

BenchReport parse_external(const std::string& spec) {
  const auto f = split(spec, ',');
  if (f.size() != 5 && f.size() != 6)
    throw UsageError("--external expects name,image,ms,cores,mhz[,pcs], got '" + spec + "'");
  const double ms = parse_double(f[2], "--external time");
  const double cores = parse_double(f[3], "--external cores");
  const double mhz = parse_double(f[4], "--external frequency");
  const double pcs = f.size() == 6 ? parse_double(f[5], "--external pcs") : 1.0;
  if (cores < 1.0 || cores != std::floor(cores))
    throw UsageError("--external core count must be a positive integer");
  if (pcs < 1.0 || pcs != std::floor(pcs)) throw UsageError("--external pcs must be a positive integer");
  return external_report(PlatformDesc{f[0], static_cast<std::size_t>(cores), mhz}, f[1], ms,
                         static_cast<std::size_t>(pcs));
}

int cmd_report(const Options& o, std::ostream& out) {
  if (o.report_inputs.empty() && o.report_external.empty())
    throw UsageError("report needs at least one --inputs file or --external entry");
  const ReportFormat format = parse_report_format(o.report_format);
  std::vector<BenchReport> reports;
  for (const auto& e : o.report_external) reports.push_back(parse_external(e));
  std::vector<BenchReport> loaded;
  for (const auto& path : o.report_inputs)
    for (auto& r : load_reports_json(path)) loaded.push_back(std::move(r));
  // measured runs first, published numbers after them
  loaded.insert(loaded.end(), reports.begin(), reports.end());
  write_text(o.report_out, render_report(loaded, format), out);
  if (!o.report_out.empty() && o.report_out != "-") out << "wrote " << o.report_out << "\n";
  return kExitOk;
}

void add_synth_flags(CLI::App* cmd, SynthFlags& f, bool required) {
  auto* w = cmd->add_option("--width", f.width, "Image width in pixels")->check(CLI::PositiveNumber);
  auto* h = cmd->add_option("--height", f.height, "Image height in pixels")->check(CLI::PositiveNumber);
  auto* b = cmd->add_option("--bands", f.bands, "Spectral bands per pixel")->check(CLI::PositiveNumber);
  if (required) {
    w->required();
    h->required();
    b->required();
  } else {
    w->capture_default_str();
    h->capture_default_str();
    b->capture_default_str();
  }
  cmd->add_option("--endmembers", f.endmembers, "Signatures mixed into each pixel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--snr-db", f.snr_db, "Signal-to-noise ratio in dB, or 'inf' for no noise")
      ->capture_default_str();
  cmd->add_option("--signatures", f.signatures,
                  "Signature library CSV (default: built-in procedural spectra)")
      ->check(CLI::ExistingFile);
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool with_cube) {
  cmd->add_option("--strategy", f.strategy, "Jacobi pivot strategy")
      ->check(CLI::IsMember({"classical", "cyclic", "parallel"}))
      ->capture_default_str();
  cmd->add_option("--epsilon", f.epsilon, "Stop factor relative to the largest initial off-diagonal")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-sweeps", f.max_sweeps, "Sweep limit before reporting non-convergence")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (with_cube) {
    cmd->add_option("--blocked", f.blocked, "Covariance as a sum over N pixel blocks (1 = direct)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--precision", f.precision, "Accumulator precision")
        ->check(CLI::IsMember({"mixed", "single"}))
        ->capture_default_str();
  }
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}


struct Commands {
  std::unique_ptr<CLI::App> app;
  CLI::App* synth = nullptr;
  CLI::App* reduce = nullptr;
  CLI::App* eigen = nullptr;
  CLI::App* bench = nullptr;
  CLI::App* report = nullptr;
};

Commands make_app(Options& o) {
  auto app_ptr = std::make_unique<CLI::App>("Hyperspectral PCA toolkit: synthetic cubes, Jacobi eigendecomposition, "
               "dimensionality reduction and benchmarking",
               "hsipca");
  CLI::App& app = *app_ptr;
  app.set_help_flag();
  app.set_help_all_flag("-h,--help", "Print this help (all subcommands and flags) and exit");
  app.set_version_flag("--version", "hsipca 0.1.0");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read flags from a key=value file (CLI > config > env > defaults)");

  app.add_option("--workers", o.shared.workers, "Worker threads (0 = hardware concurrency)")
      ->envname("HSIPCA_WORKERS")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--mode", o.shared.mode, "Execution mode")
      ->envname("HSIPCA_MODE")
      ->check(CLI::IsMember({"deterministic", "fast"}))
      ->capture_default_str();
  app.add_option("--seed", o.shared.seed, "Seed for every random draw")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cube from mixed signatures");
  add_synth_flags(synth, o.synth, true);
  synth->add_option("--out", o.synth_out, "Output stem (writes <stem>.hdr.json and <stem>.raw)")
      ->required();

  auto* reduce = app.add_subcommand("reduce", "Run the four-stage PCA reduction on a cube");
  reduce->add_option("--input", o.reduce_input, "Input cube stem")->required();
  reduce->add_option("--out", o.reduce_out,
                     "Output stem (scores .raw/.json, .eigen.csv, .means.csv, .report.json)")
      ->required();
  reduce->add_option("--pcs", o.reduce_pcs, "Principal components to keep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  reduce->add_flag("--project-raw", o.reduce_project_raw,
                   "Project the uncentered cube instead of the centered one");
  reduce->add_option("--render-pc1", o.reduce_render, "Write the first component as a PGM image");
  reduce->add_option("--history", o.reduce_history, "Write per-sweep convergence CSV");
  add_solver_flags(reduce, o.reduce_solver, true);

  auto* eigen = app.add_subcommand("eigen", "Eigendecompose a standalone symmetric matrix");
  eigen->add_option("--matrix", o.eigen_matrix, "Inline matrix, rows split by ';' (\"1,1;1,3\")");
  eigen->add_option("--input", o.eigen_input, "Matrix file: .csv/.txt rows, or raw float32 LE")
      ->check(CLI::ExistingFile);
  eigen->add_option("--dim", o.eigen_dim, "Matrix dimension for raw float32 input");
  eigen->add_option("--symmetry-tol", o.eigen_symmetry_tol,
                    "Allowed |a_ij - a_ji| relative to the largest entry")
      ->capture_default_str();
  eigen->add_option("--out", o.eigen_out, "Eigenvalue CSV path (default: stdout)");
  eigen->add_option("--vectors", o.eigen_vectors, "Eigenvector CSV path, one column per eigenpair");
  add_solver_flags(eigen, o.eigen_solver, false);

  auto* bench = app.add_subcommand("bench", "Time the pipeline stages and emit a report");
  bench->add_option("--input", o.bench_input, "Input cube stem (default: synthetic cube)");
  add_synth_flags(bench, o.bench_synth, false);
  bench->add_option("--pcs", o.bench_pcs, "Comma-separated PC counts, one run each")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--format", o.bench_format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "markdown", "md"}))
      ->capture_default_str();
  bench->add_option("--out", o.bench_out, "Report path (default: stdout)");
  bench->add_option("--platform-name", o.bench_platform, "Platform label (default: host name)");
  bench->add_option("--cores", o.bench_cores, "Core count for normalization (default: detected)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--freq-mhz", o.bench_freq, "Clock in MHz for normalization (default: detected)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--image-name", o.bench_image, "Image label in the report");
  bench->add_flag("--project-raw", o.bench_project_raw,
                  "Project the uncentered cube instead of the centered one");
  add_solver_flags(bench, o.bench_solver, true);

  auto* report = app.add_subcommand("report", "Merge bench reports into one comparison table");
  report->add_option("--inputs", o.report_inputs, "Report JSON files")->check(CLI::ExistingFile);
  report->add_option("--external", o.report_external,
                     "Published timing as name,image,ms,cores,mhz[,pcs] (repeatable)");
  report->add_option("--format", o.report_format, "Table format")
      ->check(CLI::IsMember({"json", "csv", "markdown", "md"}))
      ->capture_default_str();
  report->add_option("--out", o.report_out, "Table path (default: stdout)");

  return {std::move(app_ptr), synth, reduce, eigen, bench, report};
}

// CLI11 drops environment values that fail conversion; reject them instead.
void check_environment(const CLI::App& app) {
  for (const char* name : {"--workers", "--mode"}) {
    const CLI::Option* opt = app.get_option(name);
    if (opt->count() > 0) continue;
    const char* value = std::getenv(opt->get_envname().c_str());
    if (value != nullptr && *value != '\0')
      throw UsageError("invalid " + opt->get_envname() + "='" + value + "'");
  }
}

}  // namespace

ExecSettings resolve_settings(int argc, const char* const* argv) {
  Options o;
  Commands c = make_app(o);
  c.app->parse(argc, argv);
  check_environment(*c.app);
  return {o.shared.workers, o.shared.mode, o.shared.seed};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  Commands c = make_app(o);
  CLI::App& app = *c.app;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "hsipca: error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    check_environment(app);
    if (c.synth->parsed()) return cmd_synth(o, out);
    if (c.reduce->parsed()) return cmd_reduce(o, out);
    if (c.eigen->parsed()) return cmd_eigen(o, out);
    if (c.bench->parsed()) return cmd_bench(o, out);
    return cmd_report(o, out);
  } catch (const UsageError& e) {
    err << "hsipca: error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "hsipca: error: " << one_line(e.what()) << "\n";
    return kExitFailure;
  }
}

}  // namespace hsipca::cli
