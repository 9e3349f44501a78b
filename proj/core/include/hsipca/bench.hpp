#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsipca/hypercube.hpp"
#include "hsipca/jacobi.hpp"
#include "hsipca/parallel.hpp"
#include "hsipca/pca.hpp"

namespace hsipca {

struct StageTimings {
  double stage1_ms = 0.0;  // mean removal
  double stage2_ms = 0.0;  // covariance
  double stage3_ms = 0.0;  // eigendecomposition
  double stage4_ms = 0.0;  // projection and reduction
  double total_ms = 0.0;
  std::size_t pcs = 0;

  friend bool operator==(const StageTimings&, const StageTimings&) = default;
};

struct PlatformDesc {
  std::string name;
  std::size_t cores = 1;
  double freq_mhz = 1.0;

  void validate() const;
  // Host name, hardware threads, and the first "cpu MHz" in /proc/cpuinfo
  // (1000 when unavailable).
  static PlatformDesc detect();

  friend bool operator==(const PlatformDesc&, const PlatformDesc&) = default;
};

// Operation counts per pipeline stage. `covariance` follows the classic
// 2 N^2 M^2 formula; `covariance_corrected` is the arithmetic cost of X^T X.
struct FlopEstimate {
  std::uint64_t mean_removal = 0;   // 2 N M + M
  std::uint64_t covariance = 0;     // 2 N^2 M^2
  std::uint64_t eigen = 0;          // 4 M^3
  std::uint64_t projection = 0;     // e N (2M - 1)
  std::uint64_t total = 0;
  std::uint64_t covariance_corrected = 0;  // 2 N M^2
  std::uint64_t total_corrected = 0;
  std::string advisory;
};

// Throws OverflowError instead of wrapping.
FlopEstimate flop_estimate(std::uint64_t n_pixels, std::uint64_t n_bands,
                           std::uint64_t e_vectors);

// Cubes per second, 1000 / total_ms.
double cps(double total_ms);
// cps / (cores * MHz) when per_core, else cps / MHz.
double cps_normalized(double total_ms, const PlatformDesc& platform, bool per_core);

struct BenchOptions {
  std::vector<std::size_t> pcs_list{1, 3, 5};
  JacobiConfig jacobi;
  std::size_t covariance_splits = 1;  // 1 = direct covariance
  bool project_raw = false;
  Precision precision = Precision::mixed;
};

struct BenchRun {
  StageTimings timings;
  std::size_t sweeps_used = 0;
  std::size_t rotations_used = 0;
  double explained_variance = 0.0;
  std::vector<double> eigenvalues;  // leading `pcs` values
  std::string projection_digest;    // FNV-1a of the score bytes
};

// FNV-1a over the bytes of the scores, as 16 hex digits.
std::string projection_digest(std::span<const float> scores);

// One full pipeline per entry of pcs_list, each stage timed on a monotonic
// clock around the stage call only.
std::vector<BenchRun> run_benchmark(const HyperCube& cube, const BenchOptions& options,
                                    Executor& exec = serial_executor());

struct ImageDesc {
  std::string name;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t bands = 0;

  friend bool operator==(const ImageDesc&, const ImageDesc&) = default;
};

struct ReportRun {
  std::size_t pcs = 0;
  double stage1_ms = 0.0;
  double stage2_ms = 0.0;
  double stage3_ms = 0.0;
  double stage4_ms = 0.0;
  double total_ms = 0.0;
  double cps = 0.0;
  double cps_per_core_mhz = 0.0;
  double cps_per_mhz = 0.0;
  std::size_t sweeps_used = 0;
  double explained_variance = 0.0;
  std::vector<double> eigenvalues;
  std::string projection_digest;

  friend bool operator==(const ReportRun&, const ReportRun&) = default;
};

struct BenchReport {
  PlatformDesc platform;
  ImageDesc image;
  std::string source = "measured";  // or "external" for published timings
  std::string timing_note;
  std::vector<ReportRun> runs;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

BenchReport make_report(const PlatformDesc& platform, const ImageDesc& image,
                        const std::vector<BenchRun>& runs);

// A row of published timings (total only) tabulated beside local runs.
BenchReport external_report(const PlatformDesc& platform, const std::string& image_name,
                            double total_ms, std::size_t pcs = 1);

enum class ReportFormat { json, csv, markdown };

std::string_view to_string(ReportFormat format);
ReportFormat parse_report_format(std::string_view text);

// "6.01"
std::string format_cps(double value);
// "3.698e-06"
std::string format_normalized(double value);

std::string render_report(const std::vector<BenchReport>& reports, ReportFormat format);
void emit_report(const std::vector<BenchReport>& reports, ReportFormat format,
                 const std::filesystem::path& path);

std::string report_to_json(const BenchReport& report);
BenchReport parse_report_json(std::string_view text);
// A file holds either one report object or an array of them.
std::vector<BenchReport> load_reports_json(const std::filesystem::path& path);

}  // namespace hsipca
