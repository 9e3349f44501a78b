#include "hsipca/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hsipca/error.hpp"

namespace hsipca {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("FLOP estimate overflows 64 bits");
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("FLOP estimate overflows 64 bits");
  return r;
}

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

std::string projection_digest(std::span<const float> values) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
  for (std::size_t k = 0; k < values.size_bytes(); ++k) {
    h ^= bytes[k];
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

constexpr const char* kTimingNote =
    "stage timings exclude file I/O; stage 1 starts from an in-memory cube";

nlohmann::ordered_json to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["platform"] = {{"name", r.platform.name},
                   {"cores", r.platform.cores},
                   {"freq_mhz", r.platform.freq_mhz}};
  j["image"] = {{"name", r.image.name},
                {"width", r.image.width},
                {"height", r.image.height},
                {"bands", r.image.bands}};
  j["source"] = r.source;
  j["timing_note"] = r.timing_note;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : r.runs) {
    nlohmann::ordered_json jr;
    jr["pcs"] = run.pcs;
    jr["stage1_ms"] = run.stage1_ms;
    jr["stage2_ms"] = run.stage2_ms;
    jr["stage3_ms"] = run.stage3_ms;
    jr["stage4_ms"] = run.stage4_ms;
    jr["total_ms"] = run.total_ms;
    jr["cps"] = run.cps;
    jr["cps_per_core_mhz"] = run.cps_per_core_mhz;
    jr["cps_per_mhz"] = run.cps_per_mhz;
    jr["sweeps_used"] = run.sweeps_used;
    jr["explained_variance"] = run.explained_variance;
    jr["eigenvalues"] = run.eigenvalues;
    jr["projection_digest"] = run.projection_digest;
    j["runs"].push_back(std::move(jr));
  }
  return j;
}

BenchReport from_json(const nlohmann::json& j) {
  BenchReport r;
  const auto& p = j.at("platform");
  r.platform.name = p.at("name").get<std::string>();
  r.platform.cores = p.at("cores").get<std::size_t>();
  r.platform.freq_mhz = p.at("freq_mhz").get<double>();
  const auto& im = j.at("image");
  r.image.name = im.value("name", std::string{});
  r.image.width = im.at("width").get<std::size_t>();
  r.image.height = im.at("height").get<std::size_t>();
  r.image.bands = im.at("bands").get<std::size_t>();
  r.source = j.value("source", std::string("measured"));
  r.timing_note = j.value("timing_note", std::string{});
  for (const auto& jr : j.at("runs")) {
    ReportRun run;
    run.pcs = jr.at("pcs").get<std::size_t>();
    run.stage1_ms = jr.at("stage1_ms").get<double>();
    run.stage2_ms = jr.at("stage2_ms").get<double>();
    run.stage3_ms = jr.at("stage3_ms").get<double>();
    run.stage4_ms = jr.at("stage4_ms").get<double>();
    run.total_ms = jr.at("total_ms").get<double>();
    run.cps = jr.at("cps").get<double>();
    run.cps_per_core_mhz = jr.at("cps_per_core_mhz").get<double>();
    run.cps_per_mhz = jr.value("cps_per_mhz", 0.0);
    run.sweeps_used = jr.at("sweeps_used").get<std::size_t>();
    run.explained_variance = jr.value("explained_variance", 0.0);
    run.eigenvalues = jr.value("eigenvalues", std::vector<double>{});
    run.projection_digest = jr.value("projection_digest", std::string{});
    r.runs.push_back(std::move(run));
  }
  r.platform.validate();
  return r;
}

std::string image_label(const ImageDesc& im) {
  std::string dims = std::to_string(im.width) + "x" + std::to_string(im.height) + "x" +
                     std::to_string(im.bands);
  if (im.name.empty()) return dims;
  if (im.width == 0) return im.name;
  return im.name + " (" + dims + ")";
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void PlatformDesc::validate() const {
  if (cores < 1) throw InvalidArgument("platform core count must be at least 1");
  if (!(freq_mhz > 0.0) || !std::isfinite(freq_mhz))
    throw InvalidArgument("platform frequency must be positive");
}

PlatformDesc PlatformDesc::detect() {
  PlatformDesc p;
  char host[256] = {};
  p.name = gethostname(host, sizeof(host) - 1) == 0 && host[0] != '\0' ? host : "local";
  p.cores = std::max(1u, std::thread::hardware_concurrency());
  p.freq_mhz = 1000.0;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("cpu MHz", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        try {
          const double f = std::stod(line.substr(colon + 1));
          if (f > 0.0) p.freq_mhz = f;
        } catch (const std::logic_error&) {
        }
      }
      break;
    }
  }
  return p;
}

FlopEstimate flop_estimate(std::uint64_t n, std::uint64_t m, std::uint64_t e) {
  if (n < 1 || m < 1 || e < 1) throw InvalidArgument("flop_estimate needs N, M, e >= 1");
  FlopEstimate f;
  f.mean_removal = checked_add(checked_mul(2, checked_mul(n, m)), m);
  f.covariance = checked_mul(2, checked_mul(checked_mul(n, n), checked_mul(m, m)));
  f.eigen = checked_mul(4, checked_mul(m, checked_mul(m, m)));
  f.projection = checked_mul(e, checked_mul(n, 2 * m - 1));
  f.total = checked_add(checked_add(f.mean_removal, f.covariance), checked_add(f.eigen, f.projection));
  f.covariance_corrected = checked_mul(2, checked_mul(n, checked_mul(m, m)));
  f.total_corrected = checked_add(checked_add(f.mean_removal, f.covariance_corrected),
                                  checked_add(f.eigen, f.projection));
  f.advisory =
      "covariance uses the 2*N^2*M^2 count of the reference pipeline; forming X^T X costs about 2*N*M^2, "
      "reported as covariance_corrected";
  return f;
}

double cps(double total_ms) {
  if (!(total_ms > 0.0) || !std::isfinite(total_ms))
    throw InvalidArgument("total time must be positive to compute CPS");
  return 1000.0 / total_ms;
}

double cps_normalized(double total_ms, const PlatformDesc& platform, bool per_core) {
  platform.validate();
  const double c = cps(total_ms);
  return per_core ? c / (double(platform.cores) * platform.freq_mhz) : c / platform.freq_mhz;
}

std::vector<BenchRun> run_benchmark(const HyperCube& cube, const BenchOptions& options,
                                    Executor& exec) {
  if (options.pcs_list.empty()) throw InvalidArgument("benchmark needs at least one PC count");
  for (std::size_t p : options.pcs_list)
    if (p < 1 || p > cube.bands())
      throw InvalidArgument("PC count " + std::to_string(p) + " outside [1, " +
                            std::to_string(cube.bands()) + "]");
  options.jacobi.validate();

  std::vector<BenchRun> runs;
  for (std::size_t pcs : options.pcs_list) {
    BenchRun run;
    const auto t0 = Clock::now();
    const CenteredCube centered =
        stage("stage 1 (mean removal)", [&] { return mean_center(cube, exec, options.precision); });
    const auto t1 = Clock::now();
    const SymMatrix cov = stage("stage 2 (covariance)", [&] {
      return options.covariance_splits == 1
                 ? covariance(centered, exec, options.precision)
                 : covariance_blocked(centered, options.covariance_splits, exec, options.precision);
    });
    const auto t2 = Clock::now();
    const EigenDecomposition eig =
        stage("stage 3 (eigendecomposition)", [&] { return jacobi_eigen(cov, options.jacobi, exec); });
    const auto t3 = Clock::now();
    const Projection proj = stage("stage 4 (projection)", [&] {
      return options.project_raw ? project(cube, eig, pcs, exec) : project(centered, eig, pcs, exec);
    });
    const auto t4 = Clock::now();

    run.timings = {ms_between(t0, t1), ms_between(t1, t2), ms_between(t2, t3),
                   ms_between(t3, t4), ms_between(t0, t4), pcs};
    run.sweeps_used = eig.sweeps_used;
    run.rotations_used = eig.rotations_used;
    run.explained_variance = explained_variance(eig, pcs);
    run.eigenvalues.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + pcs);
    run.projection_digest = projection_digest(proj.scores);
    runs.push_back(std::move(run));
  }
  return runs;
}

BenchReport make_report(const PlatformDesc& platform, const ImageDesc& image,
                        const std::vector<BenchRun>& runs) {
  platform.validate();
  BenchReport r;
  r.platform = platform;
  r.image = image;
  r.timing_note = kTimingNote;
  for (const auto& run : runs) {
    ReportRun out;
    out.pcs = run.timings.pcs;
    out.stage1_ms = run.timings.stage1_ms;
    out.stage2_ms = run.timings.stage2_ms;
    out.stage3_ms = run.timings.stage3_ms;
    out.stage4_ms = run.timings.stage4_ms;
    out.total_ms = run.timings.total_ms;
    out.cps = cps(run.timings.total_ms);
    out.cps_per_core_mhz = cps_normalized(run.timings.total_ms, platform, true);
    out.cps_per_mhz = cps_normalized(run.timings.total_ms, platform, false);
    out.sweeps_used = run.sweeps_used;
    out.explained_variance = run.explained_variance;
    out.eigenvalues = run.eigenvalues;
    out.projection_digest = run.projection_digest;
    r.runs.push_back(std::move(out));
  }
  return r;
}

BenchReport external_report(const PlatformDesc& platform, const std::string& image_name,
                            double total_ms, std::size_t pcs) {
  platform.validate();
  BenchReport r;
  r.platform = platform;
  r.image.name = image_name;
  r.source = "external";
  r.timing_note = "published total time; not measured here";
  ReportRun run;
  run.pcs = pcs;
  run.total_ms = total_ms;
  run.cps = cps(total_ms);
  run.cps_per_core_mhz = cps_normalized(total_ms, platform, true);
  run.cps_per_mhz = cps_normalized(total_ms, platform, false);
  r.runs.push_back(std::move(run));
  return r;
}

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return "json";
    case ReportFormat::csv: return "csv";
    case ReportFormat::markdown: return "markdown";
  }
  return "unknown";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  if (text == "markdown" || text == "md") return ReportFormat::markdown;
  throw InvalidArgument("unknown report format '" + std::string(text) +
                        "' (expected json, csv or markdown)");
}

std::string format_cps(double value) { return fixed2(value); }

std::string format_normalized(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", value);
  return buf;
}

std::string report_to_json(const BenchReport& report) { return to_json(report).dump(2) + "\n"; }

BenchReport parse_report_json(std::string_view text) {
  try {
    return from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid report JSON: ") + e.what());
  }
}

std::vector<BenchReport> load_reports_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    std::vector<BenchReport> out;
    if (j.is_array()) {
      for (const auto& item : j) out.push_back(from_json(item));
    } else {
      out.push_back(from_json(j));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid report JSON: " + e.what());
  }
}

std::string render_report(const std::vector<BenchReport>& reports, ReportFormat format) {
  if (reports.empty()) throw InvalidArgument("report needs at least one result");
  std::ostringstream out;
  switch (format) {
    case ReportFormat::json: {
      if (reports.size() == 1) return report_to_json(reports.front());
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      return arr.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      out << "platform,cores,freq_mhz,image,width,height,bands,source,pcs,stage1_ms,stage2_ms,"
             "stage3_ms,stage4_ms,total_ms,cps,cps_per_core_mhz,cps_per_mhz,sweeps_used,"
             "explained_variance\n";
      out.precision(10);
      for (const auto& r : reports)
        for (const auto& run : r.runs)
          out << csv_field(r.platform.name) << ',' << r.platform.cores << ',' << r.platform.freq_mhz
              << ',' << csv_field(r.image.name) << ',' << r.image.width << ',' << r.image.height
              << ',' << r.image.bands << ',' << r.source << ',' << run.pcs << ','
              << run.stage1_ms << ',' << run.stage2_ms << ',' << run.stage3_ms << ','
              << run.stage4_ms << ',' << run.total_ms << ',' << format_cps(run.cps) << ','
              << format_normalized(run.cps_per_core_mhz) << ','
              << format_normalized(run.cps_per_mhz) << ',' << run.sweeps_used << ','
              << run.explained_variance << "\n";
      return out.str();
    }
    case ReportFormat::markdown: {
      out << "| Platform | Image | #PCs | Time (ms) | Cores | Frequency (MHz) | CPS | "
             "CPS/(Core × MHz) | CPS/MHz |\n";
      out << "|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
      for (const auto& r : reports)
        for (const auto& run : r.runs)
          out << "| " << r.platform.name << " | " << image_label(r.image) << " | " << run.pcs
              << " | " << fixed2(run.total_ms) << " | " << r.platform.cores << " | "
              << r.platform.freq_mhz << " | " << format_cps(run.cps) << " | "
              << format_normalized(run.cps_per_core_mhz) << " | "
              << format_normalized(run.cps_per_mhz) << " |\n";
      return out.str();
    }
  }
  return out.str();
}

void emit_report(const std::vector<BenchReport>& reports, ReportFormat format,
                 const std::filesystem::path& path) {
  const std::string text = render_report(reports, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path.string());
  out << text;
  if (!out) throw IoError("failed writing report " + path.string());
}

}  // namespace hsipca
