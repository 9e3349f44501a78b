#include "hsipca/hypercube.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsipca/error.hpp"

namespace hsipca {

std::uintmax_t CubeHeader::data_bytes() const noexcept {
  return static_cast<std::uintmax_t>(width) * height * bands * sizeof(float);
}

std::string CubeHeader::serialize() const {
  nlohmann::ordered_json j;
  j["width"] = width;
  j["height"] = height;
  j["bands"] = bands;
  j["dtype"] = dtype;
  j["interleave"] = interleave;
  j["byteorder"] = byteorder;
  return j.dump(2) + "\n";
}

CubeHeader CubeHeader::parse(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("cube header is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("cube header must be a JSON object");

  auto count = [&](const char* key) -> std::size_t {
    if (!j.contains(key) || !j[key].is_number_unsigned())
      throw FormatError(std::string("cube header field '") + key +
                        "' missing or not a nonnegative integer");
    return j[key].get<std::size_t>();
  };
  auto tag = [&](const char* key, std::string_view expected) -> std::string {
    if (!j.contains(key) || !j[key].is_string())
      throw FormatError(std::string("cube header field '") + key + "' missing or not a string");
    auto value = j[key].get<std::string>();
    if (value != expected)
      throw FormatError(std::string("unsupported ") + key + " '" + value + "' (expected '" +
                        std::string(expected) + "')");
    return value;
  };

  CubeHeader h;
  h.width = count("width");
  h.height = count("height");
  h.bands = count("bands");
  h.dtype = tag("dtype", "f32");
  h.interleave = tag("interleave", "bsq");
  h.byteorder = tag("byteorder", "le");
  if (h.width == 0 || h.height == 0 || h.bands == 0)
    throw FormatError("cube header dimensions must all be at least 1");
  return h;
}

void check_finite(std::span<const float> values) {
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!std::isfinite(values[k]))
      throw FormatError("non-finite value at element " + std::to_string(k));
}

HyperCube::HyperCube(std::size_t width, std::size_t height, std::size_t bands)
    : HyperCube(width, height, bands, std::vector<float>(width * height * bands, 0.0f)) {}

HyperCube::HyperCube(std::size_t width, std::size_t height, std::size_t bands,
                     std::vector<float> data)
    : width_(width), height_(height), bands_(bands), data_(std::move(data)) {
  if (width == 0 || height == 0 || bands == 0)
    throw InvalidArgument("cube dimensions must all be at least 1 (got " +
                          std::to_string(width) + "x" + std::to_string(height) + "x" +
                          std::to_string(bands) + ")");
  if (data_.size() != width * height * bands)
    throw InvalidArgument("cube data holds " + std::to_string(data_.size()) +
                          " values, expected " + std::to_string(width * height * bands));
  check_finite(data_);
}

CubeHeader HyperCube::header() const {
  CubeHeader h;
  h.width = width_;
  h.height = height_;
  h.bands = bands_;
  return h;
}

void SignatureSet::validate() const {
  if (bands == 0) throw InvalidArgument("signature set needs at least one band");
  if (spectra.empty()) throw InvalidArgument("signature set needs at least one spectrum");
  if (names.size() != spectra.size())
    throw InvalidArgument("signature set has " + std::to_string(names.size()) + " names for " +
                          std::to_string(spectra.size()) + " spectra");
  for (std::size_t s = 0; s < spectra.size(); ++s) {
    if (spectra[s].size() != bands)
      throw InvalidArgument("signature '" + names[s] + "' has " +
                            std::to_string(spectra[s].size()) + " values, expected " +
                            std::to_string(bands));
    for (float v : spectra[s])
      if (!std::isfinite(v) || v < 0.0f)
        throw InvalidArgument("signature '" + names[s] + "' has a negative or non-finite value");
  }
}

double spectral_angle(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw InvalidArgument("spectral_angle needs equal-length spectra");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += double(a[k]) * b[k];
    na += double(a[k]) * a[k];
    nb += double(b[k]) * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot / std::sqrt(na * nb);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

SignatureSet load_signatures_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open signature file " + path.string());

  SignatureSet sigs;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);

    if (sigs.bands == 0) {
      try {
        std::size_t used = 0;
        const long m = std::stol(fields.at(0), &used);
        if (m < 1 || fields.size() != 1) fail("first row must be the band count");
        sigs.bands = static_cast<std::size_t>(m);
      } catch (const std::logic_error&) {
        fail("first row must be the band count");
      }
      continue;
    }
    if (fields.size() != sigs.bands + 1)
      fail("expected a name and " + std::to_string(sigs.bands) + " values, got " +
           std::to_string(fields.size()) + " fields");
    std::vector<float> spectrum;
    spectrum.reserve(sigs.bands);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      try {
        std::size_t used = 0;
        const float v = std::stof(fields[k], &used);
        if (!std::isfinite(v) || v < 0.0f) fail("values must be finite and nonnegative");
        spectrum.push_back(v);
      } catch (const std::logic_error&) {
        fail("cannot parse value '" + fields[k] + "'");
      }
    }
    sigs.names.push_back(fields[0]);
    sigs.spectra.push_back(std::move(spectrum));
  }
  if (sigs.bands == 0) throw FormatError(path.string() + ": empty signature file");
  sigs.validate();
  return sigs;
}

void save_signatures_csv(const SignatureSet& sigs, const std::filesystem::path& path) {
  sigs.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write signature file " + path.string());
  out << sigs.bands << "\n";
  out.precision(9);
  for (std::size_t s = 0; s < sigs.count(); ++s) {
    out << sigs.names[s];
    for (float v : sigs.spectra[s]) out << ',' << v;
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace hsipca
