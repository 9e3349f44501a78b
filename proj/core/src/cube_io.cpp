#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hsipca/error.hpp"
#include "hsipca/hypercube.hpp"

namespace hsipca {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    v = ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  return v;
}

}  // namespace

std::filesystem::path header_path_for(const std::filesystem::path& stem) {
  return std::filesystem::path(stem.string() + ".hdr.json");
}

std::filesystem::path data_path_for(const std::filesystem::path& stem) {
  return std::filesystem::path(stem.string() + ".raw");
}

void write_f32_le(const std::filesystem::path& path, std::span<const float> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  std::vector<char> buffer(values.size() * sizeof(float));
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(values[k]));
    std::memcpy(buffer.data() + k * sizeof(float), &bits, sizeof(bits));
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<float> read_f32_le(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  if (bytes.size() % sizeof(float) != 0)
    throw FormatError(path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, not a multiple of 4");
  std::vector<float> values(bytes.size() / sizeof(float));
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, bytes.data() + k * sizeof(float), sizeof(bits));
    values[k] = std::bit_cast<float>(to_le(bits));
  }
  return values;
}

HyperCube load_cube(const std::filesystem::path& header_path,
                    const std::filesystem::path& data_path) {
  const CubeHeader header = CubeHeader::parse(slurp(header_path));
  std::error_code ec;
  const auto actual = std::filesystem::file_size(data_path, ec);
  if (ec) throw IoError("cannot stat " + data_path.string() + ": " + ec.message());
  if (actual != header.data_bytes())
    throw FormatError("size mismatch for " + data_path.string() + ": expected " +
                      std::to_string(header.data_bytes()) + " bytes (" +
                      std::to_string(header.width) + "x" + std::to_string(header.height) + "x" +
                      std::to_string(header.bands) + " float32), found " +
                      std::to_string(actual) + " bytes");
  std::vector<float> values = read_f32_le(data_path);
  check_finite(values);
  return HyperCube(header.width, header.height, header.bands, std::move(values));
}

HyperCube load_cube(const std::filesystem::path& stem) {
  return load_cube(header_path_for(stem), data_path_for(stem));
}

void save_cube(const HyperCube& cube, const std::filesystem::path& header_path,
               const std::filesystem::path& data_path) {
  write_text(header_path, cube.header().serialize());
  write_f32_le(data_path, cube.data());
}

void save_cube(const HyperCube& cube, const std::filesystem::path& stem) {
  save_cube(cube, header_path_for(stem), data_path_for(stem));
}

std::vector<std::uint8_t> scale_to_gray(std::span<const float> values) {
  std::vector<std::uint8_t> gray(values.size(), 128);
  if (values.empty()) return gray;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return gray;
  const double scale = 255.0 / (hi - lo);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double g = std::round((double(values[k]) - lo) * scale);
    gray[k] = static_cast<std::uint8_t>(std::clamp(g, 0.0, 255.0));
  }
  return gray;
}

void render_band_pgm(std::span<const float> values, std::size_t width, std::size_t height,
                     const std::filesystem::path& out_path) {
  if (width == 0 || height == 0) throw InvalidArgument("cannot render a zero-area image");
  if (values.size() != width * height)
    throw InvalidArgument("image has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(width * height));
  check_finite(values);
  const auto gray = scale_to_gray(values);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw IoError("failed writing " + out_path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (next_token() != "P5") throw FormatError(path.string() + " is not a binary PGM (P5)");
  GrayImage img;
  try {
    img.width = std::stoul(next_token());
    img.height = std::stoul(next_token());
    if (std::stoul(next_token()) != 255) throw FormatError(path.string() + ": maxval must be 255");
  } catch (const std::logic_error&) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  ++pos;  // single whitespace before the raster
  if (bytes.size() - pos != img.width * img.height)
    throw FormatError(path.string() + ": raster size does not match header");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

}  // namespace hsipca
