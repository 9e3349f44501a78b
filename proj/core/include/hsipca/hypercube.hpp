#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsipca/parallel.hpp"

namespace hsipca {

// Sidecar describing a headerless raw cube file.
struct CubeHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t bands = 0;
  std::string dtype = "f32";
  std::string interleave = "bsq";
  std::string byteorder = "le";

  std::size_t pixels() const noexcept { return width * height; }
  std::uintmax_t data_bytes() const noexcept;

  std::string serialize() const;
  static CubeHeader parse(std::string_view text);

  friend bool operator==(const CubeHeader&, const CubeHeader&) = default;
};

// N pixels x M bands of single-precision reflectance, band-major: all N
// values of band 0, then band 1, and so on.
class HyperCube {
 public:
  HyperCube() = default;
  // Zero-filled cube.
  HyperCube(std::size_t width, std::size_t height, std::size_t bands);
  // Takes ownership of band-major `data`; rejects size mismatch and
  // non-finite values.
  HyperCube(std::size_t width, std::size_t height, std::size_t bands, std::vector<float> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return width_ * height_; }
  std::size_t bands() const noexcept { return bands_; }

  std::span<const float> band(std::size_t b) const {
    return {data_.data() + b * pixels(), pixels()};
  }
  std::span<float> band(std::size_t b) { return {data_.data() + b * pixels(), pixels()}; }

  float at(std::size_t pixel, std::size_t b) const { return data_[b * pixels() + pixel]; }
  float& at(std::size_t pixel, std::size_t b) { return data_[b * pixels() + pixel]; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  CubeHeader header() const;

  friend bool operator==(const HyperCube&, const HyperCube&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t bands_ = 0;
  std::vector<float> data_;
};

// Throws FormatError naming the first non-finite element.
void check_finite(std::span<const float> values);

// <stem>.hdr.json and <stem>.raw
std::filesystem::path header_path_for(const std::filesystem::path& stem);
std::filesystem::path data_path_for(const std::filesystem::path& stem);

HyperCube load_cube(const std::filesystem::path& header_path,
                    const std::filesystem::path& data_path);
HyperCube load_cube(const std::filesystem::path& stem);
void save_cube(const HyperCube& cube, const std::filesystem::path& header_path,
               const std::filesystem::path& data_path);
void save_cube(const HyperCube& cube, const std::filesystem::path& stem);

// Little-endian float32 helpers shared by the raw writers.
void write_f32_le(const std::filesystem::path& path, std::span<const float> values);
std::vector<float> read_f32_le(const std::filesystem::path& path);

// Endmember library: `count` spectra of `bands` nonnegative reflectances.
struct SignatureSet {
  std::size_t bands = 0;
  std::vector<std::string> names;
  std::vector<std::vector<float>> spectra;

  std::size_t count() const noexcept { return spectra.size(); }
  void validate() const;

  friend bool operator==(const SignatureSet&, const SignatureSet&) = default;
};

// Spectral angle in radians.
double spectral_angle(std::span<const float> a, std::span<const float> b);

// Minimum pairwise spectral angle accepted by builtin_signatures.
inline constexpr double kMinSignatureAngle = 0.05;

// Procedural library of smooth spectra (a baseline plus Gaussian absorption
// and reflectance bumps). If any pair of spectra is closer than
// kMinSignatureAngle the whole set is regenerated with seed + 1, repeatedly.
SignatureSet builtin_signatures(std::size_t bands, std::size_t count, std::uint64_t seed);

// CSV: first row is the band count M, every further row is a name followed by
// M nonnegative values.
SignatureSet load_signatures_csv(const std::filesystem::path& path);
void save_signatures_csv(const SignatureSet& sigs, const std::filesystem::path& path);

// Pass as snr_db to disable noise.
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

struct SyntheticCube {
  HyperCube cube;
  std::vector<std::size_t> endmember_indices;  // into the signature set
  double signal_power = 0.0;                   // mean square of the noiseless cube
  double noise_variance = 0.0;                 // requested sigma^2
  double noise_power = 0.0;                    // mean square of the noise actually added
  double measured_snr_db = kNoiseless;         // 10 log10(signal_power / noise_power)
};

// Linear mixtures of `endmembers` randomly chosen signatures with per-pixel
// abundances uniform on the simplex, plus zero-mean Gaussian noise with
// variance signal_power / 10^(snr_db/10). Bit-identical for a fixed seed,
// whatever the executor's worker count.
SyntheticCube generate_synthetic(const SignatureSet& sigs, std::size_t width, std::size_t height,
                                 std::size_t endmembers, double snr_db, std::uint64_t seed,
                                 Executor& exec = serial_executor());

// Abundance vector the generator uses for `pixel`; sums to 1.
std::vector<double> sample_abundances(std::uint64_t seed, std::size_t pixel,
                                      std::size_t endmembers);

// Binary P5 with min -> 0, max -> 255; a constant field maps to 128.
std::vector<std::uint8_t> scale_to_gray(std::span<const float> values);
void render_band_pgm(std::span<const float> values, std::size_t width, std::size_t height,
                     const std::filesystem::path& out_path);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace hsipca
