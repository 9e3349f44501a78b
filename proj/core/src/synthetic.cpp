#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hsipca/error.hpp"
#include "hsipca/hypercube.hpp"
#include "rng.hpp"

namespace hsipca {

namespace {

constexpr std::size_t kPixelChunk = 4096;
constexpr std::size_t kMaxSignatureAttempts = 256;
constexpr std::uint64_t kAbundanceStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSelectionStream = 3;

SignatureSet draw_signatures(std::size_t bands, std::size_t count, std::uint64_t seed) {
  detail::SplitMix64 rng(seed);
  SignatureSet sigs;
  sigs.bands = bands;
  for (std::size_t s = 0; s < count; ++s) {
    const double baseline = 0.05 + 0.25 * rng.uniform();
    const double slope = 0.3 * (rng.uniform() - 0.5);
    const std::size_t n_bumps = 3 + rng.below(4);
    struct Bump {
      double center, width, amplitude;
    };
    std::vector<Bump> bumps(n_bumps);
    for (auto& b : bumps) {
      b.center = rng.uniform();
      b.width = 0.03 + 0.15 * rng.uniform();
      b.amplitude = 0.8 * (rng.uniform() - 0.35);
    }
    std::vector<float> spectrum(bands);
    for (std::size_t k = 0; k < bands; ++k) {
      const double wl = bands > 1 ? double(k) / double(bands - 1) : 0.5;
      double v = baseline + slope * (wl - 0.5);
      for (const auto& b : bumps) {
        const double d = (wl - b.center) / b.width;
        v += b.amplitude * std::exp(-0.5 * d * d);
      }
      spectrum[k] = static_cast<float>(std::max(0.0, v));
    }
    char name[32];
    std::snprintf(name, sizeof(name), "builtin-%02zu", s);
    sigs.names.emplace_back(name);
    sigs.spectra.push_back(std::move(spectrum));
  }
  return sigs;
}

bool well_separated(const SignatureSet& sigs) {
  for (const auto& s : sigs.spectra)
    if (std::all_of(s.begin(), s.end(), [](float v) { return v == 0.0f; })) return false;
  for (std::size_t a = 0; a < sigs.count(); ++a)
    for (std::size_t b = a + 1; b < sigs.count(); ++b)
      if (spectral_angle(sigs.spectra[a], sigs.spectra[b]) <= kMinSignatureAngle) return false;
  return true;
}

}  // namespace

SignatureSet builtin_signatures(std::size_t bands, std::size_t count, std::uint64_t seed) {
  if (bands < 1 || count < 1)
    throw InvalidArgument("builtin_signatures needs bands >= 1 and count >= 1");
  for (std::size_t attempt = 0; attempt < kMaxSignatureAttempts; ++attempt) {
    SignatureSet sigs = draw_signatures(bands, count, seed + attempt);
    if (well_separated(sigs)) return sigs;
  }
  throw InvalidArgument("could not draw " + std::to_string(count) +
                        " mutually distinct signatures over " + std::to_string(bands) +
                        " bands");
}

std::vector<double> sample_abundances(std::uint64_t seed, std::size_t pixel,
                                      std::size_t endmembers) {
  detail::SplitMix64 rng(detail::stream_seed(seed, pixel, kAbundanceStream));
  std::vector<double> a(endmembers);
  double sum = 0.0;
  for (auto& v : a) {
    v = rng.exponential();
    sum += v;
  }
  for (auto& v : a) v /= sum;
  return a;
}

SyntheticCube generate_synthetic(const SignatureSet& sigs, std::size_t width, std::size_t height,
                                 std::size_t endmembers, double snr_db, std::uint64_t seed,
                                 Executor& exec) {
  sigs.validate();
  if (width < 1 || height < 1) throw InvalidArgument("synthetic cube needs width, height >= 1");
  if (endmembers < 1) throw InvalidArgument("synthetic cube needs at least one endmember");
  if (endmembers > sigs.count())
    throw InvalidArgument("requested " + std::to_string(endmembers) + " endmembers but only " +
                          std::to_string(sigs.count()) + " signatures are available");
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
    throw InvalidArgument("snr_db must be finite or +inf");

  SyntheticCube out;
  {
    std::vector<std::size_t> order(sigs.count());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    detail::SplitMix64 rng(detail::stream_seed(seed, 0, kSelectionStream));
    for (std::size_t k = 0; k < endmembers; ++k)
      std::swap(order[k], order[k + rng.below(order.size() - k)]);
    out.endmember_indices.assign(order.begin(), order.begin() + endmembers);
  }

  const std::size_t bands = sigs.bands;
  const std::size_t pixels = width * height;
  out.cube = HyperCube(width, height, bands);
  auto data = out.cube.data();
  const auto chunks = fixed_chunks(pixels, kPixelChunk);

  std::vector<double> partial(chunks.size(), 0.0);
  exec.run(chunks.size(), [&](std::size_t c) {
    double sumsq = 0.0;
    for (std::size_t p = chunks[c].begin; p < chunks[c].end; ++p) {
      const auto a = sample_abundances(seed, p, endmembers);
      for (std::size_t b = 0; b < bands; ++b) {
        double v = 0.0;
        for (std::size_t k = 0; k < endmembers; ++k)
          v += a[k] * sigs.spectra[out.endmember_indices[k]][b];
        const float stored = static_cast<float>(v);
        data[b * pixels + p] = stored;
        sumsq += double(stored) * stored;
      }
    }
    partial[c] = sumsq;
  });
  const double total_values = double(pixels) * double(bands);
  out.signal_power = tree_reduce(partial, std::plus<>{}) / total_values;

  if (snr_db == kNoiseless) {
    out.noise_variance = 0.0;
    out.noise_power = 0.0;
    out.measured_snr_db = kNoiseless;
    return out;
  }

  out.noise_variance = out.signal_power / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(out.noise_variance);
  std::fill(partial.begin(), partial.end(), 0.0);
  exec.run(chunks.size(), [&](std::size_t c) {
    double sumsq = 0.0;
    for (std::size_t p = chunks[c].begin; p < chunks[c].end; ++p) {
      detail::SplitMix64 rng(detail::stream_seed(seed, p, kNoiseStream));
      for (std::size_t b = 0; b < bands; ++b) {
        const double n = sigma * rng.normal();
        float& v = data[b * pixels + p];
        v = static_cast<float>(double(v) + n);
        sumsq += n * n;
      }
    }
    partial[c] = sumsq;
  });
  out.noise_power = tree_reduce(partial, std::plus<>{}) / total_values;
  out.measured_snr_db = out.noise_power > 0.0
                            ? 10.0 * std::log10(out.signal_power / out.noise_power)
                            : kNoiseless;
  return out;
}

}  // namespace hsipca
