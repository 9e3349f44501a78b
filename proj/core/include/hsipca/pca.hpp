#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "hsipca/hypercube.hpp"
#include "hsipca/jacobi.hpp"
#include "hsipca/matrix.hpp"
#include "hsipca/parallel.hpp"

namespace hsipca {

enum class Precision {
  mixed,   // float storage, double accumulators
  single,  // float accumulators throughout
};

std::string_view to_string(Precision precision);
Precision parse_precision(std::string_view text);

struct CenteredCube {
  HyperCube cube;                   // mean-removed values
  std::vector<double> band_means;   // what was removed from each band
};

CenteredCube mean_center(const HyperCube& cube, Executor& exec = serial_executor(),
                         Precision precision = Precision::mixed);

// C = X^T X / (N - 1). Deterministic mode sums every entry over pixels in
// index order, so the result does not depend on the worker count.
SymMatrix covariance(const CenteredCube& x, Executor& exec = serial_executor(),
                     Precision precision = Precision::mixed);

// Same contract, computed as a sum of partial Gram matrices over `splits`
// contiguous pixel chunks. splits == 1 reproduces covariance() exactly.
SymMatrix covariance_blocked(const CenteredCube& x, std::size_t splits,
                             Executor& exec = serial_executor(),
                             Precision precision = Precision::mixed);

// Scores of the first `components` principal components, component-major.
struct Projection {
  std::size_t components = 0;
  std::size_t pixels = 0;
  std::vector<float> scores;

  std::span<const float> component(std::size_t k) const {
    return {scores.data() + k * pixels, pixels};
  }

  friend bool operator==(const Projection&, const Projection&) = default;
};

// scores[k][pixel] = sum_b data[b][pixel] * e_k[b]
Projection project(const HyperCube& data, const EigenDecomposition& eig, std::size_t components,
                   Executor& exec = serial_executor());
Projection project(const CenteredCube& x, const EigenDecomposition& eig, std::size_t components,
                   Executor& exec = serial_executor());

// Fraction of total eigenvalue mass in the first `components` values.
// Negative eigenvalues count as zero; a zero total yields 1.
double explained_variance(const EigenDecomposition& eig, std::size_t components);

// Writes <stem>.raw (float32 LE, component-major) and <stem>.json.
void write_projection(const Projection& proj, std::size_t width, std::size_t height,
                      const std::filesystem::path& stem);
Projection read_projection(const std::filesystem::path& stem);

void write_band_means_csv(std::span<const double> means, const std::filesystem::path& path);

}  // namespace hsipca
