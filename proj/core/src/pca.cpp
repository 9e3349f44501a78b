#include "hsipca/pca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsipca/error.hpp"

namespace hsipca {

namespace {

// Pixels per inner block. Fixed, so every summation order is a function of
// the data shape alone.
constexpr std::size_t kPixelBlock = 1024;

struct Entry {
  std::size_t i, j;
};

std::vector<Entry> upper_triangle(std::size_t m) {
  std::vector<Entry> out;
  out.reserve(m * (m + 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) out.push_back({i, j});
  return out;
}

template <class Acc>
Acc dot(const float* a, const float* b, std::size_t n) {
  Acc l0 = 0, l1 = 0, l2 = 0, l3 = 0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    l0 += Acc(a[k]) * Acc(b[k]);
    l1 += Acc(a[k + 1]) * Acc(b[k + 1]);
    l2 += Acc(a[k + 2]) * Acc(b[k + 2]);
    l3 += Acc(a[k + 3]) * Acc(b[k + 3]);
  }
  for (; k < n; ++k) l0 += Acc(a[k]) * Acc(b[k]);
  return (l0 + l1) + (l2 + l3);
}

// Adds sum_p x_i[p] x_j[p] over `pixels` to acc[e] for e in `entries`.
template <class Acc>
void accumulate_gram(const HyperCube& x, std::span<const Entry> all, IndexRange entries,
                     IndexRange pixels, std::span<Acc> acc) {
  for (std::size_t p0 = pixels.begin; p0 < pixels.end; p0 += kPixelBlock) {
    const std::size_t len = std::min(kPixelBlock, pixels.end - p0);
    for (std::size_t e = entries.begin; e < entries.end; ++e) {
      const float* a = x.band(all[e].i).data() + p0;
      const float* b = x.band(all[e].j).data() + p0;
      acc[e] += dot<Acc>(a, b, len);
    }
  }
}

template <class Acc>
std::vector<Acc> add_partials(std::vector<Acc> a, std::vector<Acc> b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}

// Partial Gram matrix (upper triangle, linear) of one pixel range, split over
// the executor by triangle entry. Entry sums never depend on the split.
template <class Acc>
std::vector<Acc> gram_of_range(const HyperCube& x, std::span<const Entry> all, IndexRange pixels,
                               Executor& exec) {
  std::vector<Acc> acc(all.size(), Acc{0});
  const auto schedule = partition(PartitionKind::by_triangle_entry, all.size(), exec.workers());
  exec.run(schedule.assignments.size(), [&](std::size_t w) {
    accumulate_gram<Acc>(x, all, schedule.assignments[w], pixels, std::span<Acc>(acc));
  });
  return acc;
}

template <class Acc>
SymMatrix finish(std::span<const Entry> all, const std::vector<Acc>& sums, std::size_t m,
                 std::size_t n) {
  SymMatrix c(m);
  const Acc denom = Acc(n - 1);
  for (std::size_t e = 0; e < all.size(); ++e) c.set(all[e].i, all[e].j, double(sums[e] / denom));
  return c;
}

template <class Acc>
SymMatrix covariance_impl(const CenteredCube& x, std::size_t splits, Executor& exec) {
  const HyperCube& cube = x.cube;
  const std::size_t n = cube.pixels();
  const auto all = upper_triangle(cube.bands());

  std::vector<IndexRange> chunks;
  if (splits == 1) {
    chunks.push_back({0, n});
  } else {
    chunks = fixed_chunks(n, (n + splits - 1) / splits);
  }

  if (exec.mode() == ExecMode::fast) {
    // Pixel ranges follow the worker count; partials combine in completion order.
    std::vector<IndexRange> work;
    for (const auto& chunk : chunks)
      for (const auto& r : partition(PartitionKind::by_pixel_chunk, chunk.size(), exec.workers())
                               .assignments)
        if (!r.empty()) work.push_back({chunk.begin + r.begin, chunk.begin + r.end});
    auto sums = exec.map_reduce<std::vector<Acc>>(
        work.size(),
        [&](std::size_t t) {
          std::vector<Acc> acc(all.size(), Acc{0});
          accumulate_gram<Acc>(cube, all, {0, all.size()}, work[t], std::span<Acc>(acc));
          return acc;
        },
        add_partials<Acc>);
    return finish<Acc>(all, sums, cube.bands(), n);
  }

  std::vector<std::vector<Acc>> partials;
  partials.reserve(chunks.size());
  for (const auto& chunk : chunks) partials.push_back(gram_of_range<Acc>(cube, all, chunk, exec));
  return finish<Acc>(all, tree_reduce(std::move(partials), add_partials<Acc>), cube.bands(), n);
}

void check_covariance_input(const CenteredCube& x) {
  if (x.cube.pixels() < 2)
    throw InvalidArgument("covariance needs at least 2 pixels (normalization by N-1)");
}

}  // namespace

std::string_view to_string(Precision precision) {
  return precision == Precision::mixed ? "mixed" : "single";
}

Precision parse_precision(std::string_view text) {
  if (text == "mixed") return Precision::mixed;
  if (text == "single") return Precision::single;
  throw InvalidArgument("unknown precision '" + std::string(text) + "' (expected mixed or single)");
}

CenteredCube mean_center(const HyperCube& cube, Executor& exec, Precision precision) {
  CenteredCube out{cube, std::vector<double>(cube.bands(), 0.0)};
  const std::size_t n = cube.pixels();
  const auto schedule = partition(PartitionKind::by_band, cube.bands(), exec.workers());
  exec.run(schedule.assignments.size(), [&](std::size_t w) {
    for (std::size_t b = schedule.assignments[w].begin; b < schedule.assignments[w].end; ++b) {
      auto values = out.cube.band(b);
      if (precision == Precision::single) {
        float sum = 0.0f;
        for (float v : values) sum += v;
        const float mean = sum / static_cast<float>(n);
        for (float& v : values) v -= mean;
        out.band_means[b] = mean;
      } else {
        double sum = 0.0;
        for (float v : values) sum += v;
        const double mean = sum / static_cast<double>(n);
        for (float& v : values) v = static_cast<float>(double(v) - mean);
        out.band_means[b] = mean;
      }
    }
  });
  return out;
}

SymMatrix covariance(const CenteredCube& x, Executor& exec, Precision precision) {
  check_covariance_input(x);
  return precision == Precision::single ? covariance_impl<float>(x, 1, exec)
                                        : covariance_impl<double>(x, 1, exec);
}

SymMatrix covariance_blocked(const CenteredCube& x, std::size_t splits, Executor& exec,
                             Precision precision) {
  if (splits < 1) throw InvalidArgument("covariance_blocked needs splits >= 1");
  check_covariance_input(x);
  return precision == Precision::single ? covariance_impl<float>(x, splits, exec)
                                        : covariance_impl<double>(x, splits, exec);
}

Projection project(const HyperCube& data, const EigenDecomposition& eig, std::size_t components,
                   Executor& exec) {
  const std::size_t m = data.bands();
  if (eig.dim != m)
    throw InvalidArgument("eigendecomposition has dimension " + std::to_string(eig.dim) +
                          " but the cube has " + std::to_string(m) + " bands");
  if (components < 1 || components > m)
    throw InvalidArgument("number of components must be in [1, " + std::to_string(m) + "], got " +
                          std::to_string(components));
  const std::size_t n = data.pixels();
  Projection out{components, n, std::vector<float>(components * n)};
  const auto chunks = fixed_chunks(n, kPixelBlock * 4);
  exec.run(chunks.size(), [&](std::size_t c) {
    const IndexRange r = chunks[c];
    std::vector<double> acc(r.size());
    for (std::size_t k = 0; k < components; ++k) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t b = 0; b < m; ++b) {
        const double w = eig.eigenvectors(b, k);
        const float* src = data.band(b).data() + r.begin;
        for (std::size_t p = 0; p < r.size(); ++p) acc[p] += double(src[p]) * w;
      }
      float* dst = out.scores.data() + k * n + r.begin;
      for (std::size_t p = 0; p < r.size(); ++p) dst[p] = static_cast<float>(acc[p]);
    }
  });
  return out;
}

Projection project(const CenteredCube& x, const EigenDecomposition& eig, std::size_t components,
                   Executor& exec) {
  return project(x.cube, eig, components, exec);
}

double explained_variance(const EigenDecomposition& eig, std::size_t components) {
  if (components < 1 || components > eig.eigenvalues.size())
    throw InvalidArgument("number of components must be in [1, " +
                          std::to_string(eig.eigenvalues.size()) + "], got " +
                          std::to_string(components));
  double head = 0.0, total = 0.0;
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const double v = std::max(0.0, eig.eigenvalues[k]);
    total += v;
    if (k < components) head += v;
  }
  return total > 0.0 ? head / total : 1.0;
}

void write_projection(const Projection& proj, std::size_t width, std::size_t height,
                      const std::filesystem::path& stem) {
  if (width * height != proj.pixels)
    throw InvalidArgument("projection has " + std::to_string(proj.pixels) +
                          " pixels, not " + std::to_string(width) + "x" + std::to_string(height));
  nlohmann::ordered_json j;
  j["components"] = proj.components;
  j["pixels"] = proj.pixels;
  j["width"] = width;
  j["height"] = height;
  j["dtype"] = "f32";
  j["layout"] = "component-major";
  j["byteorder"] = "le";
  const std::filesystem::path meta(stem.string() + ".json");
  std::ofstream out(meta);
  if (!out) throw IoError("cannot write " + meta.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + meta.string());
  write_f32_le(std::filesystem::path(stem.string() + ".raw"), proj.scores);
}

Projection read_projection(const std::filesystem::path& stem) {
  const std::filesystem::path meta(stem.string() + ".json");
  std::ifstream in(meta);
  if (!in) throw IoError("cannot open " + meta.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta.string() + ": " + e.what());
  }
  Projection p;
  try {
    p.components = j.at("components").get<std::size_t>();
    p.pixels = j.at("pixels").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta.string() + ": " + e.what());
  }
  p.scores = read_f32_le(std::filesystem::path(stem.string() + ".raw"));
  if (p.scores.size() != p.components * p.pixels)
    throw FormatError("projection payload size does not match " + meta.string());
  return p;
}

void write_band_means_csv(std::span<const double> means, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "band,mean\n";
  out.precision(17);
  for (std::size_t b = 0; b < means.size(); ++b) out << b << ',' << means[b] << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace hsipca
