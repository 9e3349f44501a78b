#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hsipca/error.hpp"
#include "hsipca/pca.hpp"
#include "support/oracles.hpp"

namespace hsipca {
namespace {

using testing::naive_center;
using testing::naive_covariance;
using testing::random_cube;
using testing::relative_frobenius;
using testing::sample_variance;

HyperCube from_bands(std::size_t w, std::size_t h, const std::vector<std::vector<float>>& bands) {
  std::vector<float> data;
  for (const auto& b : bands) data.insert(data.end(), b.begin(), b.end());
  return HyperCube(w, h, bands.size(), std::move(data));
}

CenteredCube already_centered(HyperCube cube) {
  return CenteredCube{std::move(cube), {}};
}

EigenDecomposition with_vectors(const std::vector<std::vector<double>>& columns,
                                std::vector<double> values) {
  EigenDecomposition eig;
  eig.dim = columns.size();
  eig.eigenvalues = std::move(values);
  eig.eigenvectors = SquareMatrix(eig.dim);
  for (std::size_t k = 0; k < eig.dim; ++k)
    for (std::size_t r = 0; r < eig.dim; ++r) eig.eigenvectors(r, k) = columns[k][r];
  return eig;
}

TEST(MeanCenter, Arithmetic) {
  const auto x = mean_center(from_bands(3, 1, {{1.0f, 2.0f, 3.0f}}));
  EXPECT_EQ(x.band_means, (std::vector<double>{2.0}));
  EXPECT_EQ(std::vector<float>(x.cube.band(0).begin(), x.cube.band(0).end()),
            (std::vector<float>{-1.0f, 0.0f, 1.0f}));
}

TEST(MeanCenter, ZeroCubeUnchanged) {
  const HyperCube zero(4, 3, 5);
  const auto x = mean_center(zero);
  EXPECT_EQ(x.cube, zero);
  EXPECT_EQ(x.band_means, std::vector<double>(5, 0.0));
}

TEST(MeanCenter, MatchesNaiveOracle) {
  const HyperCube cube = random_cube(16, 16, 7, 31, 0.0f, 2.0f);
  const auto x = mean_center(cube);
  const auto oracle = naive_center(cube);
  for (std::size_t b = 0; b < 7; ++b) {
    double mean = 0.0;
    for (float v : x.cube.band(b)) mean += v;
    EXPECT_LT(std::fabs(mean / 256.0), 1e-5);
    for (std::size_t p = 0; p < 256; ++p) ASSERT_NEAR(x.cube.at(p, b), oracle[b][p], 1e-6);
  }
}

TEST(MeanCenter, AddingMeansBackReconstructs) {
  const HyperCube cube = random_cube(20, 20, 6, 5, 0.1f, 1.0f);
  const auto x = mean_center(cube);
  for (std::size_t b = 0; b < 6; ++b)
    for (std::size_t p = 0; p < 400; ++p) {
      const float orig = cube.at(p, b);
      const float back = static_cast<float>(double(x.cube.at(p, b)) + x.band_means[b]);
      const float scale = std::max(std::fabs(orig), std::fabs(x.cube.at(p, b)));
      ASSERT_LE(std::fabs(back - orig), std::nextafter(scale, INFINITY) - scale);
    }
}

TEST(MeanCenter, Idempotent) {
  const auto once = mean_center(random_cube(12, 9, 4, 2, -1.0f, 3.0f));
  const auto twice = mean_center(once.cube);
  for (std::size_t k = 0; k < once.cube.data().size(); ++k)
    ASSERT_NEAR(once.cube.data()[k], twice.cube.data()[k], 1e-6);
}

TEST(MeanCenter, SinglePrecisionModeIsClose) {
  const HyperCube cube = random_cube(16, 16, 4, 8);
  const auto mixed = mean_center(cube);
  const auto single = mean_center(cube, serial_executor(), Precision::single);
  for (std::size_t k = 0; k < cube.data().size(); ++k)
    ASSERT_NEAR(mixed.cube.data()[k], single.cube.data()[k], 1e-5);
}

TEST(Covariance, HandExample) {
  const auto x = already_centered(from_bands(2, 1, {{1.0f, -1.0f}, {2.0f, -2.0f}}));
  const SymMatrix c = covariance(x);
  EXPECT_EQ(c, SymMatrix::from_rows({{2.0, 4.0}, {4.0, 8.0}}));
}

TEST(Covariance, ZeroBand) {
  const auto x = already_centered(from_bands(3, 1, {{0.0f, 0.0f, 0.0f}}));
  EXPECT_EQ(covariance(x), SymMatrix(1));
}

TEST(Covariance, MatchesNaiveOracle) {
  const auto x = mean_center(random_cube(64, 64, 10, 12));
  const SymMatrix c = covariance(x);
  EXPECT_LT(relative_frobenius(c, naive_covariance(x.cube)), 1e-6);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_GE(c(i, i), 0.0);
    for (std::size_t j = 0; j < 10; ++j) ASSERT_EQ(c(i, j), c(j, i));
  }
  const auto lambda = testing::oracle_eigenvalues(c);
  EXPECT_GE(lambda.back(), -1e-6 * c.trace());
}

TEST(Covariance, NeedsTwoPixels) {
  const auto x = already_centered(from_bands(1, 1, {{1.0f}, {2.0f}}));
  EXPECT_THROW(covariance(x), InvalidArgument);
  EXPECT_THROW(covariance_blocked(x, 2), InvalidArgument);
}

TEST(CovarianceBlocked, OneSplitIsIdentical) {
  const auto x = mean_center(random_cube(37, 29, 9, 3));
  EXPECT_EQ(covariance_blocked(x, 1), covariance(x));
}

TEST(CovarianceBlocked, HandExampleTwoSplits) {
  const auto x = already_centered(from_bands(2, 1, {{1.0f, -1.0f}, {2.0f, -2.0f}}));
  EXPECT_EQ(covariance_blocked(x, 2), SymMatrix::from_rows({{2.0, 4.0}, {4.0, 8.0}}));
}

TEST(CovarianceBlocked, AgreesWithDirect) {
  const auto x = mean_center(random_cube(100, 100, 20, 41));
  const SymMatrix direct = covariance(x);
  for (std::size_t splits : {2u, 4u, 8u, 7u, 10000u, 20000u})
    EXPECT_LT(relative_frobenius(covariance_blocked(x, splits), direct), 1e-6) << splits;
}

TEST(CovarianceBlocked, RejectsZeroSplits) {
  const auto x = mean_center(random_cube(4, 4, 2, 1));
  EXPECT_THROW(covariance_blocked(x, 0), InvalidArgument);
}

TEST(Covariance, DeterministicAcrossWorkersAndFastModeClose) {
  const auto x = mean_center(random_cube(50, 40, 12, 77));
  const SymMatrix reference = covariance(x);
  const SymMatrix blocked = covariance_blocked(x, 4);
  for (std::size_t workers : {2u, 4u, 8u}) {
    Executor exec(ExecPlan{workers, ExecMode::deterministic, 0});
    EXPECT_EQ(covariance(x, exec), reference);
    EXPECT_EQ(covariance_blocked(x, 4, exec), blocked);
    EXPECT_EQ(mean_center(x.cube, exec).cube, mean_center(x.cube).cube);
    Executor fast(ExecPlan{workers, ExecMode::fast, 0});
    EXPECT_LT(relative_frobenius(covariance(x, fast), reference), 1e-6);
    EXPECT_LT(relative_frobenius(covariance_blocked(x, 3, fast), reference), 1e-6);
  }
}

TEST(Covariance, SinglePrecisionModeIsClose) {
  const auto x = mean_center(random_cube(32, 32, 6, 2));
  EXPECT_LT(relative_frobenius(covariance(x, serial_executor(), Precision::single), covariance(x)),
            1e-4);
}

TEST(Project, UnitProjection) {
  const auto x = already_centered(from_bands(1, 1, {{1.0f}, {0.0f}}));
  const auto eig = with_vectors({{1.0, 0.0}, {0.0, 1.0}}, {1.0, 0.0});
  const auto proj = project(x, eig, 1);
  EXPECT_EQ(proj.scores, (std::vector<float>{1.0f}));
}

TEST(Project, FirstBasisVectorSelectsBandZero) {
  const HyperCube cube = random_cube(6, 5, 3, 13);
  const auto eig = with_vectors({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}, {3, 2, 1});
  const auto proj = project(cube, eig, 2);
  for (std::size_t p = 0; p < 30; ++p) {
    EXPECT_EQ(proj.component(0)[p], cube.at(p, 0));
    EXPECT_EQ(proj.component(1)[p], cube.at(p, 1));
  }
}

TEST(Project, VarianceMatchesEigenvalues) {
  const auto x = mean_center(random_cube(32, 32, 6, 19));
  const auto eig = jacobi_eigen(covariance(x));
  const auto proj = project(x, eig, 6);
  double previous = INFINITY;
  for (std::size_t k = 0; k < 6; ++k) {
    const double var = sample_variance(proj.component(k));
    EXPECT_NEAR(var, eig.eigenvalues[k], 1e-4 * eig.eigenvalues[k]);
    EXPECT_LE(var, previous + 1e-6 * eig.eigenvalues[0]);
    previous = var;
  }
}

TEST(Project, RawInputShiftsScoresByProjectedMean) {
  const HyperCube cube = random_cube(10, 10, 4, 23, 1.0f, 2.0f);
  const auto x = mean_center(cube);
  const auto eig = jacobi_eigen(covariance(x));
  const auto centered = project(x, eig, 2);
  const auto raw = project(cube, eig, 2);
  for (std::size_t k = 0; k < 2; ++k) {
    double shift = 0.0;
    for (std::size_t b = 0; b < 4; ++b) shift += x.band_means[b] * eig.eigenvectors(b, k);
    for (std::size_t p = 0; p < 100; ++p)
      ASSERT_NEAR(raw.component(k)[p] - centered.component(k)[p], shift, 1e-5);
  }
}

TEST(Project, ComponentRange) {
  const auto x = mean_center(random_cube(4, 4, 3, 1));
  const auto eig = jacobi_eigen(covariance(x));
  EXPECT_THROW(project(x, eig, 0), InvalidArgument);
  EXPECT_THROW(project(x, eig, 4), InvalidArgument);
  const auto other = jacobi_eigen(SymMatrix::diagonal(std::vector<double>{1.0, 2.0}));
  EXPECT_THROW(project(x, other, 1), InvalidArgument);
}

TEST(Project, IndependentOfWorkers) {
  const auto x = mean_center(random_cube(70, 70, 5, 4));
  const auto eig = jacobi_eigen(covariance(x));
  const auto reference = project(x, eig, 3);
  Executor exec(ExecPlan{3, ExecMode::fast, 0});
  EXPECT_EQ(project(x, eig, 3, exec), reference);
}

TEST(ExplainedVariance, Arithmetic) {
  const auto eig = with_vectors({{1.0, 0.0}, {0.0, 1.0}}, {3.0, 1.0});
  EXPECT_DOUBLE_EQ(explained_variance(eig, 1), 0.75);
  EXPECT_DOUBLE_EQ(explained_variance(eig, 2), 1.0);
  EXPECT_THROW(explained_variance(eig, 0), InvalidArgument);
  EXPECT_THROW(explained_variance(eig, 3), InvalidArgument);
}

TEST(ExplainedVariance, ClampsNegativesAndHandlesZeroTotal) {
  const auto neg = with_vectors({{1.0, 0.0}, {0.0, 1.0}}, {2.0, -1e-12});
  EXPECT_DOUBLE_EQ(explained_variance(neg, 1), 1.0);
  const auto zero = with_vectors({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(explained_variance(zero, 1), 1.0);
}

TEST(ExplainedVariance, TenEndmembersAtSeventyDecibels) {
  const auto sigs = builtin_signatures(50, 10, 1);
  const auto syn = generate_synthetic(sigs, 100, 100, 10, 70.0, 5);
  const auto eig = jacobi_eigen(covariance(mean_center(syn.cube)));
  EXPECT_GE(explained_variance(eig, 10), 0.999);
}

TEST(ProjectionExport, RoundTrip) {
  const auto x = mean_center(random_cube(6, 4, 3, 1));
  const auto proj = project(x, jacobi_eigen(covariance(x)), 2);
  const auto stem = std::filesystem::temp_directory_path() / "hsipca_proj";
  write_projection(proj, 6, 4, stem);
  EXPECT_EQ(read_projection(stem), proj);
  EXPECT_EQ(std::filesystem::file_size(stem.string() + ".raw"), 2u * 24u * 4u);
  EXPECT_THROW(write_projection(proj, 5, 4, stem), InvalidArgument);
  std::filesystem::remove(stem.string() + ".raw");
  std::filesystem::remove(stem.string() + ".json");
}

TEST(ProjectionExport, BandMeansCsv) {
  const auto path = std::filesystem::temp_directory_path() / "hsipca_means.csv";
  const std::vector<double> means{0.5, 2.0};
  write_band_means_csv(means, path);
  std::ifstream in(path);
  std::string a, b, c;
  std::getline(in, a);
  std::getline(in, b);
  std::getline(in, c);
  EXPECT_EQ(a, "band,mean");
  EXPECT_EQ(b, "0,0.5");
  EXPECT_EQ(c, "1,2");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hsipca
