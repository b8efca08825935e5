#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "uled/features.hpp"

namespace uled::ml {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// One row per cell, columns in CellFeatures::values() order.
Matrix feature_matrix(std::span<const features::CellFeatures> cells);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population std; 1 for zero-variance columns

  Matrix transform(const Matrix& x) const;
};

/// Throws ErrorKind::input for fewer than 2 rows.
std::pair<Standardizer, Matrix> standardize_fit_transform(const Matrix& x);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// values descending; vectors(:, i) belongs to values[i].
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};

/// Throws ErrorKind::convergence when off-diagonal mass survives max_sweeps.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, int max_sweeps = 100);

/// Population covariance (divide by n) of the columns of x.
Matrix covariance(const Matrix& x);

struct PcaModel {
  Matrix components;  // 2 x d, orthonormal rows
  std::array<double, 2> explained_variance{};
};

/// Two leading eigenvectors of the population covariance. Each component is
/// signed so that its largest-magnitude entry (first on ties) is positive.
/// Throws ErrorKind::input for fewer than 3 rows or fewer than 2 columns.
PcaModel pca_fit(const Matrix& z);

/// Y = Z * components^T. Throws ErrorKind::dimension on column mismatch.
Matrix pca_transform(const PcaModel& model, const Matrix& z);

struct KMeansConfig {
  std::size_t k = 2;
  std::size_t n_init = 100;
  std::uint64_t seed = 8;
  std::size_t max_iter = 300;
  double tol = 1e-8;  // on the summed squared centroid movement
  std::size_t threads = 0;  // 0: default_thread_count()
};

struct KMeansModel {
  Matrix centroids;  // k x 2
  std::vector<std::int32_t> labels;
  double inertia = 0.0;
  KMeansConfig config;
  std::size_t best_restart = 0;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding, n_init restarts, each finished
/// with single-point (Hartigan) transfers that lower the inertia. Restart r draws
/// from SplitMix64(derive_seed(seed, r)); the lowest inertia wins, ties to the
/// lowest restart index, so the result is independent of `threads`. An empty
/// cluster is re-seeded at the point farthest from its assigned centroid.
/// Throws ErrorKind::input when n < k, k == 0, Y is not n x 2, or Y holds a
/// non-finite value.
KMeansModel kmeans_fit(const Matrix& y, const KMeansConfig& config = {});

/// Sum of squared distances from each point to its labelled centroid.
double inertia(const Matrix& y, const Matrix& centroids, std::span<const std::int32_t> labels);

enum class CellStatus : std::uint8_t { functional, defect };

struct LabelOptions {
  /// A cluster is a defect population only when its average mean_l is below
  /// this fraction of the brightest cluster's average.
  double max_defect_ratio = 0.5;
};

struct Labeling {
  std::vector<CellStatus> status;
  bool degenerate = false;  // no cluster qualified as a defect population
  std::int32_t functional_cluster = 0;
};

/// The cluster with the highest average mean_l is functional. Every other
/// cluster is defect when dim enough per `options`, else merged into the
/// functional class. When no cluster is labelled defect (including the case
/// of a single populated cluster) every cell is functional and `degenerate`
/// is set.
Labeling label_clusters(const KMeansModel& model, std::span<const features::CellFeatures> cells,
                        const LabelOptions& options = {});

}  // namespace uled::ml
