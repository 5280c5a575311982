#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsif/filter_bank.hpp"
#include "bsif/patches.hpp"

namespace bsif {

inline constexpr std::array<int, 12> kStandardSides{5, 7, 9, 11, 13, 15, 17, 19, 21, 27, 33, 39};
inline constexpr std::array<int, 8> kStandardCounts{5, 6, 7, 8, 9, 10, 11, 12};

struct GridPoint {
  int n = 0;
  int l = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// The 96 (n, l) configurations, ordered by l then n.
std::vector<GridPoint> standard_grid();

enum class Nonlinearity { LogCosh, Cube };

struct TrainingConfig {
  int n = 8;
  int l = 17;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double tolerance = 1e-4;
  Nonlinearity nonlinearity = Nonlinearity::LogCosh;
};

/// Throws PreconditionError for configs that cannot be trained, including
/// n > l*l - 1.
void validate(const TrainingConfig& cfg);

struct TrainingReport {
  int iterations = 0;
  bool converged = false;
  // Covariance of the filter responses over the training corpus versus I.
  double max_offdiagonal = 0.0;
  double max_diagonal_deviation = 0.0;
  std::size_t patch_count = 0;
  std::vector<std::string> warnings;
};

struct TrainingResult {
  FilterBank bank;
  TrainingReport report;
};

/// Flattens patches into columns of an (l*l) x m matrix, subtracting each
/// patch's own mean.
Eigen::MatrixXd patch_matrix(const PatchSet& patches);

/// Eigen-decomposition of the sample covariance of DC-free patch vectors.
/// Shared by every filter count trained from one corpus.
class WhiteningBasis {
 public:
  /// Takes columns = samples. Subtracts the sample mean vector and keeps the
  /// centered data for ICA.
  explicit WhiteningBasis(Eigen::MatrixXd samples);

  int dimension() const noexcept { return static_cast<int>(centered_.rows()); }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(centered_.cols()); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }  // descending
  const Eigen::MatrixXd& centered() const noexcept { return centered_; }

  /// n x d matrix projecting onto the top n components with unit variance.
  /// Throws NumericError when fewer than n eigenvalues exceed 1e-12 * max.
  Eigen::MatrixXd whitening(int n) const;

 private:
  Eigen::MatrixXd centered_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;  // columns, matching eigenvalues_
};

struct IcaResult {
  Eigen::MatrixXd unmixing;  // orthogonal n x n
  int iterations = 0;
  bool converged = false;
};

/// Symmetric FastICA on whitened data (rows = components, columns = samples).
IcaResult fast_ica(const Eigen::MatrixXd& whitened, Nonlinearity g, int max_iterations, double tolerance,
                   std::uint64_t seed);

/// Full pipeline on an already prepared basis. Deterministic for fixed cfg.
TrainingResult train_filters(const WhiteningBasis& basis, const TrainingConfig& cfg);

TrainingResult train_filters(const PatchSet& patches, const TrainingConfig& cfg);

/// Trains one bank per filter count from a single corpus, reusing the
/// whitening basis. Seeds are derived from (cfg.seed, n, l).
std::vector<TrainingResult> train_filter_counts(const PatchSet& patches, std::span<const int> counts,
                                                const TrainingConfig& base);

/// Coefficient sum of every filter.
std::vector<double> filter_dc(const FilterBank& bank);

}  // namespace bsif
