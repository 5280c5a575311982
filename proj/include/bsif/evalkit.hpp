#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsif/filter_bank.hpp"
#include "bsif/image.hpp"
#include "bsif/manifest.hpp"
#include "bsif/matcher.hpp"

namespace bsif {

/// Genuine and impostor comparison scores (dissimilarities).
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
  std::string bank_id;
  Strategy strategy = Strategy::HDMean;
};

struct ScoreStats {
  double mean_g = 0, mean_i = 0;
  double var_g = 0, var_i = 0;  // unbiased
};

/// Throws PreconditionError unless both classes have at least two samples.
ScoreStats score_stats(const ScoreSet& s);

/// |mean_g - mean_i| / sqrt((var_g + var_i) / 2). Throws NumericError for a
/// zero pooled variance.
double d_prime(const ScoreSet& s);

struct RocPoint {
  double threshold = 0;
  double far = 0;  // impostor scores <= threshold
  double frr = 0;  // genuine scores > threshold
};

/// Operating points at every distinct score, ascending threshold.
std::vector<RocPoint> roc_points(const ScoreSet& s);

struct EerResult {
  double eer = 0;
  double threshold = 0;
};

/// Equal error rate, interpolated linearly between the two operating points
/// that bracket FAR = FRR. Throws PreconditionError for an empty class.
EerResult eer(const ScoreSet& s);

struct PairLists {
  std::vector<IndexPair> genuine;
  std::vector<IndexPair> impostor;
  std::vector<std::string> warnings;
};

/// Genuine: one pair per (subject, eye, sensor) group with two or more images.
/// Impostor: one per iris, pairing a representative image with an image of a
/// different subject (same sensor when available), never repeating a pair.
PairLists make_pairs(const DatasetManifest& manifest, std::uint64_t seed);

/// Subjects present in both manifests.
std::vector<std::string> shared_subjects(const DatasetManifest& a, const DatasetManifest& b);

struct BoxSummary {
  double median = 0, q1 = 0, q3 = 0, iqr = 0;
  double lower_fence = 0, upper_fence = 0;     // Q1 - 1.5 IQR, Q3 + 1.5 IQR
  double whisker_low = 0, whisker_high = 0;    // most extreme values inside the fences
  std::vector<double> outliers;
};

/// Quartiles by linear interpolation between order statistics.
BoxSummary box_summary(std::vector<double> values);

struct BootstrapResult {
  std::vector<double> d_primes;
  BoxSummary summary;
};

/// Resamples both classes with replacement to their original sizes, `sets`
/// times, and computes d' for each set.
BootstrapResult bootstrap_dprime(const ScoreSet& s, int sets = 30, std::uint64_t seed = 0);

struct MethodComparison {
  double f_statistic = 0;
  double p_value = 1;
  std::size_t permutations = 0;  // label assignments evaluated
  bool exhaustive = false;
};

/// One-way ANOVA F statistic for two groups.
double anova_f(std::span<const double> a, std::span<const double> b);

/// F statistic with a permutation p-value. When the number of distinct label
/// assignments C(N, |a|) is at most `permutations`, all of them are
/// enumerated and p is exact; otherwise p = (hits + 1) / (permutations + 1)
/// over seeded random relabelings.
MethodComparison compare_methods(std::span<const double> a, std::span<const double> b,
                                 std::size_t permutations = 100000, std::uint64_t seed = 0);

struct EvalReport {
  std::string bank_id;
  Strategy strategy = Strategy::HDMean;
  double d_prime = 0;
  double eer = 0;
  double eer_threshold = 0;
  ScoreStats stats;
  std::size_t genuine_count = 0;
  std::size_t impostor_count = 0;
  std::vector<RocPoint> roc;
};

EvalReport evaluate(const ScoreSet& s);

struct NamedBank {
  std::string id;
  FilterBank bank;
};

struct GridCell {
  std::string bank_id;
  int n = 0;
  int l = 0;
  Strategy strategy = Strategy::HDMean;
  bool ok = false;
  std::string error;
  double d_prime = 0;
  double eer = 0;
  double eer_threshold = 0;
};

/// Scores every (bank, strategy) cell on the given pairs and returns the
/// ranked cells. A failing cell is recorded, not thrown.
std::vector<GridCell> grid_search(std::span<const NormalizedIris> images, const PairLists& pairs,
                                  std::span<const NamedBank> banks, std::span<const Strategy> strategies,
                                  const ShiftRange& range);

/// Successful cells first by d' descending, EER ascending, smaller n, smaller
/// l, bank id, strategy order; failures last.
void rank_cells(std::vector<GridCell>& cells);

/// Score lists for one bank and strategy.
ScoreSet collect_scores(std::span<const IrisTemplate> templates, const PairLists& pairs, Strategy strategy,
                        const ShiftRange& range);

nlohmann::ordered_json to_json(const EvalReport& r, bool include_roc = true);
nlohmann::ordered_json to_json(const BoxSummary& b);
nlohmann::ordered_json to_json(const GridCell& c);

}  // namespace bsif
