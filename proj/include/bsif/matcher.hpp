#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bsif/encoder.hpp"
#include "bsif/iris_template.hpp"

namespace bsif {

enum class Strategy { HistRaw, HistNormalized, HDMean, HDMin, HDMax };

inline constexpr std::array<Strategy, 5> kAllStrategies{Strategy::HistRaw, Strategy::HistNormalized, Strategy::HDMean,
                                                        Strategy::HDMin, Strategy::HDMax};

/// CLI names: hist-raw, hist-norm, hd-mean, hd-min, hd-max.
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);
inline bool is_hamming(Strategy s) { return s == Strategy::HDMean || s == Strategy::HDMin || s == Strategy::HDMax; }

/// Probe alignments searched: every integer column shift in
/// [-max_shift, +max_shift]. 16 columns of 512 is 11.25 degrees.
struct ShiftRange {
  int max_shift = 16;
};
void validate(const ShiftRange& range);

/// Dissimilarity score; smaller is more similar.
struct ComparisonScore {
  double value = 0.0;
  Strategy strategy = Strategy::HDMean;
  std::optional<int> best_shift;  // Hamming strategies only
  std::uint64_t valid_bits = 0;   // mask overlap at best_shift (Hamming) or histogram mass (chi^2)
};

/// 1/2 sum (a_i - b_i)^2 / (a_i + b_i); empty bins contribute nothing.
ComparisonScore chi2_raw(const BsifHistogram& t, const BsifHistogram& p);
/// chi^2 of the normalized histograms, in [0, 1].
ComparisonScore chi2_normalized(const BsifHistogram& t, const BsifHistogram& p);

/// Fractional Hamming distances at one alignment (template column x against
/// probe column x + shift). `valid` is false when the masks do not overlap.
struct ShiftDistances {
  int shift = 0;
  std::uint64_t overlap = 0;
  bool valid = false;
  std::vector<double> per_filter;
};

ShiftDistances hd_per_filter(const IrisTemplate& t, const IrisTemplate& p, int shift);

/// min over valid shifts of the mean/min/max of the per-filter distances.
/// Ties prefer the smaller |shift|, then the negative shift. Throws
/// NumericError when no shift has mask overlap.
ComparisonScore score_hd(const IrisTemplate& t, const IrisTemplate& p, Strategy strategy, const ShiftRange& range);

/// Any strategy; histogram strategies compute the histograms internally.
ComparisonScore score(const IrisTemplate& t, const IrisTemplate& p, Strategy strategy, const ShiftRange& range = {});
/// Histogram strategies only; a Hamming strategy throws PreconditionError.
ComparisonScore score(const BsifHistogram& t, const BsifHistogram& p, Strategy strategy);

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Scores every pair; parallel over pairs. A failing pair yields NaN.
std::vector<double> score_pairs(std::span<const IrisTemplate> templates, std::span<const BsifHistogram> histograms,
                                std::span<const IndexPair> pairs, Strategy strategy, const ShiftRange& range);

/// Serial version of score_pairs() on the reference kernels.
std::vector<double> score_pairs_reference(std::span<const IrisTemplate> templates,
                                          std::span<const BsifHistogram> histograms,
                                          std::span<const IndexPair> pairs, Strategy strategy,
                                          const ShiftRange& range);

}  // namespace bsif
