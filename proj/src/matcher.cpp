#include "bsif/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsif/error.hpp"
#include "bsif/kernels.hpp"

namespace bsif {

namespace {

using ShiftKernel = kernels::ShiftCounts (*)(const IrisTemplate&, const IrisTemplate&, int);

void check_compatible(const IrisTemplate& t, const IrisTemplate& p) {
  check_template(t);
  check_template(p);
  if (t.count() != p.count())
    throw PreconditionError("templates have different filter counts (" + std::to_string(t.count()) + " vs " +
                            std::to_string(p.count()) + ")");
  if (t.width() != p.width() || t.height() != p.height()) throw PreconditionError("template dimensions differ");
}

ShiftDistances distances_with(const IrisTemplate& t, const IrisTemplate& p, int shift, ShiftKernel kernel) {
  const auto counts = kernel(t, p, shift);
  ShiftDistances d;
  d.shift = shift;
  d.overlap = counts.overlap;
  d.valid = counts.overlap > 0;
  d.per_filter.resize(counts.disagreements.size(), 0.0);
  if (d.valid)
    for (std::size_t i = 0; i < counts.disagreements.size(); ++i)
      d.per_filter[i] = static_cast<double>(counts.disagreements[i]) / static_cast<double>(counts.overlap);
  return d;
}

double aggregate(const std::vector<double>& hd, Strategy s) {
  switch (s) {
    case Strategy::HDMin: return *std::min_element(hd.begin(), hd.end());
    case Strategy::HDMax: return *std::max_element(hd.begin(), hd.end());
    default: {
      double sum = 0;
      for (double v : hd) sum += v;
      return sum / static_cast<double>(hd.size());
    }
  }
}

ComparisonScore score_hd_with(const IrisTemplate& t, const IrisTemplate& p, Strategy strategy,
                              const ShiftRange& range, ShiftKernel kernel) {
  if (!is_hamming(strategy)) throw PreconditionError("not a Hamming-distance strategy");
  validate(range);
  check_compatible(t, p);
  ComparisonScore best;
  best.strategy = strategy;
  bool found = false;
  // Visiting 0, -1, +1, -2, +2, ... with a strict comparison realizes the
  // tie-break (smaller |shift| first, negative before positive).
  for (int step = 0; step <= 2 * range.max_shift; ++step) {
    const int shift = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
    const auto d = distances_with(t, p, shift, kernel);
    if (!d.valid) continue;
    const double v = aggregate(d.per_filter, strategy);
    if (!found || v < best.value) {
      best.value = v;
      best.best_shift = shift;
      best.valid_bits = d.overlap;
      found = true;
    }
  }
  if (!found) throw NumericError("no probe alignment has any mask overlap with the template");
  return best;
}

double chi2(std::span<const double> a, std::span<const double> b) {
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double s = a[i] + b[i];
    if (s == 0) continue;
    const double d = a[i] - b[i];
    sum += d * d / s;
  }
  return 0.5 * sum;
}

void check_histograms(const BsifHistogram& t, const BsifHistogram& p) {
  if (t.bins.size() != p.bins.size() || t.n != p.n)
    throw PreconditionError("histograms have different bin counts (" + std::to_string(t.bins.size()) + " vs " +
                            std::to_string(p.bins.size()) + ")");
}

std::vector<double> pair_scores(std::span<const IrisTemplate> templates, std::span<const BsifHistogram> histograms,
                                std::span<const IndexPair> pairs, Strategy strategy, const ShiftRange& range,
                                ShiftKernel kernel, bool parallel) {
  validate(range);
  if (!is_hamming(strategy) && !histograms.empty() && histograms.size() != templates.size())
    throw PreconditionError("histogram list does not match the template list");
  for (const auto& [a, b] : pairs)
    if (a >= templates.size() || b >= templates.size()) throw PreconditionError("pair index out of range");
  std::vector<double> out(pairs.size(), std::numeric_limits<double>::quiet_NaN());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto [a, b] = pairs[static_cast<std::size_t>(k)];
    try {
      if (is_hamming(strategy)) {
        out[k] = score_hd_with(templates[a], templates[b], strategy, range, kernel).value;
      } else if (!histograms.empty()) {
        out[k] = score(histograms[a], histograms[b], strategy).value;
      } else {
        out[k] = score(histogram(templates[a]), histogram(templates[b]), strategy).value;
      }
    } catch (const Error&) {
      // left as NaN; callers record the failure
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::HistRaw: return "hist-raw";
    case Strategy::HistNormalized: return "hist-norm";
    case Strategy::HDMean: return "hd-mean";
    case Strategy::HDMin: return "hd-min";
    case Strategy::HDMax: return "hd-max";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies)
    if (to_string(s) == name) return s;
  throw PreconditionError("unknown strategy '" + std::string(name) + "'");
}

void validate(const ShiftRange& range) {
  if (range.max_shift < 0 || range.max_shift >= 256) throw PreconditionError("max shift must be in [0, 256)");
}

ComparisonScore chi2_raw(const BsifHistogram& t, const BsifHistogram& p) {
  check_histograms(t, p);
  std::vector<double> a(t.bins.begin(), t.bins.end()), b(p.bins.begin(), p.bins.end());
  return {chi2(a, b), Strategy::HistRaw, std::nullopt, std::min(t.total, p.total)};
}

ComparisonScore chi2_normalized(const BsifHistogram& t, const BsifHistogram& p) {
  check_histograms(t, p);
  const auto a = normalize_histogram(t);
  const auto b = normalize_histogram(p);
  return {chi2(a, b), Strategy::HistNormalized, std::nullopt, std::min(t.total, p.total)};
}

ShiftDistances hd_per_filter(const IrisTemplate& t, const IrisTemplate& p, int shift) {
  check_compatible(t, p);
  return distances_with(t, p, shift, &kernels::parallel::shift_counts);
}

ComparisonScore score_hd(const IrisTemplate& t, const IrisTemplate& p, Strategy strategy, const ShiftRange& range) {
  return score_hd_with(t, p, strategy, range, &kernels::parallel::shift_counts);
}

ComparisonScore score(const IrisTemplate& t, const IrisTemplate& p, Strategy strategy, const ShiftRange& range) {
  if (is_hamming(strategy)) return score_hd(t, p, strategy, range);
  check_compatible(t, p);
  return score(histogram(t), histogram(p), strategy);
}

ComparisonScore score(const BsifHistogram& t, const BsifHistogram& p, Strategy strategy) {
  switch (strategy) {
    case Strategy::HistRaw: return chi2_raw(t, p);
    case Strategy::HistNormalized: return chi2_normalized(t, p);
    default: throw PreconditionError("Hamming-distance strategies need templates, not histograms");
  }
}

std::vector<double> score_pairs(std::span<const IrisTemplate> templates, std::span<const BsifHistogram> histograms,
                                std::span<const IndexPair> pairs, Strategy strategy, const ShiftRange& range) {
  return pair_scores(templates, histograms, pairs, strategy, range, &kernels::parallel::shift_counts, true);
}

std::vector<double> score_pairs_reference(std::span<const IrisTemplate> templates,
                                          std::span<const BsifHistogram> histograms,
                                          std::span<const IndexPair> pairs, Strategy strategy,
                                          const ShiftRange& range) {
  return pair_scores(templates, histograms, pairs, strategy, range, &kernels::reference::shift_counts, false);
}

}  // namespace bsif
