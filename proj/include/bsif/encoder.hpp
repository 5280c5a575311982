#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsif/filter_bank.hpp"
#include "bsif/image.hpp"
#include "bsif/iris_template.hpp"

namespace bsif {

/// Occurrence counts of the n-bit BSIF code values over valid pixels.
struct BsifHistogram {
  int n = 0;
  std::vector<std::uint64_t> bins;  // 2^n entries
  std::uint64_t total = 0;

  friend bool operator==(const BsifHistogram&, const BsifHistogram&) = default;
};

/// Responses whose magnitude is within this fraction of 255 * sum|f| count
/// as zero. Keeps the binarization of flat regions stable for DC-free banks,
/// where exact cancellation leaves only rounding noise.
inline constexpr double kResponseFloor = 1e-9;

/// Filters the image with every kernel (cross-correlation, circular along the
/// angle), sets bit = response > floor, and trims side/2 rows at the top and
/// bottom from the mask. Throws PreconditionError when the image mask is empty
/// or the filter leaves no valid rows.
IrisTemplate encode(const NormalizedIris& image, const FilterBank& bank);

/// Same output as encode(), computed with the serial reference kernels.
IrisTemplate encode_reference(const NormalizedIris& image, const FilterBank& bank);

/// Encodes every image; parallel over images.
std::vector<IrisTemplate> encode_batch(std::span<const NormalizedIris> images, const FilterBank& bank);

/// Per-pixel code value sum_i c_i * 2^(n-1-i) (plane 0 most significant).
Grid<std::uint16_t> grey_values(const IrisTemplate& t);

/// Histogram over pixels where the template mask is set. Throws
/// PreconditionError for an empty mask.
BsifHistogram histogram(const IrisTemplate& t);

/// h / sum(h). Throws PreconditionError when the total is zero.
std::vector<double> normalize_histogram(const BsifHistogram& h);

}  // namespace bsif
