#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsif/image.hpp"
#include "bsif/iris_template.hpp"

// Hot loops of the pipeline. Every kernel exists twice: a plain serial
// reference and an optimized OpenMP version. The two must agree bit for bit;
// the tests and the benchmark compare them.
namespace bsif::kernels {

/// Number of output rows for a filter of the given side: rows whose window
/// stays inside the image radially.
inline int valid_rows(int height, int side) { return height - 2 * (side / 2); }

/// Coincident bits at one probe alignment.
struct ShiftCounts {
  std::uint64_t overlap = 0;                  // |m_t & m_p(shift)|
  std::vector<std::uint64_t> disagreements;   // |(c_t ^ c_p(shift)) & m_t & m_p(shift)| per plane
};

namespace reference {

/// Cross-correlation (no kernel flip), circular along columns. out holds
/// valid_rows(H, side) x W responses; output row i is image row i + side/2.
/// Per pixel the products are accumulated filter-row by filter-row.
void correlate(const GrayImage& image, std::span<const double> filter, int side, std::span<double> out);

/// Per-bit loops. At `shift`, template column x is compared with probe
/// column (x + shift) mod W.
ShiftCounts shift_counts(const IrisTemplate& t, const IrisTemplate& p, int shift);

}  // namespace reference

namespace parallel {

/// Same contract and summation order as reference::correlate. Rows are
/// distributed over OpenMP threads.
void correlate(const GrayImage& image, std::span<const double> filter, int side, std::span<double> out);

/// Word-level rotate + popcount.
ShiftCounts shift_counts(const IrisTemplate& t, const IrisTemplate& p, int shift);

}  // namespace parallel

}  // namespace bsif::kernels
