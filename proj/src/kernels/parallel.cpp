#include <bit>

#include "bsif/bitplane.hpp"
#include "bsif/error.hpp"
#include "bsif/kernels.hpp"

namespace bsif::kernels::parallel {

void correlate(const GrayImage& image, std::span<const double> filter, int side, std::span<double> out) {
  const int w = image.width(), h = image.height(), r = side / 2;
  const int rows = valid_rows(h, side);
  if (rows <= 0) throw PreconditionError("filter is taller than the image");
  if (out.size() != static_cast<std::size_t>(rows) * w) throw PreconditionError("output buffer has the wrong size");

  // Each image row widened by r columns of circular wrap on both sides.
  const int pw = w + 2 * r;
  std::vector<double> padded(static_cast<std::size_t>(h) * pw);
  for (int y = 0; y < h; ++y) {
    double* dst = padded.data() + static_cast<std::size_t>(y) * pw;
    const auto src = image.row(y);
    for (int x = 0; x < pw; ++x) dst[x] = static_cast<double>(src[((x - r) % w + w) % w]);
  }

#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) {
    double* acc = out.data() + static_cast<std::size_t>(i) * w;
    for (int x = 0; x < w; ++x) acc[x] = 0.0;
    for (int v = 0; v < side; ++v) {
      const double* src = padded.data() + static_cast<std::size_t>(i + v) * pw;
      for (int u = 0; u < side; ++u) {
        const double c = filter[static_cast<std::size_t>(v) * side + u];
        const double* s = src + u;
#pragma omp simd
        for (int x = 0; x < w; ++x) acc[x] += c * s[x];
      }
    }
  }
}

ShiftCounts shift_counts(const IrisTemplate& t, const IrisTemplate& p, int shift) {
  const int w = t.width(), h = t.height();
  const auto words = static_cast<std::size_t>(t.mask.words_per_row());
  const std::size_t n = t.planes.size();
  ShiftCounts c;
  c.disagreements.assign(n, 0);
  std::vector<std::uint64_t> pm(words), pc(words), both(words);
  for (int y = 0; y < h; ++y) {
    rotate_row(p.mask.row(y), w, shift, pm);
    const auto tm = t.mask.row(y);
    for (std::size_t k = 0; k < words; ++k) {
      both[k] = tm[k] & pm[k];
      c.overlap += static_cast<std::uint64_t>(std::popcount(both[k]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      rotate_row(p.planes[i].row(y), w, shift, pc);
      const auto tc = t.planes[i].row(y);
      std::uint64_t d = 0;
      for (std::size_t k = 0; k < words; ++k) d += static_cast<std::uint64_t>(std::popcount((tc[k] ^ pc[k]) & both[k]));
      c.disagreements[i] += d;
    }
  }
  return c;
}

}  // namespace bsif::kernels::parallel
