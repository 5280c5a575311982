#include "bsif/error.hpp"
#include "bsif/kernels.hpp"

namespace bsif::kernels::reference {

void correlate(const GrayImage& image, std::span<const double> filter, int side, std::span<double> out) {
  const int w = image.width(), h = image.height(), r = side / 2;
  const int rows = valid_rows(h, side);
  if (rows <= 0) throw PreconditionError("filter is taller than the image");
  if (out.size() != static_cast<std::size_t>(rows) * w) throw PreconditionError("output buffer has the wrong size");
  for (int i = 0; i < rows; ++i) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int v = 0; v < side; ++v) {
        for (int u = 0; u < side; ++u) {
          const int sx = ((x + u - r) % w + w) % w;
          acc += filter[static_cast<std::size_t>(v) * side + u] * static_cast<double>(image.at(sx, i + v));
        }
      }
      out[static_cast<std::size_t>(i) * w + x] = acc;
    }
  }
}

ShiftCounts shift_counts(const IrisTemplate& t, const IrisTemplate& p, int shift) {
  const int w = t.width(), h = t.height();
  ShiftCounts c;
  c.disagreements.assign(t.planes.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int px = ((x + shift) % w + w) % w;
      if (!t.mask.get(x, y) || !p.mask.get(px, y)) continue;
      ++c.overlap;
      for (std::size_t i = 0; i < t.planes.size(); ++i)
        c.disagreements[i] += t.planes[i].get(x, y) != p.planes[i].get(px, y);
    }
  }
  return c;
}

}  // namespace bsif::kernels::reference
