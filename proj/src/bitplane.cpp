#include "bsif/bitplane.hpp"

#include <algorithm>

namespace bsif {

BitPlane::BitPlane(int width, int height) : width_(width), height_(height), words_per_row_((width + 63) / 64) {
  if (width < 0 || height < 0) throw PreconditionError("bit plane dimensions must be non-negative");
  words_.assign(static_cast<std::size_t>(words_per_row_) * static_cast<std::size_t>(height), 0);
}

BitPlane BitPlane::from_grid(const BinaryGrid& grid) {
  BitPlane p(grid.width(), grid.height());
  for (int y = 0; y < grid.height(); ++y) {
    auto src = grid.row(y);
    for (int x = 0; x < grid.width(); ++x)
      if (src[x]) p.set(x, y, true);
  }
  return p;
}

BinaryGrid BitPlane::to_grid() const {
  BinaryGrid g(width_, height_);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) g.at(x, y) = get(x, y) ? 1 : 0;
  return g;
}

void rotate_row(std::span<const std::uint64_t> src, int width, int start, std::span<std::uint64_t> dst) {
  const int nw = (width + 63) / 64;
  if (width == 0) return;
  start = ((start % width) + width) % width;
  if (width % 64 == 0) {
    const int q = start / 64;
    const unsigned r = static_cast<unsigned>(start % 64);
    for (int j = 0; j < nw; ++j) {
      const std::uint64_t lo = src[(q + j) % nw];
      if (r == 0) {
        dst[j] = lo;
      } else {
        const std::uint64_t hi = src[(q + j + 1) % nw];
        dst[j] = (lo >> r) | (hi << (64u - r));
      }
    }
    return;
  }
  // Widths that are not word multiples only occur for small test rasters.
  std::fill(dst.begin(), dst.begin() + nw, 0);
  int from = start;
  for (int x = 0; x < width; ++x) {
    if ((src[from >> 6] >> (from & 63)) & 1u) dst[x >> 6] |= std::uint64_t{1} << (x & 63);
    if (++from == width) from = 0;
  }
}

BitPlane BitPlane::shifted(int k) const {
  BitPlane out(width_, height_);
  if (width_ == 0) return out;
  const int start = ((-k % width_) + width_) % width_;
  for (int y = 0; y < height_; ++y) rotate_row(row(y), width_, start, out.row(y));
  return out;
}

BitPlane BitPlane::operator&(const BitPlane& other) const {
  if (width_ != other.width_ || height_ != other.height_) throw PreconditionError("bit plane shape mismatch");
  BitPlane out(*this);
  for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] &= other.words_[i];
  return out;
}

void check_normalized_iris(const NormalizedIris& iris) {
  if (!iris.pixels.same_shape(iris.mask))
    throw DataError("image and mask dimensions differ for '" + iris.id + "'");
  if (!iris.patch_source && (iris.pixels.width() != kIrisWidth || iris.pixels.height() != kIrisHeight))
    throw DataError("normalized iris '" + iris.id + "' must be 512x64, got " + std::to_string(iris.pixels.width()) +
                    "x" + std::to_string(iris.pixels.height()));
}

}  // namespace bsif
