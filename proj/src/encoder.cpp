#include "bsif/encoder.hpp"

#include <cmath>
#include <exception>

#include "bsif/error.hpp"
#include "bsif/kernels.hpp"

namespace bsif {

namespace {

using CorrelateFn = void (*)(const GrayImage&, std::span<const double>, int, std::span<double>);

IrisTemplate encode_with(const NormalizedIris& image, const FilterBank& bank, CorrelateFn correlate) {
  check_normalized_iris(image);
  if (count_set(image.mask) == 0) throw PreconditionError("image '" + image.id + "' has an empty mask");
  const int w = image.width(), h = image.height(), r = bank.radius();
  const int rows = kernels::valid_rows(h, bank.side());
  if (rows <= 0)
    throw PreconditionError("filter side " + std::to_string(bank.side()) + " leaves no valid rows in a " +
                            std::to_string(h) + "-row image");

  IrisTemplate t;
  t.bank_fingerprint = fingerprint(bank);
  t.mask = BitPlane(w, h);
  for (int y = r; y < r + rows; ++y)
    for (int x = 0; x < w; ++x)
      if (image.mask.at(x, y)) t.mask.set(x, y, true);

  std::vector<double> response(static_cast<std::size_t>(rows) * w);
  for (int i = 0; i < bank.count(); ++i) {
    const auto f = bank.filter(i);
    double l1 = 0;
    for (double c : f) l1 += std::abs(c);
    const double floor = kResponseFloor * 255.0 * l1;
    correlate(image.pixels, f, bank.side(), response);
    BitPlane plane(w, h);
    for (int row = 0; row < rows; ++row)
      for (int x = 0; x < w; ++x)
        if (response[static_cast<std::size_t>(row) * w + x] > floor) plane.set(x, row + r, true);
    t.planes.push_back(std::move(plane));
  }
  return t;
}

}  // namespace

IrisTemplate encode(const NormalizedIris& image, const FilterBank& bank) {
  return encode_with(image, bank, &kernels::parallel::correlate);
}

IrisTemplate encode_reference(const NormalizedIris& image, const FilterBank& bank) {
  return encode_with(image, bank, &kernels::reference::correlate);
}

std::vector<IrisTemplate> encode_batch(std::span<const NormalizedIris> images, const FilterBank& bank) {
  std::vector<IrisTemplate> out(images.size());
  std::vector<std::exception_ptr> errors(images.size());
  const auto n = static_cast<std::ptrdiff_t>(images.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = encode(images[static_cast<std::size_t>(i)], bank);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Grid<std::uint16_t> grey_values(const IrisTemplate& t) {
  check_template(t);
  Grid<std::uint16_t> g(t.width(), t.height());
  const int n = t.count();
  for (int y = 0; y < t.height(); ++y)
    for (int x = 0; x < t.width(); ++x) {
      std::uint16_t v = 0;
      for (int i = 0; i < n; ++i)
        if (t.planes[i].get(x, y)) v |= static_cast<std::uint16_t>(1u << (n - 1 - i));
      g.at(x, y) = v;
    }
  return g;
}

BsifHistogram histogram(const IrisTemplate& t) {
  const auto values = grey_values(t);
  BsifHistogram h;
  h.n = t.count();
  h.bins.assign(std::size_t{1} << h.n, 0);
  for (int y = 0; y < t.height(); ++y)
    for (int x = 0; x < t.width(); ++x)
      if (t.mask.get(x, y)) {
        ++h.bins[values.at(x, y)];
        ++h.total;
      }
  if (h.total == 0) throw PreconditionError("template mask is empty: no histogram");
  return h;
}

std::vector<double> normalize_histogram(const BsifHistogram& h) {
  if (h.total == 0) throw PreconditionError("cannot normalize a histogram with zero total");
  std::vector<double> out(h.bins.size());
  const double total = static_cast<double>(h.total);
  for (std::size_t i = 0; i < h.bins.size(); ++i) out[i] = static_cast<double>(h.bins[i]) / total;
  return out;
}

}  // namespace bsif
