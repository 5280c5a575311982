#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bsif/filter_bank.hpp"
#include "bsif/image.hpp"
#include "bsif/iris_template.hpp"

namespace testutil {

inline bsif::NormalizedIris random_iris(std::uint64_t seed, int w = bsif::kIrisWidth, int h = bsif::kIrisHeight) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  bsif::NormalizedIris iris;
  iris.id = "rand" + std::to_string(seed);
  iris.pixels = bsif::GrayImage(w, h);
  for (auto& v : iris.pixels.values()) v = static_cast<std::uint8_t>(px(rng));
  iris.mask = bsif::BinaryGrid(w, h, 1);
  return iris;
}

/// Random filters with the coefficient sum removed.
inline bsif::FilterBank random_dc_free_bank(int n, int l, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> c(static_cast<std::size_t>(n) * l * l);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int k = 0; k < l * l; ++k) s += (c[i * l * l + k] = g(rng));
    for (int k = 0; k < l * l; ++k) c[i * l * l + k] -= s / (l * l);
  }
  return bsif::FilterBank(n, l, std::move(c), "random");
}

inline bsif::BitPlane random_plane(std::mt19937_64& rng, int w, int h, double p = 0.5) {
  std::bernoulli_distribution b(p);
  bsif::BitPlane plane(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) plane.set(x, y, b(rng));
  return plane;
}

inline bsif::IrisTemplate random_template(std::mt19937_64& rng, int n, int w, int h, double mask_p = 0.8) {
  bsif::IrisTemplate t;
  for (int i = 0; i < n; ++i) t.planes.push_back(random_plane(rng, w, h));
  t.mask = random_plane(rng, w, h, mask_p);
  return t;
}

}  // namespace testutil
