#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bsif/bitplane.hpp"
#include "bsif/filter_bank.hpp"

namespace bsif {

using Fingerprint = std::array<std::uint8_t, 32>;

/// SHA-256 of the bank's canonical BSF1 serialization.
Fingerprint fingerprint(const FilterBank& bank);

/// n binary code planes plus the validity mask they share.
struct IrisTemplate {
  std::vector<BitPlane> planes;  // planes[0] = most significant bit
  BitPlane mask;
  Fingerprint bank_fingerprint{};

  int count() const noexcept { return static_cast<int>(planes.size()); }
  int width() const noexcept { return mask.width(); }
  int height() const noexcept { return mask.height(); }

  friend bool operator==(const IrisTemplate&, const IrisTemplate&) = default;
};

/// Throws PreconditionError when there are no planes or shapes disagree.
void check_template(const IrisTemplate& t);

inline bool produced_by(const IrisTemplate& t, const FilterBank& bank) {
  return t.bank_fingerprint == fingerprint(bank);
}

/// Circularly shifts every plane and the mask by k columns.
IrisTemplate shift_columns(const IrisTemplate& t, int k);

}  // namespace bsif
