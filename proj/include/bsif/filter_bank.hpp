#pragma once

#include <span>
#include <string>
#include <vector>

namespace bsif {

inline constexpr int kMaxFilters = 16;

/// n real-valued l x l kernels. Filter 0 produces the most significant bit of
/// the BSIF code; each kernel is stored row-major.
class FilterBank {
 public:
  FilterBank() = default;
  /// Throws PreconditionError unless 1 <= count <= 16, side odd and >= 3,
  /// coefficient count == count*side*side and every coefficient finite.
  FilterBank(int count, int side, std::vector<double> coefficients, std::string provenance = {});

  int count() const noexcept { return count_; }
  int side() const noexcept { return side_; }
  int radius() const noexcept { return side_ / 2; }
  std::size_t filter_size() const noexcept { return static_cast<std::size_t>(side_) * side_; }

  std::span<const double> filter(int i) const {
    return std::span<const double>(coefficients_).subspan(static_cast<std::size_t>(i) * filter_size(), filter_size());
  }
  std::span<const double> coefficients() const noexcept { return coefficients_; }

  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  /// Coefficients, count and side; provenance is metadata only.
  bool same_filters(const FilterBank& other) const {
    return count_ == other.count_ && side_ == other.side_ && coefficients_ == other.coefficients_;
  }

 private:
  int count_ = 0;
  int side_ = 0;
  std::vector<double> coefficients_;
  std::string provenance_;
};

}  // namespace bsif
