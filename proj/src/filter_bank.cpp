#include "bsif/filter_bank.hpp"

#include <cmath>

#include "bsif/error.hpp"
#include "bsif/iris_template.hpp"

namespace bsif {

FilterBank::FilterBank(int count, int side, std::vector<double> coefficients, std::string provenance)
    : count_(count), side_(side), coefficients_(std::move(coefficients)), provenance_(std::move(provenance)) {
  if (count < 1 || count > kMaxFilters) throw PreconditionError("filter count must be in [1, 16]");
  if (side < 3 || side % 2 == 0) throw PreconditionError("filter side must be odd and >= 3");
  if (coefficients_.size() != static_cast<std::size_t>(count) * side * side)
    throw PreconditionError("coefficient count does not match n*l*l");
  for (double c : coefficients_)
    if (!std::isfinite(c)) throw PreconditionError("filter coefficients must be finite");
}

void check_template(const IrisTemplate& t) {
  if (t.planes.empty()) throw PreconditionError("template has no code planes");
  if (t.count() > kMaxFilters) throw PreconditionError("template has more than 16 planes");
  for (const auto& p : t.planes)
    if (p.width() != t.mask.width() || p.height() != t.mask.height())
      throw PreconditionError("template plane and mask shapes differ");
}

IrisTemplate shift_columns(const IrisTemplate& t, int k) {
  IrisTemplate out;
  out.bank_fingerprint = t.bank_fingerprint;
  out.planes.reserve(t.planes.size());
  for (const auto& p : t.planes) out.planes.push_back(p.shifted(k));
  out.mask = t.mask.shifted(k);
  return out;
}

}  // namespace bsif
