#include "phaseless/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "phaseless/error.hpp"

namespace phaseless {

namespace {

template <class T>
ErrorReport relative_errors_impl(std::span<const T> approx, std::span<const T> exact) {
  if (approx.size() != exact.size()) throw DomainError("relative_errors: arrays differ in size");
  if (exact.empty()) throw DomainError("relative_errors: empty arrays");

  // Both sums are taken relative to the reference maximum so that scaling the inputs by a
  // common factor does not change the result.
  double ref_max = 0, diff_max = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    ref_max = std::max(ref_max, std::abs(exact[i]));
    diff_max = std::max(diff_max, std::abs(approx[i] - exact[i]));
  }
  if (!(ref_max > 0)) throw DomainError("relative_errors: reference is identically zero");

  double num = 0, den = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double d = std::abs(approx[i] - exact[i]) / ref_max;
    const double e = std::abs(exact[i]) / ref_max;
    num += d * d;
    den += e * e;
  }
  return ErrorReport{std::sqrt(num / den), diff_max / ref_max, exact.size()};
}

}  // namespace

ErrorReport relative_errors(std::span<const Complex> approx, std::span<const Complex> exact) {
  return relative_errors_impl(approx, exact);
}

ErrorReport relative_errors(std::span<const double> approx, std::span<const double> exact) {
  return relative_errors_impl(approx, exact);
}

}  // namespace phaseless
