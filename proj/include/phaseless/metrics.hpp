#pragma once

// Discrete relative L2 / L-infinity error functionals.

#include <cstddef>
#include <span>

#include "phaseless/core.hpp"

namespace phaseless {

struct ErrorReport {
  double rel_l2 = 0;
  double rel_linf = 0;
  std::size_t count = 0;
};

// rel_l2 = ||approx - exact||_2 / ||exact||_2, rel_linf = max|approx - exact| / max|exact|.
// Throws DomainError on a size mismatch or an identically zero reference.
ErrorReport relative_errors(std::span<const Complex> approx, std::span<const Complex> exact);
ErrorReport relative_errors(std::span<const double> approx, std::span<const double> exact);

}  // namespace phaseless
