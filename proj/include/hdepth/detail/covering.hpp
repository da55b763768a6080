#pragma once

#include <cmath>
#include <cstddef>

namespace hdepth::detail {

// Log of C2 (sqrt(d)/psi)^{d-1} (d-1)^{3/2} ln(d); d >= 2.
inline double log_covering_count_simplified(std::size_t d, double psi, double c2) {
  const double dd = static_cast<double>(d);
  return std::log(c2) + (dd - 1.0) * (0.5 * std::log(dd) - std::log(psi)) + 1.5 * std::log(dd - 1.0) +
         std::log(std::log(dd));
}

inline double covering_count_simplified(std::size_t d, double psi, double c2) {
  return std::exp(log_covering_count_simplified(d, psi, c2));
}

// C2 cos(psi) / sin^{d-1}(psi) (d-1)^{3/2} ln(1 + (d-1) cos^2 psi).
inline double covering_count_exact_form(std::size_t d, double psi, double c2) {
  const double dd = static_cast<double>(d);
  const double c = std::cos(psi);
  return c2 * c / std::pow(std::sin(psi), dd - 1.0) * std::pow(dd - 1.0, 1.5) * std::log1p((dd - 1.0) * c * c);
}

}  // namespace hdepth::detail
