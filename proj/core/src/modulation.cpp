#include "mcvd/modulation.hpp"

#include <stdexcept>

namespace mcvd {

void QcskScheme::validate() const {
  if (base_concentration < 0)
    throw std::domain_error("base_concentration must be >= 0");
  if (levels != 2 && levels != 4)
    throw std::domain_error("levels must be 2 or 4");
}

void Thresholds::validate(int levels) const {
  if (levels == 2) {
    if (!(tau1 > 0.0)) throw std::domain_error("tau1 must be > 0");
    return;
  }
  if (!(0.0 < tau1 && tau1 < tau2 && tau2 < tau3))
    throw std::domain_error("thresholds must satisfy 0 < tau1 < tau2 < tau3");
}

long emit_count(const QcskScheme& scheme, int symbol) {
  scheme.validate();
  if (symbol < 0 || symbol >= scheme.levels)
    throw std::domain_error("symbol out of range for scheme");
  return static_cast<long>(symbol) * scheme.base_concentration;
}

int detect(double observation, const Thresholds& thresholds, int levels) {
  thresholds.validate(levels);
  if (observation < thresholds.tau1) return 0;
  if (levels == 2) return 1;
  if (observation < thresholds.tau2) return 1;
  if (observation < thresholds.tau3) return 2;
  return 3;
}

}  // namespace mcvd
