#pragma once

namespace mcvd {

enum class MoleculeType { TypeI, TypeII };

/// CSK symbol mapping: symbol s emits s * base_concentration molecules.
struct QcskScheme {
  long base_concentration = 150;  // N
  int levels = 4;                 // 2 = BCSK, 4 = QCSK
  MoleculeType molecule_type = MoleculeType::TypeI;

  void validate() const;
};

/// Ordered detection boundaries. BCSK uses tau1 only.
struct Thresholds {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double tau3 = 0.0;

  void validate(int levels) const;
};

long emit_count(const QcskScheme& scheme, int symbol);

/// Threshold detection; a boundary value decodes to the higher symbol.
int detect(double observation, const Thresholds& thresholds, int levels);

}  // namespace mcvd
