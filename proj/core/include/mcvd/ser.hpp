#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mcvd {

/// Monte Carlo SER estimate with a per-symbol confusion matrix.
struct SerEstimate {
  long long errors = 0;
  long long trials = 0;
  std::array<std::array<long long, 4>, 4> confusion{};  // [tx][rx]

  double ser() const { return trials == 0 ? 0.0 : double(errors) / double(trials); }

  void record(int tx, int rx) {
    ++trials;
    if (tx != rx) ++errors;
    confusion[tx][rx] += 1;
  }

  /// Commutative merge of block results.
  void merge(const SerEstimate& other);
};

struct BinomialCi {
  double low = 0.0;
  double high = 1.0;
};

/// Clopper-Pearson binomial confidence interval.
BinomialCi clopper_pearson(long long errors, long long trials, double confidence = 0.95);

/// SER estimates indexed by a swept parameter, with confidence metadata.
struct SerCurve {
  struct Point {
    double x = 0.0;
    SerEstimate estimate;
    BinomialCi ci;
  };
  std::string parameter;  // e.g. "snr_db", "concentration", "location_um"
  std::string series;     // label distinguishing overlaid curves
  std::vector<Point> points;

  void add(double x, const SerEstimate& est) {
    points.push_back({x, est, clopper_pearson(est.errors, est.trials)});
  }
};

}  // namespace mcvd
