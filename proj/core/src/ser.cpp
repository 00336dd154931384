#include "mcvd/ser.hpp"

#include <stdexcept>

#include <boost/math/distributions/beta.hpp>

namespace mcvd {

void SerEstimate::merge(const SerEstimate& other) {
  errors += other.errors;
  trials += other.trials;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) confusion[i][j] += other.confusion[i][j];
}

BinomialCi clopper_pearson(long long errors, long long trials, double confidence) {
  if (trials < 0 || errors < 0 || errors > trials)
    throw std::domain_error("invalid binomial counts");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::domain_error("confidence must be in (0,1)");
  if (trials == 0) return {0.0, 1.0};
  const double alpha = 1.0 - confidence;
  BinomialCi ci;
  const double k = static_cast<double>(errors);
  const double n = static_cast<double>(trials);
  if (errors == 0) {
    ci.low = 0.0;
  } else {
    boost::math::beta_distribution<double> lo(k, n - k + 1.0);
    ci.low = boost::math::quantile(lo, alpha / 2.0);
  }
  if (errors == trials) {
    ci.high = 1.0;
  } else {
    boost::math::beta_distribution<double> hi(k + 1.0, n - k);
    ci.high = boost::math::quantile(hi, 1.0 - alpha / 2.0);
  }
  return ci;
}

}  // namespace mcvd
