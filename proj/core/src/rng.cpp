#include "mcvd/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mcvd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double Rng::gaussian(double mean, double sigma) {
  if (sigma < 0.0) throw std::domain_error("sigma must be >= 0");
  if (sigma == 0.0) return mean;
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  return mean + sigma * z;
}

long Rng::binomial(long n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial p out of [0,1]");
  if (n < 0) throw std::domain_error("binomial n must be >= 0");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  const double u = uniform();
  const double nd = static_cast<double>(n);
  long mode = static_cast<long>((nd + 1.0) * p);
  if (mode > n) mode = n;

  const double log_pm = std::lgamma(nd + 1.0) - std::lgamma(mode + 1.0) -
                        std::lgamma(nd - mode + 1.0) + mode * std::log(p) +
                        (nd - mode) * std::log1p(-p);
  const double pm = std::exp(log_pm);
  const double odds = p / (1.0 - p);

  double acc = pm;
  if (u <= acc) return mode;
  long lo = mode, hi = mode;
  double plo = pm, phi = pm;
  while (lo > 0 || hi < n) {
    if (hi < n) {
      phi *= (nd - hi) / (hi + 1.0) * odds;
      ++hi;
      acc += phi;
      if (u <= acc) return hi;
    }
    if (lo > 0) {
      plo *= static_cast<double>(lo) / (nd - lo + 1.0) / odds;
      --lo;
      acc += plo;
      if (u <= acc) return lo;
    }
  }
  return mode;  // u landed in accumulated rounding slack
}

}  // namespace mcvd
