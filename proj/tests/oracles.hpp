// Test-side numerical oracles, independent of the library implementation.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

// erf by Taylor series in long double; converges fast for |x| <= 2.5.
inline long double erf_series(long double x) {
  const long double x2 = x * x;
  long double term = x;
  long double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-25L * std::fabs(sum)) break;
  }
  return sum * 2.0L / std::sqrt(kPi);
}

// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated by backward recurrence; accurate for x >= 2.5.
inline long double erfc_cf(long double x) {
  long double tail = 0.0L;
  for (int n = 120; n >= 1; --n) tail = (n / 2.0L) / (x + tail);
  return std::exp(-x * x) / std::sqrt(kPi) / (x + tail);
}

inline long double erfc(long double x) {
  if (x < 0.0L) return 2.0L - erfc(-x);
  if (x < 2.5L) return 1.0L - erf_series(x);
  return erfc_cf(x);
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double integrate_rec(const std::function<double(double)>& f, double a, double b,
                            double whole, double tol, int depth) {
  const double c = 0.5 * (a + b);
  const double left = simpson(f, a, c);
  const double right = simpson(f, c, b);
  if (depth <= 0) return left + right;
  if (std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return integrate_rec(f, a, c, left, tol / 2.0, depth - 1) +
         integrate_rec(f, c, b, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
  return integrate_rec(f, a, b, simpson(f, a, b), tol, 40);
}

// Binomial pmf table, recurrence-based.
inline std::vector<double> binomial_pmf(long n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf.back() = 1.0;
    return pmf;
  }
  // start at the mode via logs for numerical safety
  const long mode = static_cast<long>((n + 1) * p);
  const double log_pm = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) -
                        std::lgamma(n - mode + 1.0) + mode * std::log(p) +
                        (n - mode) * std::log1p(-p);
  pmf[static_cast<std::size_t>(mode)] = std::exp(log_pm);
  const double odds = p / (1.0 - p);
  for (long k = mode + 1; k <= n; ++k)
    pmf[static_cast<std::size_t>(k)] =
        pmf[static_cast<std::size_t>(k - 1)] * (double(n - k + 1) / double(k)) * odds;
  for (long k = mode - 1; k >= 0; --k)
    pmf[static_cast<std::size_t>(k)] =
        pmf[static_cast<std::size_t>(k + 1)] * (double(k + 1) / double(n - k)) / odds;
  return pmf;
}

}  // namespace oracles
