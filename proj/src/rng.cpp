#include "chfmatch/rng.hpp"

#include <cmath>

namespace chfmatch {

double CounterStream::next_normal() { return norm_ppf(next_uniform()); }

double CounterStream::next_exponential() { return -std::log(next_uniform()); }

double norm_ppf(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("norm_ppf: argument must lie in (0,1)");
  }
  // Acklam's rational approximation (~1e-9 relative error).
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the exact CDF. Skipped far in the tails where
  // exp(x^2/2) would overflow; the rational part is already ample there.
  if (std::abs(x) < 37.0) {
    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
    const double g = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= g / (1.0 + 0.5 * x * g);
  }
  return x;
}

long long poisson_icdf(double u, double mean) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("poisson_icdf: probability must lie in (0,1)");
  }
  if (!(mean >= 0.0)) {
    throw std::invalid_argument("poisson_icdf: mean must be nonnegative");
  }
  if (mean > kPoissonMeanOverflow) {
    throw mean_overflow_error("poisson_icdf: mean exceeds overflow guard");
  }
  if (mean == 0.0) return 0;

  if (mean < 500.0) {
    double p = std::exp(-mean);
    double cdf = p;
    long long k = 0;
    const long long cap =
        static_cast<long long>(mean + 40.0 * std::sqrt(mean) + 25.0);
    while (u > cdf && k < cap) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // Cornish-Fisher expansion for very large means (only reached when the
  // optimizer probes extreme parameters); mean-preserving to O(1).
  const double z = norm_ppf(u);
  const double x = mean + std::sqrt(mean) * z + (z * z - 1.0) / 6.0;
  return x <= 0.0 ? 0 : static_cast<long long>(x + 0.5);
}

}  // namespace chfmatch
