#pragma once

#include <string>

#include "chfmatch/models.hpp"

namespace chfmatch {

// Weight densities w on R^p with closed-form Fourier transforms:
//   Laplace:  w~(t) = 1 / (1 + (2 pi^2)^{-1} t't)
//   Cauchy:   w~(t) = exp(-sqrt(t't))
//   Gaussian: w~(t) = exp(-t't / 2)
enum class WeightFamily { Laplace, Cauchy, Gaussian };

struct WeightSpec {
  WeightFamily family = WeightFamily::Gaussian;
  int dimension = 3;
};

const char* weight_family_name(WeightFamily family);
WeightFamily parse_weight_family(const std::string& name);

// Fourier transform evaluated at squared norm |x|^2 (hot path for the
// double-sum objective).
double weight_fourier_sqnorm(WeightFamily family, double squared_norm);
double weight_fourier(const WeightSpec& spec, const Eigen::Ref<const Vector>& x);

// iid draws whose population chf is weight_fourier, one per row.
//   Gaussian: standard normal vector.
//   Cauchy:   z / |z0| (multivariate t with 1 df).
//   Laplace:  sqrt(e) * z' with e ~ Exp(1), z' ~ N(0, (1/pi^2) I).
BlockMatrix weight_sample(const WeightSpec& spec, long count, CounterStream& stream);

}  // namespace chfmatch
