#include "chfmatch/weights.hpp"

#include <cmath>

namespace chfmatch {

const char* weight_family_name(WeightFamily family) {
  switch (family) {
    case WeightFamily::Laplace:
      return "laplace";
    case WeightFamily::Cauchy:
      return "cauchy";
    case WeightFamily::Gaussian:
      return "gaussian";
  }
  throw std::logic_error("weight_family_name: unknown family");
}

WeightFamily parse_weight_family(const std::string& name) {
  if (name == "laplace") return WeightFamily::Laplace;
  if (name == "cauchy") return WeightFamily::Cauchy;
  if (name == "gaussian") return WeightFamily::Gaussian;
  throw std::invalid_argument("unknown weight family: " + name);
}

double weight_fourier_sqnorm(WeightFamily family, double squared_norm) {
  switch (family) {
    case WeightFamily::Laplace:
      return 1.0 / (1.0 + squared_norm / (2.0 * M_PI * M_PI));
    case WeightFamily::Cauchy:
      return std::exp(-std::sqrt(squared_norm));
    case WeightFamily::Gaussian:
      return std::exp(-0.5 * squared_norm);
  }
  throw std::logic_error("weight_fourier_sqnorm: unknown family");
}

double weight_fourier(const WeightSpec& spec, const Eigen::Ref<const Vector>& x) {
  if (x.size() != spec.dimension) {
    throw std::invalid_argument("weight_fourier: dimension mismatch");
  }
  return weight_fourier_sqnorm(spec.family, x.squaredNorm());
}

BlockMatrix weight_sample(const WeightSpec& spec, long count, CounterStream& stream) {
  if (count < 1) throw std::invalid_argument("weight_sample: count must be >= 1");
  const int p = spec.dimension;
  BlockMatrix out(count, p);
  switch (spec.family) {
    case WeightFamily::Gaussian:
      for (long i = 0; i < count; ++i) {
        for (int j = 0; j < p; ++j) out(i, j) = stream.next_normal();
      }
      break;
    case WeightFamily::Cauchy:
      for (long i = 0; i < count; ++i) {
        for (int j = 0; j < p; ++j) out(i, j) = stream.next_normal();
        const double denom = std::abs(stream.next_normal());
        out.row(i) /= denom;
      }
      break;
    case WeightFamily::Laplace:
      for (long i = 0; i < count; ++i) {
        const double scale = std::sqrt(stream.next_exponential()) / M_PI;
        for (int j = 0; j < p; ++j) out(i, j) = scale * stream.next_normal();
      }
      break;
  }
  return out;
}

}  // namespace chfmatch
