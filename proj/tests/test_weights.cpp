#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "chfmatch/weights.hpp"
#include "test_util.hpp"

using namespace chfmatch;

namespace {

// empirical chf of sampled rows at t, for the sampler/transform consistency check
std::complex<double> empirical_chf_of(const BlockMatrix& rows, const Vector& t) {
  double re = 0, im = 0;
  for (long j = 0; j < rows.rows(); ++j) {
    const double s = rows.row(j).transpose().dot(t);
    re += std::cos(s);
    im += std::sin(s);
  }
  const double n = static_cast<double>(rows.rows());
  return {re / n, im / n};
}

}  // namespace

TEST_CASE("weight_fourier closed forms") {
  for (WeightFamily family :
       {WeightFamily::Laplace, WeightFamily::Cauchy, WeightFamily::Gaussian}) {
    WeightSpec spec{family, 3};
    CHECK(weight_fourier(spec, Vector::Zero(3)) == 1.0);
  }
  Vector x(3);
  x << std::sqrt(2.0 * M_PI * M_PI), 0.0, 0.0;
  CHECK(weight_fourier(WeightSpec{WeightFamily::Laplace, 3}, x) ==
        doctest::Approx(0.5).epsilon(1e-12));
  Vector y(2);
  y << 1.0, 1.0;
  CHECK(weight_fourier(WeightSpec{WeightFamily::Gaussian, 2}, y) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS(weight_fourier(WeightSpec{WeightFamily::Gaussian, 3}, y));
}

TEST_CASE("weight_fourier symmetry, bounds, and decay along rays") {
  auto g = testutil::rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (WeightFamily family :
       {WeightFamily::Laplace, WeightFamily::Cauchy, WeightFamily::Gaussian}) {
    WeightSpec spec{family, 3};
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(3);
      for (int i = 0; i < 3; ++i) x[i] = 2.0 * normal(g);
      const double v = weight_fourier(spec, x);
      CHECK(weight_fourier(spec, Vector(-x)) == v);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      CHECK(weight_fourier(spec, Vector(1.5 * x)) < v);
    }
  }
}

TEST_CASE("sampler chf matches weight_fourier (construction oracle)") {
  SeedPlan plan{2718};
  auto g = testutil::rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  const long n = 1000000;
  int stream_id = 0;
  for (WeightFamily family :
       {WeightFamily::Laplace, WeightFamily::Cauchy, WeightFamily::Gaussian}) {
    WeightSpec spec{family, 3};
    CounterStream s = plan.stream(StreamDomain::TGrid, stream_id++, 0);
    const BlockMatrix draws = weight_sample(spec, n, s);
    const int checks = family == WeightFamily::Laplace ? 20 : 8;
    for (int c = 0; c < checks; ++c) {
      Vector t(3);
      for (int i = 0; i < 3; ++i) t[i] = 1.5 * normal(g);
      const auto chf = empirical_chf_of(draws, t);
      CHECK(std::abs(chf.real() - weight_fourier(spec, t)) < 0.005);
      CHECK(std::abs(chf.imag()) < 0.005);
    }
  }
}

TEST_CASE("gaussian weight draws have identity covariance") {
  SeedPlan plan{33};
  CounterStream s = plan.stream(StreamDomain::TGrid, 9, 0);
  const BlockMatrix draws = weight_sample(WeightSpec{WeightFamily::Gaussian, 3},
                                          1000000, s);
  const Matrix cov = testutil::sample_cov(Matrix(draws));
  for (int i = 0; i < 3; ++i) {
    CHECK(cov(i, i) == doctest::Approx(1.0).epsilon(0.01));
    for (int j = 0; j < i; ++j) CHECK(std::abs(cov(i, j)) < 0.01);
  }
}

TEST_CASE("weight_sample count handling") {
  SeedPlan plan{1};
  CounterStream s = plan.stream(StreamDomain::TGrid, 0, 0);
  CHECK_THROWS(weight_sample(WeightSpec{WeightFamily::Laplace, 3}, 0, s));
  const BlockMatrix one = weight_sample(WeightSpec{WeightFamily::Laplace, 3}, 1, s);
  CHECK(one.rows() == 1);
  CHECK(one.cols() == 3);
}
