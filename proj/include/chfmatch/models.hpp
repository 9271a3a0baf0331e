#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "chfmatch/rng.hpp"

namespace chfmatch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Blocks live one per row; row-major keeps per-block access contiguous.
using BlockMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct non_pd_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ModelKind { GaussianAr1, Arfima0d0, PoissonAr1 };

// Non-Gaussian innovations apply only to ARFIMA data-path generation (the
// misspecification experiments); estimation always simulates the Gaussian
// working model.
enum class Innovation { Gaussian, Laplace, StudentT6 };

struct ModelFamily {
  ModelKind kind = ModelKind::GaussianAr1;
  Innovation innovation = Innovation::Gaussian;
};

// theta with its box constraints.
struct ParameterVector {
  Vector values;
  Vector lower;
  Vector upper;

  int size() const { return static_cast<int>(values.size()); }
  void validate() const;
};

enum class BlockKind { Observed, Simulated };

struct BlockSet {
  BlockMatrix data;
  BlockKind kind = BlockKind::Observed;

  long count() const { return data.rows(); }
  int p() const { return static_cast<int>(data.cols()); }
};

struct BlockMoments {
  Vector mean;
  Matrix cov;

  int p() const { return static_cast<int>(mean.size()); }
};

int parameter_count(ModelKind kind);
const char* model_name(ModelKind kind);
std::vector<std::string> parameter_names(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
Innovation parse_innovation(const std::string& name);

// Default estimation box for each family, wrapped around the given values.
ParameterVector default_box(ModelKind kind, const Vector& values);

// Throws std::domain_error when theta violates the family's constraints
// (|phi|<1, sigma>0, d in (-0.5,0.5)).
void validate_theta(const ModelFamily& model, const Vector& theta);

// Overlapping length-p windows of a series, one per row.
BlockSet make_blocks(const Vector& series, int p);

BlockMoments ar1_covariance(double phi, double sigma, int p);

// Autocovariances gamma(0..count-1) of ARFIMA(0,d,0):
// gamma(0) = sigma^2 Gamma(1-2d)/Gamma(1-d)^2, gamma(h) = gamma(h-1)(h-1+d)/(h-d).
Vector arfima_autocovariance(double d, double sigma, int count);
BlockMoments arfima_covariance(double d, double sigma, int p);

// Mean/covariance of a Poisson-AR block: with gamma_a(h) = sigma^2 phi^h/(1-phi^2)
// and mu = exp(beta + gamma_a(0)/2),
//   E X_j = mu,  Var X_j = mu + mu^2 (e^{gamma_a(0)} - 1),
//   Cov(X_i, X_j) = mu^2 (e^{gamma_a(|i-j|)} - 1)  for i != j.
// Validated against the Monte Carlo sampler in the test suite.
BlockMoments poisson_ar_moments(double beta, double phi, double sigma, int p);

// Var(e^{beta+alpha_1}) / E(e^{beta+alpha_1}) for the latent AR(1) alpha.
double index_of_dispersion(double beta, double phi, double sigma);

BlockMoments model_moments(const ModelFamily& model, const Vector& theta, int p);

// Factor the covariance once, then map fixed standardized innovations to
// blocks; the map is the smooth part of the CRN contract.
class GaussianBlockSampler {
 public:
  explicit GaussianBlockSampler(const BlockMoments& moments);
  Vector from_normals(const Eigen::Ref<const Vector>& z) const;
  const Matrix& cholesky_lower() const { return lower_; }

 private:
  Vector mean_;
  Matrix lower_;
};

// One standardized (unit-variance) innovation from the stream.
double standardized_innovation(Innovation innovation, CounterStream& stream);

Vector gaussian_block_sample(const BlockMoments& moments, Innovation innovation,
                             CounterStream& stream);

// Stationary start + recursion, driven by p fixed standard normals.
Vector ar1_block_from_normals(double phi, double sigma,
                              const Eigen::Ref<const Vector>& z);
Vector ar1_block_sample(double phi, double sigma, int p, CounterStream& stream);

// Latent Gaussian AR(1) block from z, counts from inverse-CDF on u; a
// deterministic, piecewise-constant function of theta for fixed variates.
Vector poisson_ar_block_from_variates(double beta, double phi, double sigma,
                                      const Eigen::Ref<const Vector>& z,
                                      const Eigen::Ref<const Vector>& u);
Vector poisson_ar_block_sample(double beta, double phi, double sigma, int p,
                               CounterStream& stream);

// Data-path simulators for the experiment harness.
Vector simulate_ar1_path(double phi, double sigma, int length,
                         CounterStream& stream);
// Gaussian innovations: exact via Durbin-Levinson from the Toeplitz
// autocovariance. Laplace/Student-t6: truncated MA(inf) with 1000 pre-sample
// terms (misspecified data generator).
Vector simulate_arfima_path(double d, double sigma, Innovation innovation,
                            int length, CounterStream& stream);
Vector simulate_poisson_ar_path(double beta, double phi, double sigma,
                                int length, CounterStream& stream);
Vector simulate_path(const ModelFamily& model, const Vector& theta, int length,
                     CounterStream& stream);

}  // namespace chfmatch
