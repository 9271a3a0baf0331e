#include "chfmatch/models.hpp"

#include <algorithm>
#include <cmath>

namespace chfmatch {

void ParameterVector::validate() const {
  if (values.size() != lower.size() || values.size() != upper.size()) {
    throw std::invalid_argument("ParameterVector: mismatched box dimensions");
  }
  for (int i = 0; i < size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("ParameterVector: lower must be < upper");
    }
    if (!(lower[i] <= values[i] && values[i] <= upper[i])) {
      throw std::invalid_argument("ParameterVector: value outside box");
    }
  }
}

int parameter_count(ModelKind kind) {
  switch (kind) {
    case ModelKind::GaussianAr1:
    case ModelKind::Arfima0d0:
      return 2;
    case ModelKind::PoissonAr1:
      return 3;
  }
  throw std::logic_error("parameter_count: unknown model kind");
}

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::GaussianAr1:
      return "ar1";
    case ModelKind::Arfima0d0:
      return "arfima";
    case ModelKind::PoissonAr1:
      return "poisson_ar";
  }
  throw std::logic_error("model_name: unknown model kind");
}

std::vector<std::string> parameter_names(ModelKind kind) {
  switch (kind) {
    case ModelKind::GaussianAr1:
      return {"phi", "sigma"};
    case ModelKind::Arfima0d0:
      return {"d", "sigma"};
    case ModelKind::PoissonAr1:
      return {"beta", "phi", "sigma"};
  }
  throw std::logic_error("parameter_names: unknown model kind");
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "ar1" || name == "gaussian_ar1") return ModelKind::GaussianAr1;
  if (name == "arfima") return ModelKind::Arfima0d0;
  if (name == "poisson_ar" || name == "poisson-ar") return ModelKind::PoissonAr1;
  throw std::invalid_argument("unknown model: " + name);
}

Innovation parse_innovation(const std::string& name) {
  if (name == "gaussian") return Innovation::Gaussian;
  if (name == "laplace") return Innovation::Laplace;
  if (name == "student_t6" || name == "t6") return Innovation::StudentT6;
  throw std::invalid_argument("unknown innovation: " + name);
}

ParameterVector default_box(ModelKind kind, const Vector& values) {
  ParameterVector pv;
  pv.values = values;
  switch (kind) {
    case ModelKind::GaussianAr1:
      pv.lower = Vector{{-0.99, 1e-3}};
      pv.upper = Vector{{0.99, 10.0}};
      break;
    case ModelKind::Arfima0d0:
      pv.lower = Vector{{-0.495, 1e-3}};
      pv.upper = Vector{{0.495, 10.0}};
      break;
    case ModelKind::PoissonAr1:
      pv.lower = Vector{{-5.0, -0.99, 1e-3}};
      pv.upper = Vector{{5.0, 0.99, 5.0}};
      break;
  }
  return pv;
}

void validate_theta(const ModelFamily& model, const Vector& theta) {
  if (theta.size() != parameter_count(model.kind)) {
    throw std::invalid_argument("theta has wrong length for model family");
  }
  switch (model.kind) {
    case ModelKind::GaussianAr1:
      if (!(std::abs(theta[0]) < 1.0)) throw std::domain_error("ar1: |phi| must be < 1");
      if (!(theta[1] > 0.0)) throw std::domain_error("ar1: sigma must be > 0");
      break;
    case ModelKind::Arfima0d0:
      if (!(theta[0] > -0.5 && theta[0] < 0.5)) {
        throw std::domain_error("arfima: d must lie in (-0.5, 0.5)");
      }
      if (!(theta[1] > 0.0)) throw std::domain_error("arfima: sigma must be > 0");
      break;
    case ModelKind::PoissonAr1:
      if (!(std::abs(theta[1]) < 1.0)) {
        throw std::domain_error("poisson_ar: |phi| must be < 1");
      }
      if (!(theta[2] > 0.0)) throw std::domain_error("poisson_ar: sigma must be > 0");
      break;
  }
}

BlockSet make_blocks(const Vector& series, int p) {
  const long T = series.size();
  if (p < 1) throw std::invalid_argument("make_blocks: p must be >= 1");
  if (T < p) throw std::invalid_argument("make_blocks: series shorter than p");
  const long n = T - p + 1;
  BlockSet blocks;
  blocks.kind = BlockKind::Observed;
  blocks.data.resize(n, p);
  for (long j = 0; j < n; ++j) {
    blocks.data.row(j) = series.segment(j, p).transpose();
  }
  return blocks;
}

BlockMoments ar1_covariance(double phi, double sigma, int p) {
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("ar1_covariance: |phi| must be < 1");
  if (!(sigma > 0.0)) throw std::domain_error("ar1_covariance: sigma must be > 0");
  BlockMoments m;
  m.mean = Vector::Zero(p);
  m.cov.resize(p, p);
  const double g0 = sigma * sigma / (1.0 - phi * phi);
  std::vector<double> gamma(p);
  gamma[0] = g0;
  for (int h = 1; h < p; ++h) gamma[h] = gamma[h - 1] * phi;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m.cov(i, j) = gamma[std::abs(i - j)];
  }
  return m;
}

Vector arfima_autocovariance(double d, double sigma, int count) {
  if (!(d > -0.5 && d < 0.5)) {
    throw std::domain_error("arfima_autocovariance: d must lie in (-0.5, 0.5)");
  }
  if (!(sigma > 0.0)) throw std::domain_error("arfima_autocovariance: sigma must be > 0");
  Vector gamma(count);
  gamma[0] = sigma * sigma *
             std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
  for (int h = 1; h < count; ++h) {
    gamma[h] = gamma[h - 1] * (h - 1.0 + d) / (h - d);
  }
  return gamma;
}

BlockMoments arfima_covariance(double d, double sigma, int p) {
  const Vector gamma = arfima_autocovariance(d, sigma, p);
  BlockMoments m;
  m.mean = Vector::Zero(p);
  m.cov.resize(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m.cov(i, j) = gamma[std::abs(i - j)];
  }
  return m;
}

BlockMoments poisson_ar_moments(double beta, double phi, double sigma, int p) {
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("poisson_ar_moments: |phi| must be < 1");
  if (!(sigma > 0.0)) throw std::domain_error("poisson_ar_moments: sigma must be > 0");
  const double g0 = sigma * sigma / (1.0 - phi * phi);
  const double mu = std::exp(beta + 0.5 * g0);
  BlockMoments m;
  m.mean = Vector::Constant(p, mu);
  m.cov.resize(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i == j) {
        m.cov(i, j) = mu + mu * mu * std::expm1(g0);
      } else {
        const double gh = g0 * std::pow(phi, std::abs(i - j));
        m.cov(i, j) = mu * mu * std::expm1(gh);
      }
    }
  }
  return m;
}

double index_of_dispersion(double beta, double phi, double sigma) {
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("index_of_dispersion: |phi| must be < 1");
  if (!(sigma > 0.0)) throw std::domain_error("index_of_dispersion: sigma must be > 0");
  const double g0 = sigma * sigma / (1.0 - phi * phi);
  return std::exp(beta + 0.5 * g0) * std::expm1(g0);
}

BlockMoments model_moments(const ModelFamily& model, const Vector& theta, int p) {
  validate_theta(model, theta);
  switch (model.kind) {
    case ModelKind::GaussianAr1:
      return ar1_covariance(theta[0], theta[1], p);
    case ModelKind::Arfima0d0:
      return arfima_covariance(theta[0], theta[1], p);
    case ModelKind::PoissonAr1:
      return poisson_ar_moments(theta[0], theta[1], theta[2], p);
  }
  throw std::logic_error("model_moments: unknown model kind");
}

GaussianBlockSampler::GaussianBlockSampler(const BlockMoments& moments)
    : mean_(moments.mean) {
  Eigen::LLT<Matrix> llt(moments.cov);
  if (llt.info() != Eigen::Success) {
    throw non_pd_error("GaussianBlockSampler: covariance is not positive definite");
  }
  lower_ = llt.matrixL();
}

Vector GaussianBlockSampler::from_normals(const Eigen::Ref<const Vector>& z) const {
  return mean_ + lower_ * z;
}

double standardized_innovation(Innovation innovation, CounterStream& stream) {
  switch (innovation) {
    case Innovation::Gaussian:
      return stream.next_normal();
    case Innovation::Laplace: {
      // Laplace(0, 1/sqrt(2)) has unit variance.
      const double u = stream.next_uniform();
      const double b = 1.0 / std::sqrt(2.0);
      return u < 0.5 ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
    }
    case Innovation::StudentT6: {
      // t_6 scaled by sqrt((6-2)/6) for unit variance; chi2_6 = -2 log(u1 u2 u3).
      const double z = stream.next_normal();
      const double chi2 = 2.0 * (stream.next_exponential() +
                                 stream.next_exponential() +
                                 stream.next_exponential());
      return z / std::sqrt(chi2 / 6.0) * std::sqrt(4.0 / 6.0);
    }
  }
  throw std::logic_error("standardized_innovation: unknown innovation");
}

Vector gaussian_block_sample(const BlockMoments& moments, Innovation innovation,
                             CounterStream& stream) {
  GaussianBlockSampler sampler(moments);
  Vector z(moments.p());
  for (int i = 0; i < z.size(); ++i) z[i] = standardized_innovation(innovation, stream);
  return sampler.from_normals(z);
}

Vector ar1_block_from_normals(double phi, double sigma,
                              const Eigen::Ref<const Vector>& z) {
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("ar1 block: |phi| must be < 1");
  if (!(sigma > 0.0)) throw std::domain_error("ar1 block: sigma must be > 0");
  const int p = static_cast<int>(z.size());
  Vector x(p);
  x[0] = sigma / std::sqrt(1.0 - phi * phi) * z[0];
  for (int j = 1; j < p; ++j) x[j] = phi * x[j - 1] + sigma * z[j];
  return x;
}

Vector ar1_block_sample(double phi, double sigma, int p, CounterStream& stream) {
  Vector z(p);
  for (int i = 0; i < p; ++i) z[i] = stream.next_normal();
  return ar1_block_from_normals(phi, sigma, z);
}

Vector poisson_ar_block_from_variates(double beta, double phi, double sigma,
                                      const Eigen::Ref<const Vector>& z,
                                      const Eigen::Ref<const Vector>& u) {
  if (z.size() != u.size()) {
    throw std::invalid_argument("poisson_ar block: variate lengths differ");
  }
  const Vector alpha = ar1_block_from_normals(phi, sigma, z);
  const int p = static_cast<int>(z.size());
  const double log_guard = std::log(kPoissonMeanOverflow);
  Vector x(p);
  for (int j = 0; j < p; ++j) {
    const double log_mean = beta + alpha[j];
    if (log_mean > log_guard) {
      throw mean_overflow_error("poisson_ar block: mean exceeds overflow guard");
    }
    x[j] = static_cast<double>(poisson_icdf(u[j], std::exp(log_mean)));
  }
  return x;
}

Vector poisson_ar_block_sample(double beta, double phi, double sigma, int p,
                               CounterStream& stream) {
  Vector z(p), u(p);
  for (int i = 0; i < p; ++i) z[i] = stream.next_normal();
  for (int i = 0; i < p; ++i) u[i] = stream.next_uniform();
  return poisson_ar_block_from_variates(beta, phi, sigma, z, u);
}

Vector simulate_ar1_path(double phi, double sigma, int length,
                         CounterStream& stream) {
  Vector z(length);
  for (int i = 0; i < length; ++i) z[i] = stream.next_normal();
  return ar1_block_from_normals(phi, sigma, z);
}

namespace {

// Exact stationary Gaussian path from autocovariances via Durbin-Levinson.
Vector durbin_levinson_path(const Vector& gamma, const Vector& z) {
  const int n = static_cast<int>(z.size());
  Vector x(n);
  x[0] = std::sqrt(gamma[0]) * z[0];
  if (n == 1) return x;
  std::vector<double> phi(n, 0.0), phi_prev(n, 0.0);
  double v = gamma[0];
  for (int t = 1; t < n; ++t) {
    double acc = gamma[t];
    for (int j = 1; j < t; ++j) acc -= phi_prev[j] * gamma[t - j];
    const double refl = acc / v;
    phi[t] = refl;
    for (int j = 1; j < t; ++j) phi[j] = phi_prev[j] - refl * phi_prev[t - j];
    v *= (1.0 - refl * refl);
    double pred = 0.0;
    for (int j = 1; j <= t; ++j) pred += phi[j] * x[t - j];
    x[t] = pred + std::sqrt(std::max(v, 0.0)) * z[t];
    std::copy(phi.begin(), phi.begin() + t + 1, phi_prev.begin());
  }
  return x;
}

}  // namespace

Vector simulate_arfima_path(double d, double sigma, Innovation innovation,
                            int length, CounterStream& stream) {
  if (innovation == Innovation::Gaussian) {
    const Vector gamma = arfima_autocovariance(d, sigma, length);
    Vector z(length);
    for (int i = 0; i < length; ++i) z[i] = stream.next_normal();
    return durbin_levinson_path(gamma, z);
  }
  // Truncated MA(inf): psi_0 = 1, psi_k = psi_{k-1} (k-1+d)/k, with 1000
  // pre-sample innovations.
  if (!(d > -0.5 && d < 0.5)) {
    throw std::domain_error("simulate_arfima_path: d must lie in (-0.5, 0.5)");
  }
  constexpr int kTruncation = 1000;
  std::vector<double> psi(kTruncation + 1);
  psi[0] = 1.0;
  for (int k = 1; k <= kTruncation; ++k) {
    psi[k] = psi[k - 1] * (k - 1.0 + d) / static_cast<double>(k);
  }
  std::vector<double> eps(length + kTruncation);
  for (auto& e : eps) e = standardized_innovation(innovation, stream);
  Vector x(length);
  for (int t = 0; t < length; ++t) {
    double acc = 0.0;
    const double* e = eps.data() + t;  // eps[t + kTruncation - k] for k = 0..K
    for (int k = 0; k <= kTruncation; ++k) acc += psi[k] * e[kTruncation - k];
    x[t] = sigma * acc;
  }
  return x;
}

Vector simulate_poisson_ar_path(double beta, double phi, double sigma,
                                int length, CounterStream& stream) {
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("poisson_ar path: |phi| must be < 1");
  if (!(sigma > 0.0)) throw std::domain_error("poisson_ar path: sigma must be > 0");
  const double log_guard = std::log(kPoissonMeanOverflow);
  Vector x(length);
  double alpha = sigma / std::sqrt(1.0 - phi * phi) * stream.next_normal();
  for (int t = 0; t < length; ++t) {
    if (t > 0) alpha = phi * alpha + sigma * stream.next_normal();
    const double log_mean = beta + alpha;
    if (log_mean > log_guard) {
      throw mean_overflow_error("poisson_ar path: mean exceeds overflow guard");
    }
    x[t] = static_cast<double>(poisson_icdf(stream.next_uniform(), std::exp(log_mean)));
  }
  return x;
}

Vector simulate_path(const ModelFamily& model, const Vector& theta, int length,
                     CounterStream& stream) {
  validate_theta(model, theta);
  if (model.innovation != Innovation::Gaussian &&
      model.kind != ModelKind::Arfima0d0) {
    throw std::invalid_argument(
        "non-gaussian innovations are only defined for arfima data paths");
  }
  switch (model.kind) {
    case ModelKind::GaussianAr1:
      return simulate_ar1_path(theta[0], theta[1], length, stream);
    case ModelKind::Arfima0d0:
      return simulate_arfima_path(theta[0], theta[1], model.innovation, length, stream);
    case ModelKind::PoissonAr1:
      return simulate_poisson_ar_path(theta[0], theta[1], theta[2], length, stream);
  }
  throw std::logic_error("simulate_path: unknown model kind");
}

}  // namespace chfmatch
