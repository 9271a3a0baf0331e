#include "chfmatch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace chfmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sqdist(const double* a, const double* b, int p) {
  double s = 0.0;
  for (int i = 0; i < p; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

template <class Kernel>
double self_pair_mean(const BlockMatrix& x, Kernel w) {
  const long n = x.rows();
  const int p = static_cast<int>(x.cols());
  double acc = 0.0;
  const double* base = x.data();
  for (long j = 0; j < n; ++j) {
    const double* rj = base + j * p;
    for (long k = j + 1; k < n; ++k) {
      acc += w(sqdist(rj, base + k * p, p));
    }
  }
  const double nn = static_cast<double>(n);
  return (nn * w(0.0) + 2.0 * acc) / (nn * nn);
}

template <class Kernel>
double cross_pair_mean(const BlockMatrix& a, const BlockMatrix& b, Kernel w) {
  const long na = a.rows(), nb = b.rows();
  const int p = static_cast<int>(a.cols());
  double acc = 0.0;
  const double* abase = a.data();
  const double* bbase = b.data();
  for (long j = 0; j < na; ++j) {
    const double* rj = abase + j * p;
    for (long k = 0; k < nb; ++k) {
      acc += w(sqdist(rj, bbase + k * p, p));
    }
  }
  return acc / (static_cast<double>(na) * static_cast<double>(nb));
}

template <class Fn>
double dispatch_weight(WeightFamily family, Fn&& fn) {
  constexpr double inv_two_pi2 = 1.0 / (2.0 * M_PI * M_PI);
  switch (family) {
    case WeightFamily::Laplace:
      return fn([](double s) { return 1.0 / (1.0 + s * inv_two_pi2); });
    case WeightFamily::Cauchy:
      return fn([](double s) { return std::exp(-std::sqrt(s)); });
    case WeightFamily::Gaussian:
      return fn([](double s) { return std::exp(-0.5 * s); });
  }
  throw std::logic_error("dispatch_weight: unknown family");
}

}  // namespace

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Oracle:
      return "oracle";
    case EstimatorKind::SimulationBased:
      return "simulation";
    case EstimatorKind::ControlVariates:
      return "cv";
  }
  throw std::logic_error("estimator_name: unknown kind");
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "oracle") return EstimatorKind::Oracle;
  if (name == "simulation" || name == "simulation_based") {
    return EstimatorKind::SimulationBased;
  }
  if (name == "cv" || name == "control_variates") {
    return EstimatorKind::ControlVariates;
  }
  throw std::invalid_argument("unknown estimator: " + name);
}

void ObjectiveConfig::validate(EstimatorKind kind) const {
  if (p < 1) throw std::invalid_argument("config: p must be >= 1");
  if (H < 3) throw std::invalid_argument("config: H must be >= 3");
  if (weight.dimension != p) {
    throw std::invalid_argument("config: weight dimension must equal p");
  }
  if (!(variance_floor > 0.0)) {
    throw std::invalid_argument("config: variance_floor must be > 0");
  }
  if (kind == EstimatorKind::ControlVariates) {
    if (!(k > 0.0)) throw std::invalid_argument("config: k must be > 0");
    if (M < 100) throw std::invalid_argument("config: M must be >= 100");
  }
}

Matrix EmpiricalCovariance::toeplitz() const {
  const int p = static_cast<int>(gamma_hat.size());
  Matrix g(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) g(i, j) = gamma_hat[std::abs(i - j)];
  }
  return g;
}

EmpiricalCovariance empirical_covariance(const Vector& series, int p) {
  if (p < 1) throw std::invalid_argument("empirical_covariance: p must be >= 1");
  if (series.size() < 2 * p) {
    throw std::invalid_argument("empirical_covariance: series shorter than 2p");
  }
  const long n = series.size() - p + 1;
  EmpiricalCovariance emp;
  emp.mu_hat = series.head(n).mean();
  emp.gamma_hat = Vector::Zero(p);
  for (int h = 0; h < p; ++h) {
    double acc = 0.0;
    for (long j = 0; j + h < n; ++j) {
      acc += (series[j] - emp.mu_hat) * (series[j + h] - emp.mu_hat);
    }
    emp.gamma_hat[h] = acc / static_cast<double>(n - h);
  }
  return emp;
}

double q_nh_observed_term(const BlockSet& obs, const WeightSpec& weight) {
  if (obs.count() == 0) throw std::invalid_argument("q_nh: empty observed blocks");
  if (obs.p() != weight.dimension) throw std::invalid_argument("q_nh: dimension mismatch");
  return dispatch_weight(weight.family,
                         [&](auto w) { return self_pair_mean(obs.data, w); });
}

double q_nh_with_observed_term(double observed_term, const BlockSet& obs,
                               const BlockSet& sim, const WeightSpec& weight) {
  if (obs.p() != sim.p()) throw std::invalid_argument("q_nh: block dimensions differ");
  if (sim.count() == 0) throw std::invalid_argument("q_nh: empty simulated blocks");
  const double sim_term = dispatch_weight(
      weight.family, [&](auto w) { return self_pair_mean(sim.data, w); });
  const double cross = dispatch_weight(weight.family, [&](auto w) {
    return cross_pair_mean(obs.data, sim.data, w);
  });
  // nonnegative up to rounding when observed_term is the true pair term
  return observed_term + sim_term - 2.0 * cross;
}

double q_nh(const BlockSet& obs, const BlockSet& sim, const WeightSpec& weight) {
  return q_nh_with_observed_term(q_nh_observed_term(obs, weight), obs, sim, weight);
}

OracleGaussianObjective::OracleGaussianObjective(BlockSet obs) : obs_(std::move(obs)) {
  if (obs_.count() == 0) throw std::invalid_argument("oracle objective: empty blocks");
  obs_pair_term_ =
      self_pair_mean(obs_.data, [](double s) { return std::exp(-0.5 * s); });
}

double OracleGaussianObjective::operator()(const Matrix& gamma) const {
  const int p = obs_.p();
  if (gamma.rows() != p || gamma.cols() != p) {
    throw std::invalid_argument("oracle objective: Gamma dimension mismatch");
  }
  const Matrix eye = Matrix::Identity(p, p);
  Eigen::LLT<Matrix> llt_gamma(gamma);
  Eigen::LLT<Matrix> llt_two(2.0 * gamma + eye);
  Eigen::LLT<Matrix> llt_one(gamma + eye);
  if (llt_gamma.info() != Eigen::Success || llt_two.info() != Eigen::Success ||
      llt_one.info() != Eigen::Success) {
    throw non_pd_error("oracle objective: Gamma is not positive definite");
  }
  const Matrix l_two = llt_two.matrixL();
  const Matrix l_one = llt_one.matrixL();
  double inv_sqrt_det_two = 1.0, inv_sqrt_det_one = 1.0;
  for (int i = 0; i < p; ++i) {
    inv_sqrt_det_two /= l_two(i, i);
    inv_sqrt_det_one /= l_one(i, i);
  }
  // X_j'(Gamma+I)^{-1} X_j = |L^{-1} X_j|^2, solved for all blocks at once.
  const Matrix y = l_one.triangularView<Eigen::Lower>().solve(
      Matrix(obs_.data.transpose()));
  double acc = 0.0;
  for (long j = 0; j < obs_.count(); ++j) {
    acc += std::exp(-0.5 * y.col(j).squaredNorm());
  }
  acc /= static_cast<double>(obs_.count());
  return inv_sqrt_det_two + obs_pair_term_ - 2.0 * inv_sqrt_det_one * acc;
}

double q_oracle_gaussian(const BlockSet& obs, const Matrix& gamma) {
  return OracleGaussianObjective(obs)(gamma);
}

SimulationDraws draw_simulation_variates(const ModelFamily& model,
                                         const ObjectiveConfig& config) {
  SimulationDraws d;
  d.normals.resize(config.H, config.p);
  const bool counts = model.kind == ModelKind::PoissonAr1;
  if (counts) d.uniforms.resize(config.H, config.p);
  for (int j = 0; j < config.H; ++j) {
    CounterStream stream = config.seed_plan.stream(
        StreamDomain::SimBlocks, config.replication, static_cast<std::uint64_t>(j));
    for (int i = 0; i < config.p; ++i) d.normals(j, i) = stream.next_normal();
    if (counts) {
      for (int i = 0; i < config.p; ++i) d.uniforms(j, i) = stream.next_uniform();
    }
  }
  return d;
}

BlockSet simulate_blocks(const ModelFamily& model, const Vector& theta,
                         const SimulationDraws& draws) {
  validate_theta(model, theta);
  const int p = static_cast<int>(draws.normals.cols());
  BlockSet sim;
  sim.kind = BlockKind::Simulated;
  switch (model.kind) {
    case ModelKind::GaussianAr1:
    case ModelKind::Arfima0d0: {
      const BlockMoments moments = model_moments(model, theta, p);
      GaussianBlockSampler sampler(moments);
      sim.data.noalias() = draws.normals * sampler.cholesky_lower().transpose();
      break;
    }
    case ModelKind::PoissonAr1: {
      sim.data.resize(draws.normals.rows(), p);
      for (long j = 0; j < draws.normals.rows(); ++j) {
        sim.data.row(j) = poisson_ar_block_from_variates(
            theta[0], theta[1], theta[2], draws.normals.row(j).transpose(),
            draws.uniforms.row(j).transpose());
      }
      break;
    }
  }
  return sim;
}

CvIntegrationGrid make_cv_grid(const BlockSet& obs, const EmpiricalCovariance& emp,
                               const BlockMatrix& t_grid) {
  if (!(emp.gamma_hat.size() > 0) || !(emp.gamma_hat[0] > 0.0)) {
    throw std::runtime_error(
        "cv objective: empirical covariance is degenerate (constant series); "
        "use the oracle or simulation-based estimator instead");
  }
  CvIntegrationGrid grid;
  grid.t = t_grid;
  grid.obs_chf = chf_batch(obs, t_grid);
  const Matrix gh = emp.toeplitz();
  grid.var_hat.resize(t_grid.rows());
  for (long m = 0; m < t_grid.rows(); ++m) {
    const Vector t = t_grid.row(m).transpose();
    grid.var_hat[m] = t.dot(gh * t);
  }
  return grid;
}

CvIntegrationGrid make_cv_grid(const BlockSet& obs, const EmpiricalCovariance& emp,
                               const WeightSpec& weight, int M,
                               CounterStream& stream) {
  return make_cv_grid(obs, emp, weight_sample(weight, M, stream));
}

double q_cv_from_blocks(const CvIntegrationGrid& grid, const BlockSet& sim,
                        const BlockMoments& moments, double k,
                        double variance_floor) {
  if (sim.count() < 3) throw std::invalid_argument("q_cv: need at least 3 simulated blocks");
  const long M = grid.t.rows();
  double acc = 0.0;
  for (long m = 0; m < M; ++m) {
    const double var = grid.var_hat[m];
    std::complex<double> blend;
    if (var < k) {
      blend = cv_chf(sim, grid.t.row(m).transpose(), moments).value;
    } else {
      blend = mc_chf(sim, grid.t.row(m).transpose());
    }
    acc += std::norm(grid.obs_chf[static_cast<std::size_t>(m)] - blend) /
           std::max(var, variance_floor);
  }
  return acc / static_cast<double>(M);
}

double q_cv(const BlockSet& obs, const Vector& theta, const ModelFamily& model,
            const ObjectiveConfig& config, const EmpiricalCovariance& emp,
            const BlockMatrix& t_grid) {
  const CvIntegrationGrid grid = make_cv_grid(obs, emp, t_grid);
  const BlockSet sim =
      simulate_blocks(model, theta, draw_simulation_variates(model, config));
  const BlockMoments moments = model_moments(model, theta, config.p);
  return q_cv_from_blocks(grid, sim, moments, config.k, config.variance_floor);
}

namespace {

// Coordinate-wise smooth maps between the box and an unconstrained space:
// logit for two-sided bounds, log for one-sided ones.
double coord_to_unconstrained(double v, double lo, double hi) {
  const bool lo_fin = std::isfinite(lo);
  const bool hi_fin = std::isfinite(hi);
  if (lo_fin && hi_fin) return std::log((v - lo) / (hi - v));
  if (lo_fin) return std::log(v - lo);
  if (hi_fin) return -std::log(hi - v);
  return v;
}

double coord_to_box(double x, double lo, double hi) {
  const bool lo_fin = std::isfinite(lo);
  const bool hi_fin = std::isfinite(hi);
  if (lo_fin && hi_fin) {
    const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                              : std::exp(x) / (1.0 + std::exp(x));
    return lo + (hi - lo) * s;
  }
  if (lo_fin) return lo + std::exp(x);
  if (hi_fin) return hi - std::exp(-x);
  return x;
}

Vector to_unconstrained(const Vector& v, const Vector& lo, const Vector& hi) {
  Vector x(v.size());
  for (int i = 0; i < v.size(); ++i) x[i] = coord_to_unconstrained(v[i], lo[i], hi[i]);
  return x;
}

Vector to_box(const Vector& x, const Vector& lo, const Vector& hi) {
  Vector v(x.size());
  for (int i = 0; i < x.size(); ++i) v[i] = coord_to_box(x[i], lo[i], hi[i]);
  return v;
}

}  // namespace

EstimationResult minimize(const std::function<double(const Vector&)>& objective,
                          const ParameterVector& theta0,
                          const MinimizeOptions& options) {
  theta0.validate();
  const int q = theta0.size();
  const Vector& lo = theta0.lower;
  const Vector& hi = theta0.upper;

  int evaluations = 0;
  Vector best_x;
  double best_f = kInf;
  auto eval = [&](const Vector& x) {
    ++evaluations;
    double f = objective(to_box(x, lo, hi));
    if (std::isnan(f)) f = kInf;
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    return f;
  };

  const Vector x0 = to_unconstrained(theta0.values, lo, hi);
  const double f0 = eval(x0);
  if (!std::isfinite(f0)) {
    throw std::runtime_error("minimize: objective is not finite at the starting point");
  }

  // Standard Nelder-Mead coefficients.
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  auto run_phase = [&](const Vector& center, double center_f, double step) {
    std::vector<Vector> xs(q + 1);
    std::vector<double> fs(q + 1);
    xs[0] = center;
    fs[0] = center_f;
    for (int i = 1; i <= q; ++i) {
      xs[i] = center;
      xs[i][i - 1] += step;
      fs[i] = eval(xs[i]);
    }
    std::vector<int> order(q + 1);
    while (true) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return fs[a] < fs[b]; });
      {
        std::vector<Vector> xs2(q + 1);
        std::vector<double> fs2(q + 1);
        for (int i = 0; i <= q; ++i) {
          xs2[i] = xs[order[i]];
          fs2[i] = fs[order[i]];
        }
        xs.swap(xs2);
        fs.swap(fs2);
      }
      double diameter = 0.0;
      for (int i = 1; i <= q; ++i) {
        diameter = std::max(diameter, (xs[i] - xs[0]).lpNorm<Eigen::Infinity>());
      }
      if (diameter < options.simplex_tolerance) return true;
      if (evaluations >= options.max_evaluations) return false;

      Vector centroid = Vector::Zero(q);
      for (int i = 0; i < q; ++i) centroid += xs[i];
      centroid /= static_cast<double>(q);

      const Vector xr = centroid + kReflect * (centroid - xs[q]);
      const double fr = eval(xr);
      if (fr < fs[0]) {
        const Vector xe = centroid + kExpand * (centroid - xs[q]);
        const double fe = eval(xe);
        if (fe < fr) {
          xs[q] = xe;
          fs[q] = fe;
        } else {
          xs[q] = xr;
          fs[q] = fr;
        }
      } else if (fr < fs[q - 1]) {
        xs[q] = xr;
        fs[q] = fr;
      } else {
        bool shrink = false;
        if (fr < fs[q]) {
          const Vector xc = centroid + kContract * (xr - centroid);
          const double fc = eval(xc);
          if (fc <= fr) {
            xs[q] = xc;
            fs[q] = fc;
          } else {
            shrink = true;
          }
        } else {
          const Vector xc = centroid + kContract * (xs[q] - centroid);
          const double fc = eval(xc);
          if (fc < fs[q]) {
            xs[q] = xc;
            fs[q] = fc;
          } else {
            shrink = true;
          }
        }
        if (shrink) {
          for (int i = 1; i <= q; ++i) {
            xs[i] = xs[0] + kShrink * (xs[i] - xs[0]);
            fs[i] = eval(xs[i]);
          }
        }
      }
    }
  };

  bool converged = run_phase(x0, f0, options.initial_step);
  if (evaluations < options.max_evaluations) {
    const Vector incumbent = best_x;
    const double incumbent_f = best_f;
    converged = run_phase(incumbent, incumbent_f, options.restart_step);
  }

  EstimationResult result;
  result.theta_hat.values = to_box(best_x, lo, hi);
  result.theta_hat.lower = lo;
  result.theta_hat.upper = hi;
  result.objective_value = best_f;
  result.evaluations = evaluations;
  result.converged = converged;
  return result;
}

namespace {

double clamp_inside(double v, double lo, double hi) {
  const double margin = 0.01 * (hi - lo);
  return std::clamp(v, lo + margin, hi - margin);
}

}  // namespace

Vector starting_point(const ModelFamily& model, const Vector& series, int p) {
  const EmpiricalCovariance emp = empirical_covariance(series, std::max(p, 2));
  const double g0 = emp.gamma_hat[0];
  const double g1 = emp.gamma_hat[1];
  const ParameterVector box = default_box(
      model.kind, Vector::Zero(parameter_count(model.kind)));

  Vector start(parameter_count(model.kind));
  switch (model.kind) {
    case ModelKind::GaussianAr1: {
      const double rho = g0 > 0.0 ? g1 / g0 : 0.0;
      const double phi = clamp_inside(rho, box.lower[0], box.upper[0]);
      const double s2 = std::max(g0 * (1.0 - phi * phi), 1e-6);
      start << phi, clamp_inside(std::sqrt(s2), box.lower[1], box.upper[1]);
      break;
    }
    case ModelKind::Arfima0d0: {
      const double rho = g0 > 0.0 ? g1 / g0 : 0.0;
      // lag-1 autocorrelation of ARFIMA(0,d,0) is d/(1-d)
      const double d = clamp_inside(rho / (1.0 + rho), box.lower[0], box.upper[0]);
      const double s2 = std::max(
          g0 * std::exp(2.0 * std::lgamma(1.0 - d) - std::lgamma(1.0 - 2.0 * d)),
          1e-6);
      start << d, clamp_inside(std::sqrt(s2), box.lower[1], box.upper[1]);
      break;
    }
    case ModelKind::PoissonAr1: {
      // invert the moment formulas of poisson_ar_moments
      const double mbar = std::max(emp.mu_hat, 1e-3);
      const double over = std::max((g0 - mbar) / (mbar * mbar), 0.05);
      const double ga0 = std::log1p(over);
      const double r1 = std::max(g1 / (mbar * mbar), -0.5);
      const double ga1 = std::log1p(r1);
      const double phi = clamp_inside(ga1 / ga0, box.lower[1], box.upper[1]);
      const double sigma = clamp_inside(std::sqrt(std::max(ga0 * (1.0 - phi * phi), 1e-4)),
                                        box.lower[2], box.upper[2]);
      const double beta = clamp_inside(std::log(mbar) - 0.5 * ga0,
                                       box.lower[0], box.upper[0]);
      start << beta, phi, sigma;
      break;
    }
  }
  return start;
}

EstimationResult estimate(const Vector& series, const ModelFamily& model,
                          EstimatorKind kind, const ObjectiveConfig& config) {
  config.validate(kind);
  if (kind == EstimatorKind::Oracle) {
    if (model.kind == ModelKind::PoissonAr1) {
      throw std::invalid_argument(
          "oracle estimator requires a closed-form Gaussian chf; "
          "not available for poisson_ar");
    }
    if (config.weight.family != WeightFamily::Gaussian) {
      throw std::invalid_argument(
          "oracle estimator is defined under the gaussian weight");
    }
  }

  const auto obs = std::make_shared<BlockSet>(make_blocks(series, config.p));
  const Vector start = starting_point(model, series, config.p);
  const ParameterVector box = default_box(model.kind, start);
  const int p = config.p;

  std::function<double(const Vector&)> objective;
  switch (kind) {
    case EstimatorKind::Oracle: {
      auto oracle = std::make_shared<OracleGaussianObjective>(*obs);
      objective = [oracle, model, p](const Vector& theta) {
        try {
          return (*oracle)(model_moments(model, theta, p).cov);
        } catch (const non_pd_error&) {
          return kInf;
        }
      };
      break;
    }
    case EstimatorKind::SimulationBased: {
      const double obs_term = q_nh_observed_term(*obs, config.weight);
      auto draws =
          std::make_shared<SimulationDraws>(draw_simulation_variates(model, config));
      const WeightSpec weight = config.weight;
      objective = [obs, obs_term, draws, model, weight](const Vector& theta) {
        try {
          const BlockSet sim = simulate_blocks(model, theta, *draws);
          return q_nh_with_observed_term(obs_term, *obs, sim, weight);
        } catch (const mean_overflow_error&) {
          return kInf;
        } catch (const non_pd_error&) {
          return kInf;
        }
      };
      break;
    }
    case EstimatorKind::ControlVariates: {
      const EmpiricalCovariance emp = empirical_covariance(series, p);
      CounterStream t_stream =
          config.seed_plan.stream(StreamDomain::TGrid, config.replication, 0);
      auto grid = std::make_shared<CvIntegrationGrid>(
          make_cv_grid(*obs, emp, config.weight, config.M, t_stream));
      auto draws =
          std::make_shared<SimulationDraws>(draw_simulation_variates(model, config));
      const double k = config.k;
      const double floor = config.variance_floor;
      objective = [grid, draws, model, p, k, floor](const Vector& theta) {
        try {
          const BlockSet sim = simulate_blocks(model, theta, *draws);
          const BlockMoments moments = model_moments(model, theta, p);
          return q_cv_from_blocks(*grid, sim, moments, k, floor);
        } catch (const mean_overflow_error&) {
          return kInf;
        } catch (const non_pd_error&) {
          return kInf;
        }
      };
      break;
    }
  }

  ParameterVector theta0 = box;
  theta0.values = start;
  EstimationResult result = minimize(objective, theta0);
  result.master_seed = config.seed_plan.master_seed;
  return result;
}

}  // namespace chfmatch
