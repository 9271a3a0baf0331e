#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "chfmatch/chf.hpp"
#include "chfmatch/models.hpp"
#include "chfmatch/weights.hpp"

namespace chfmatch {

enum class EstimatorKind { Oracle, SimulationBased, ControlVariates };

const char* estimator_name(EstimatorKind kind);
EstimatorKind parse_estimator(const std::string& name);

struct ObjectiveConfig {
  int p = 3;
  int H = 3000;
  WeightSpec weight{WeightFamily::Gaussian, 3};
  double k = 1.0;           // variance threshold (cv only)
  int M = 2000;             // integration points (cv only)
  SeedPlan seed_plan{};
  double variance_floor = 1e-6;
  std::uint64_t replication = 0;  // stream key component for CRN

  void validate(EstimatorKind kind) const;
};

// mu_hat and gamma_hat(0..p-1) over the first n = T-p+1 observations; lag h
// uses divisor n-h (so lag 0 uses n).
struct EmpiricalCovariance {
  Vector gamma_hat;
  double mu_hat = 0.0;

  Matrix toeplitz() const;
};

EmpiricalCovariance empirical_covariance(const Vector& series, int p);

// Fourier-reduced objective
//   Q = (1/n^2) sum w~(X_j - X_k) + (1/H^2) sum w~(Xs_j - Xs_k)
//       - (2/Hn) sum w~(X_j - Xs_k),
// using the symmetry of w~. The observed-only term is theta-independent and
// can be computed once per dataset.
double q_nh_observed_term(const BlockSet& obs, const WeightSpec& weight);
double q_nh_with_observed_term(double observed_term, const BlockSet& obs,
                               const BlockSet& sim, const WeightSpec& weight);
double q_nh(const BlockSet& obs, const BlockSet& sim, const WeightSpec& weight);

// Closed-form integrated squared chf error for an exact Gaussian chf
// exp(-t'Gamma t/2) under the normalized Gaussian weight
// w(t) = (2 pi)^{-p/2} exp(-t't/2):
//   det((2G+I)^{-1})^{1/2} + (1/n^2) sum_jk exp(-|X_j-X_k|^2/2)
//   - 2 det((G+I)^{-1})^{1/2} (1/n) sum_j exp(-X_j'(G+I)^{-1}X_j/2).
class OracleGaussianObjective {
 public:
  explicit OracleGaussianObjective(BlockSet obs);
  double operator()(const Matrix& gamma) const;

 private:
  BlockSet obs_;
  double obs_pair_term_ = 0.0;
};

double q_oracle_gaussian(const BlockSet& obs, const Matrix& gamma);

// Frozen CRN variates: one keyed stream per block, drawn once per estimation
// run and reused across all theta.
struct SimulationDraws {
  BlockMatrix normals;
  BlockMatrix uniforms;  // Poisson-AR only
};

SimulationDraws draw_simulation_variates(const ModelFamily& model,
                                         const ObjectiveConfig& config);

// theta -> iid simulated blocks, a pure function of (theta, draws).
// Throws mean_overflow_error / non_pd_error for pathological theta.
BlockSet simulate_blocks(const ModelFamily& model, const Vector& theta,
                         const SimulationDraws& draws);

// Per-run caches for the Monte Carlo integration of the cv objective: the
// frozen t-grid, the observed chf at each grid point, and t'Gamma_hat t.
struct CvIntegrationGrid {
  BlockMatrix t;
  std::vector<std::complex<double>> obs_chf;
  Vector var_hat;
};

CvIntegrationGrid make_cv_grid(const BlockSet& obs, const EmpiricalCovariance& emp,
                               const WeightSpec& weight, int M,
                               CounterStream& stream);
CvIntegrationGrid make_cv_grid(const BlockSet& obs, const EmpiricalCovariance& emp,
                               const BlockMatrix& t_grid);

// (1/M) sum_m |phi_n(t_m) - blend(t_m)|^2 / max(t_m'Gh t_m, floor), where
// blend is cv_chf when t_m'Gh t_m < k and the plain Monte Carlo chf otherwise.
double q_cv_from_blocks(const CvIntegrationGrid& grid, const BlockSet& sim,
                        const BlockMoments& moments, double k,
                        double variance_floor);

double q_cv(const BlockSet& obs, const Vector& theta, const ModelFamily& model,
            const ObjectiveConfig& config, const EmpiricalCovariance& emp,
            const BlockMatrix& t_grid);

struct MinimizeOptions {
  double simplex_tolerance = 1e-4;  // diameter in transformed space
  int max_evaluations = 2000;
  double initial_step = 0.25;
  double restart_step = 0.05;
};

struct EstimationResult {
  ParameterVector theta_hat;
  double objective_value = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::uint64_t master_seed = 0;
};

// Nelder-Mead on a smoothly transformed unconstrained space (logit map per
// box-bounded coordinate). Restarts once from the incumbent; on plateaus the
// first point attaining the minimal observed value wins.
EstimationResult minimize(const std::function<double(const Vector&)>& objective,
                          const ParameterVector& theta0,
                          const MinimizeOptions& options = {});

// Moment-based starting values, clamped strictly inside the default box.
Vector starting_point(const ModelFamily& model, const Vector& series, int p);

EstimationResult estimate(const Vector& series, const ModelFamily& model,
                          EstimatorKind kind, const ObjectiveConfig& config);

}  // namespace chfmatch
