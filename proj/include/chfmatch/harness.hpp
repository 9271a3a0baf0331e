#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chfmatch/estimators.hpp"

namespace chfmatch {

struct ExperimentConfig {
  ModelFamily model;
  Vector theta0;
  int n = 400;  // series length; blocks per series = n - p + 1
  int replications = 100;
  std::vector<EstimatorKind> estimators{EstimatorKind::SimulationBased};
  ObjectiveConfig objective;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string output_prefix;

  void validate() const;
};

struct ReplicationRecord {
  int replication = 0;
  EstimatorKind estimator = EstimatorKind::SimulationBased;
  Vector estimate;
  double objective = 0.0;
  int evaluations = 0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct EstimatorSummary {
  EstimatorKind estimator = EstimatorKind::SimulationBased;
  Vector bias;
  Vector stddev;  // divisor R, so rmse^2 = bias^2 + stddev^2 exactly
  Vector rmse;
  int used = 0;
  int failed = 0;
};

struct ReplicationSummary {
  std::vector<ReplicationRecord> records;  // ordered by (replication, estimator)
  std::vector<EstimatorSummary> by_estimator;

  const EstimatorSummary& summary_for(EstimatorKind kind) const;
};

using EstimateRunner = std::function<EstimationResult(
    const Vector& series, std::uint64_t replication, EstimatorKind kind)>;

// Simulates a fresh data path per replication (streams keyed by replication
// index), runs every configured estimator on it, and aggregates bias/Std/RMSE.
// Replications run on a worker pool; results are identical for any thread
// count. Hard failures become failed records excluded from the summary.
ReplicationSummary run_replications(const ExperimentConfig& config);
ReplicationSummary run_replications(const ExperimentConfig& config,
                                    const EstimateRunner& runner);

std::string replication_csv(const ExperimentConfig& config,
                            const ReplicationSummary& summary);
std::string summary_csv(const ExperimentConfig& config,
                        const ReplicationSummary& summary);
// Writes <prefix>_replications.csv and <prefix>_summary.csv.
void write_outputs(const ExperimentConfig& config, const ReplicationSummary& summary);

struct ChfErrorRow {
  double sqrt_var = 0.0;
  double xi_mc = 0.0;
  double xi_cv = 0.0;
};

// Reference chf from a large iid sample (used as truth for count models).
std::vector<std::complex<double>> reference_chf(const ModelFamily& model,
                                                const Vector& theta,
                                                const BlockMatrix& ts,
                                                long replicates,
                                                const SeedPlan& plan);

// One row per t: sqrt(t'Gamma_p(theta) t), |mc - truth|, |cv - truth|.
// Truth defaults to the closed-form Gaussian chf for ar1/arfima and a
// 10^6-replicate reference chf for poisson_ar; pass `truth` to reuse one.
std::vector<ChfErrorRow> chf_error_diagnostic(
    const ModelFamily& model, const Vector& theta, const BlockMatrix& ts, int H,
    const SeedPlan& plan, std::uint64_t replication,
    const std::vector<std::complex<double>>* truth = nullptr);

// Spec-shaped convenience: draws `count` points from the weight sampler.
std::vector<ChfErrorRow> chf_error_diagnostic(const ModelFamily& model,
                                              const Vector& theta,
                                              const WeightSpec& weight, int count,
                                              int H, const SeedPlan& plan);

std::string chf_error_csv(const std::vector<ChfErrorRow>& rows);

// Flat key = value experiment configs (# comments, booleans true/false).
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// Single-column CSV, no header, one observation per line.
Vector read_series_csv(const std::string& path);
std::string series_csv(const Vector& series);

int cli_main(int argc, char** argv);

}  // namespace chfmatch
