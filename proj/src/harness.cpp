#include "chfmatch/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace chfmatch {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int worker_count(int requested, int jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  return std::min(n, std::max(jobs, 1));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (n < 2 * objective.p) throw std::invalid_argument("config: series length too short");
  validate_theta(model, theta0);
  const ParameterVector box = default_box(model.kind, theta0);
  box.validate();  // theta0 inside the default box
  if (estimators.empty()) throw std::invalid_argument("config: no estimators selected");
  for (EstimatorKind kind : estimators) objective.validate(kind);
}

const EstimatorSummary& ReplicationSummary::summary_for(EstimatorKind kind) const {
  for (const auto& s : by_estimator) {
    if (s.estimator == kind) return s;
  }
  throw std::out_of_range("no summary for requested estimator");
}

ReplicationSummary run_replications(const ExperimentConfig& config,
                                    const EstimateRunner& runner) {
  config.validate();
  const int R = config.replications;
  const int q = static_cast<int>(config.theta0.size());
  const int per_rep = static_cast<int>(config.estimators.size());

  std::vector<ReplicationRecord> records(
      static_cast<std::size_t>(R) * per_rep);

  std::atomic<int> next{0};
  auto work = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= R) break;
      const std::uint64_t rep = static_cast<std::uint64_t>(r) + 1;
      Vector series;
      std::string data_error;
      try {
        CounterStream stream =
            config.objective.seed_plan.stream(StreamDomain::DataPath, rep, 0);
        series = simulate_path(config.model, config.theta0, config.n, stream);
      } catch (const std::exception& e) {
        data_error = e.what();
      }
      for (int s = 0; s < per_rep; ++s) {
        ReplicationRecord& rec = records[static_cast<std::size_t>(r) * per_rep + s];
        rec.replication = static_cast<int>(rep);
        rec.estimator = config.estimators[s];
        rec.estimate = Vector::Constant(q, std::numeric_limits<double>::quiet_NaN());
        if (!data_error.empty()) {
          rec.failed = true;
          rec.error = data_error;
          continue;
        }
        try {
          const EstimationResult res = runner(series, rep, config.estimators[s]);
          rec.estimate = res.theta_hat.values;
          rec.objective = res.objective_value;
          rec.evaluations = res.evaluations;
          rec.converged = res.converged;
        } catch (const std::exception& e) {
          rec.failed = true;
          rec.error = e.what();
        }
      }
    }
  };

  const int threads = worker_count(config.threads, R);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  ReplicationSummary out;
  out.records = std::move(records);
  for (EstimatorKind kind : config.estimators) {
    EstimatorSummary s;
    s.estimator = kind;
    s.bias = Vector::Zero(q);
    s.stddev = Vector::Zero(q);
    s.rmse = Vector::Zero(q);
    Vector sum = Vector::Zero(q), sumsq = Vector::Zero(q);
    for (const auto& rec : out.records) {
      if (rec.estimator != kind) continue;
      if (rec.failed) {
        ++s.failed;
        continue;
      }
      ++s.used;
      const Vector err = rec.estimate - config.theta0;
      sum += err;
      sumsq += err.cwiseProduct(err);
    }
    if (s.used > 0) {
      s.bias = sum / s.used;
      const Vector mse = sumsq / s.used;
      s.rmse = mse.cwiseSqrt();
      s.stddev = (mse - s.bias.cwiseProduct(s.bias)).cwiseMax(0.0).cwiseSqrt();
    }
    out.by_estimator.push_back(std::move(s));
  }
  return out;
}

ReplicationSummary run_replications(const ExperimentConfig& config) {
  return run_replications(
      config, [&config](const Vector& series, std::uint64_t rep, EstimatorKind kind) {
        ObjectiveConfig obj = config.objective;
        obj.replication = rep;
        return estimate(series, config.model, kind, obj);
      });
}

std::string replication_csv(const ExperimentConfig& config,
                            const ReplicationSummary& summary) {
  const auto names = parameter_names(config.model.kind);
  std::ostringstream os;
  os << "replication,estimator";
  for (const auto& n : names) os << ',' << n;
  os << ",objective,evaluations,converged,failed\n";
  for (const auto& rec : summary.records) {
    os << rec.replication << ',' << estimator_name(rec.estimator);
    for (int i = 0; i < rec.estimate.size(); ++i) os << ',' << fmt(rec.estimate[i]);
    os << ',' << fmt(rec.objective) << ',' << rec.evaluations << ','
       << (rec.converged ? "true" : "false") << ',' << (rec.failed ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string summary_csv(const ExperimentConfig& config,
                        const ReplicationSummary& summary) {
  const auto names = parameter_names(config.model.kind);
  std::ostringstream os;
  os << "param,true,bias,std,rmse,estimator,n,H,p,k,weight,replications,failed\n";
  for (const auto& s : summary.by_estimator) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      os << names[i] << ',' << fmt(config.theta0[static_cast<int>(i)]) << ','
         << fmt(s.bias[static_cast<int>(i)]) << ','
         << fmt(s.stddev[static_cast<int>(i)]) << ','
         << fmt(s.rmse[static_cast<int>(i)]) << ',' << estimator_name(s.estimator)
         << ',' << config.n << ',' << config.objective.H << ','
         << config.objective.p << ',' << fmt(config.objective.k) << ','
         << weight_family_name(config.objective.weight.family) << ','
         << config.replications << ',' << s.failed << '\n';
    }
  }
  return os.str();
}

void write_outputs(const ExperimentConfig& config, const ReplicationSummary& summary) {
  if (config.output_prefix.empty()) {
    throw std::invalid_argument("write_outputs: output prefix is empty");
  }
  {
    std::ofstream f(config.output_prefix + "_replications.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + config.output_prefix + "_replications.csv");
    f << replication_csv(config, summary);
  }
  {
    std::ofstream f(config.output_prefix + "_summary.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + config.output_prefix + "_summary.csv");
    f << summary_csv(config, summary);
  }
}

std::vector<std::complex<double>> reference_chf(const ModelFamily& model,
                                                const Vector& theta,
                                                const BlockMatrix& ts,
                                                long replicates,
                                                const SeedPlan& plan) {
  validate_theta(model, theta);
  const int p = static_cast<int>(ts.cols());
  const long M = ts.rows();
  std::vector<double> re(M, 0.0), im(M, 0.0);
  CounterStream stream = plan.stream(StreamDomain::Reference, 0, 0);
  Vector block(p);
  for (long j = 0; j < replicates; ++j) {
    switch (model.kind) {
      case ModelKind::GaussianAr1:
        block = ar1_block_sample(theta[0], theta[1], p, stream);
        break;
      case ModelKind::Arfima0d0:
        block = gaussian_block_sample(arfima_covariance(theta[0], theta[1], p),
                                      Innovation::Gaussian, stream);
        break;
      case ModelKind::PoissonAr1:
        block = poisson_ar_block_sample(theta[0], theta[1], theta[2], p, stream);
        break;
    }
    for (long m = 0; m < M; ++m) {
      double s = 0.0;
      for (int i = 0; i < p; ++i) s += ts(m, i) * block[i];
      re[m] += std::cos(s);
      im[m] += std::sin(s);
    }
  }
  std::vector<std::complex<double>> out(M);
  for (long m = 0; m < M; ++m) {
    out[m] = {re[m] / static_cast<double>(replicates),
              im[m] / static_cast<double>(replicates)};
  }
  return out;
}

std::vector<ChfErrorRow> chf_error_diagnostic(
    const ModelFamily& model, const Vector& theta, const BlockMatrix& ts, int H,
    const SeedPlan& plan, std::uint64_t replication,
    const std::vector<std::complex<double>>* truth) {
  validate_theta(model, theta);
  const int p = static_cast<int>(ts.cols());
  const BlockMoments moments = model_moments(model, theta, p);

  std::vector<std::complex<double>> truth_local;
  if (truth == nullptr) {
    if (model.kind == ModelKind::PoissonAr1) {
      truth_local = reference_chf(model, theta, ts, 1000000, plan);
    } else {
      // closed-form Gaussian chf exp(-t'Gamma t / 2)
      truth_local.resize(ts.rows());
      for (long m = 0; m < ts.rows(); ++m) {
        const Vector t = ts.row(m).transpose();
        truth_local[m] = std::exp(-0.5 * t.dot(moments.cov * t));
      }
    }
    truth = &truth_local;
  }
  if (static_cast<long>(truth->size()) != ts.rows()) {
    throw std::invalid_argument("chf_error_diagnostic: truth size mismatch");
  }

  ObjectiveConfig cfg;
  cfg.p = p;
  cfg.H = H;
  cfg.weight.dimension = p;
  cfg.seed_plan = plan;
  cfg.replication = replication;
  const BlockSet sim = simulate_blocks(model, theta, draw_simulation_variates(model, cfg));

  const auto mc = chf_batch(sim, ts);
  const auto cv = cv_chf_batch(sim, ts, moments);

  std::vector<ChfErrorRow> rows(ts.rows());
  for (long m = 0; m < ts.rows(); ++m) {
    const Vector t = ts.row(m).transpose();
    rows[m].sqrt_var = std::sqrt(std::max(t.dot(moments.cov * t), 0.0));
    rows[m].xi_mc = std::abs(mc[m] - (*truth)[m]);
    rows[m].xi_cv = std::abs(cv[m].value - (*truth)[m]);
  }
  return rows;
}

std::vector<ChfErrorRow> chf_error_diagnostic(const ModelFamily& model,
                                              const Vector& theta,
                                              const WeightSpec& weight, int count,
                                              int H, const SeedPlan& plan) {
  CounterStream t_stream = plan.stream(StreamDomain::TGrid, 0, 0);
  const BlockMatrix ts = weight_sample(weight, count, t_stream);
  return chf_error_diagnostic(model, theta, ts, H, plan, 0, nullptr);
}

std::string chf_error_csv(const std::vector<ChfErrorRow>& rows) {
  std::ostringstream os;
  os << "sqrt_var,xi_mc,xi_cv\n";
  for (const auto& r : rows) {
    os << fmt(r.sqrt_var) << ',' << fmt(r.xi_mc) << ',' << fmt(r.xi_cv) << '\n';
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig config;
  bool have_theta = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value, got: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "model") {
      config.model.kind = parse_model_kind(value);
    } else if (key == "innovation") {
      config.model.innovation = parse_innovation(value);
    } else if (key == "theta0") {
      const auto parts = split(value, ',');
      config.theta0.resize(static_cast<long>(parts.size()));
      for (std::size_t i = 0; i < parts.size(); ++i) {
        config.theta0[static_cast<long>(i)] = std::stod(parts[i]);
      }
      have_theta = true;
    } else if (key == "n") {
      config.n = std::stoi(value);
    } else if (key == "replications") {
      config.replications = std::stoi(value);
    } else if (key == "estimators") {
      config.estimators.clear();
      for (const auto& name : split(value, ',')) {
        config.estimators.push_back(parse_estimator(name));
      }
    } else if (key == "weight") {
      config.objective.weight.family = parse_weight_family(value);
    } else if (key == "p") {
      config.objective.p = std::stoi(value);
      config.objective.weight.dimension = config.objective.p;
    } else if (key == "H") {
      config.objective.H = std::stoi(value);
    } else if (key == "k") {
      config.objective.k = std::stod(value);
    } else if (key == "M") {
      config.objective.M = std::stoi(value);
    } else if (key == "variance_floor") {
      config.objective.variance_floor = std::stod(value);
    } else if (key == "seed") {
      config.master_seed = std::stoull(value);
    } else if (key == "threads") {
      config.threads = std::stoi(value);
    } else if (key == "out") {
      config.output_prefix = value;
    } else {
      throw std::invalid_argument("config: unknown key: " + key);
    }
  }
  if (!have_theta) throw std::invalid_argument("config: theta0 is required");
  config.objective.seed_plan.master_seed = config.master_seed;
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_experiment_config(os.str());
}

Vector read_series_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open series file: " + path);
  std::vector<double> values;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(line, &pos);
      if (pos != line.size()) throw std::invalid_argument(line);
      values.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error("malformed series value at line " +
                               std::to_string(lineno) + ": " + line);
    }
  }
  if (values.empty()) throw std::runtime_error("series file is empty: " + path);
  return Eigen::Map<const Vector>(values.data(), static_cast<long>(values.size()));
}

std::string series_csv(const Vector& series) {
  std::ostringstream os;
  for (long i = 0; i < series.size(); ++i) os << fmt(series[i]) << '\n';
  return os.str();
}

}  // namespace chfmatch
