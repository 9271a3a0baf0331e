#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "chfmatch/harness.hpp"

namespace chfmatch {

namespace {

Vector parse_theta(const std::string& csv) {
  std::vector<double> values;
  std::istringstream is(csv);
  std::string item;
  while (std::getline(is, item, ',')) values.push_back(std::stod(item));
  return Eigen::Map<const Vector>(values.data(), static_cast<long>(values.size()));
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write output file: " + out_path);
  f << content;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Characteristic-function matching estimation for stationary time series"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  app.add_option("--seed", seed, "Master seed for all random streams");
  app.add_option("--threads", threads, "Worker threads (0 = hardware)");
  app.add_option("--out", out, "Output path (subcommand specific)");

  // estimate
  auto* cmd_estimate = app.add_subcommand("estimate", "Fit one series from a CSV file");
  std::string series_path, model_name_arg = "ar1", estimator_arg = "simulation";
  std::string weight_arg = "gaussian";
  ObjectiveConfig obj;
  cmd_estimate->add_option("--series", series_path, "Single-column CSV, no header")
      ->required();
  cmd_estimate->add_option("--model", model_name_arg, "ar1 | arfima | poisson_ar");
  cmd_estimate->add_option("--estimator", estimator_arg, "oracle | simulation | cv");
  cmd_estimate->add_option("--weight", weight_arg, "gaussian | laplace | cauchy");
  cmd_estimate->add_option("--p", obj.p, "Block length");
  cmd_estimate->add_option("--H", obj.H, "Simulated block count");
  cmd_estimate->add_option("--k", obj.k, "Variance threshold (cv)");
  cmd_estimate->add_option("--M", obj.M, "Integration points (cv)");
  cmd_estimate->add_option("--variance-floor", obj.variance_floor,
                           "Floor on t'Gh t in the cv weight");

  // replicate
  auto* cmd_replicate = app.add_subcommand("replicate", "Run a replication experiment");
  std::string config_path;
  cmd_replicate->add_option("--config", config_path, "Key = value experiment file")
      ->required();

  // diagnose
  auto* cmd_diagnose =
      app.add_subcommand("diagnose", "chf approximation error table (CSV)");
  std::string diag_model = "ar1", diag_theta, diag_weight = "laplace";
  int diag_count = 500, diag_h = 3000;
  cmd_diagnose->add_option("--model", diag_model, "ar1 | arfima | poisson_ar");
  cmd_diagnose->add_option("--theta", diag_theta, "Comma-separated parameters")
      ->required();
  cmd_diagnose->add_option("--weight", diag_weight, "Family for the t draws");
  cmd_diagnose->add_option("--count", diag_count, "Number of t draws");
  cmd_diagnose->add_option("--H", diag_h, "Simulated block count");

  // simulate
  auto* cmd_simulate = app.add_subcommand("simulate", "Emit a model path as CSV");
  std::string sim_model = "ar1", sim_theta, sim_innovation = "gaussian";
  int sim_n = 400;
  cmd_simulate->add_option("--model", sim_model, "ar1 | arfima | poisson_ar");
  cmd_simulate->add_option("--theta", sim_theta, "Comma-separated parameters")
      ->required();
  cmd_simulate->add_option("--n", sim_n, "Series length");
  cmd_simulate->add_option("--innovation", sim_innovation,
                           "gaussian | laplace | student_t6 (arfima data only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (cmd_estimate->parsed()) {
      const Vector series = read_series_csv(series_path);
      ModelFamily model{parse_model_kind(model_name_arg)};
      const EstimatorKind kind = parse_estimator(estimator_arg);
      obj.weight = WeightSpec{parse_weight_family(weight_arg), obj.p};
      obj.seed_plan.master_seed = seed;
      if (kind == EstimatorKind::ControlVariates &&
          obj.weight.family == WeightFamily::Cauchy) {
        std::cerr << "warning: the cauchy weight has heavy tails; the "
                     "variance-weighted cv integrand can be noisy\n";
      }
      const EstimationResult res = estimate(series, model, kind, obj);
      nlohmann::json j;
      j["model"] = model_name(model.kind);
      j["estimator"] = estimator_name(kind);
      j["theta_hat"] = std::vector<double>(
          res.theta_hat.values.data(),
          res.theta_hat.values.data() + res.theta_hat.values.size());
      nlohmann::json named;
      const auto names = parameter_names(model.kind);
      for (std::size_t i = 0; i < names.size(); ++i) {
        named[names[i]] = res.theta_hat.values[static_cast<long>(i)];
      }
      j["parameters"] = named;
      j["objective"] = res.objective_value;
      j["evaluations"] = res.evaluations;
      j["converged"] = res.converged;
      j["seed"] = res.master_seed;
      std::cout << j.dump() << '\n';
      if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write output file: " + out);
        f << j.dump() << '\n';
      }
    } else if (cmd_replicate->parsed()) {
      ExperimentConfig config = load_experiment_config(config_path);
      for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed" || arg.rfind("--seed=", 0) == 0) {
          config.master_seed = seed;
          config.objective.seed_plan.master_seed = seed;
        }
        if (arg == "--threads" || arg.rfind("--threads=", 0) == 0) {
          config.threads = threads;
        }
        if (arg == "--out" || arg.rfind("--out=", 0) == 0) {
          config.output_prefix = out;
        }
      }
      if (config.output_prefix.empty()) {
        throw std::runtime_error("replicate needs an output prefix (config `out` or --out)");
      }
      for (EstimatorKind kind : config.estimators) {
        if (kind == EstimatorKind::ControlVariates &&
            config.objective.weight.family == WeightFamily::Cauchy) {
          std::cerr << "warning: the cauchy weight has heavy tails; the "
                       "variance-weighted cv integrand can be noisy\n";
        }
      }
      const ReplicationSummary summary = run_replications(config);
      write_outputs(config, summary);
      std::cout << summary_csv(config, summary) << std::flush;
    } else if (cmd_diagnose->parsed()) {
      ModelFamily model{parse_model_kind(diag_model)};
      const Vector theta = parse_theta(diag_theta);
      SeedPlan plan{seed};
      const WeightSpec weight{parse_weight_family(diag_weight),
                              static_cast<int>(3)};
      const auto rows = chf_error_diagnostic(model, theta, weight, diag_count,
                                             diag_h, plan);
      emit(out, chf_error_csv(rows));
    } else if (cmd_simulate->parsed()) {
      ModelFamily model{parse_model_kind(sim_model),
                        parse_innovation(sim_innovation)};
      const Vector theta = parse_theta(sim_theta);
      SeedPlan plan{seed};
      CounterStream stream = plan.stream(StreamDomain::DataPath, 1, 0);
      const Vector path = simulate_path(model, theta, sim_n, stream);
      emit(out, series_csv(path));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace chfmatch
