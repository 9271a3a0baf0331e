// Acceptance suite: one criterion per function, one [PASS]/[FAIL] line each.
// Run with no arguments for all criteria, or pass criterion numbers.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chfmatch/harness.hpp"

using namespace chfmatch;

namespace {

struct Criterion {
  int id;
  std::string label;
  bool passed;
  std::string detail;
};

std::string g_cli_path;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --- 1. Lemma-1 equivalence -------------------------------------------------

double is_integral(const BlockSet& obs, const BlockSet& sim, const WeightSpec& weight,
                   long draws, std::uint64_t seed) {
  CounterStream s = SeedPlan{seed}.stream(StreamDomain::Reference, 0, 0);
  const BlockMatrix ts = weight_sample(weight, draws, s);
  double acc = 0.0;
  for (long i = 0; i < draws; ++i) {
    const Vector t = ts.row(i).transpose();
    acc += std::norm(empirical_chf(obs, t) - empirical_chf(sim, t));
  }
  return acc / static_cast<double>(draws);
}

Criterion criterion_1() {
  std::mt19937_64 g(101);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  auto fill = [&](long rows, BlockKind kind) {
    BlockSet b;
    b.kind = kind;
    b.data.resize(rows, 3);
    for (long j = 0; j < rows; ++j) {
      for (int i = 0; i < 3; ++i) b.data(j, i) = unif(g);
    }
    return b;
  };
  const WeightFamily families[] = {WeightFamily::Laplace, WeightFamily::Cauchy,
                                   WeightFamily::Gaussian};
  double worst = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const WeightSpec weight{families[instance % 3], 3};
    const BlockSet obs = fill(5, BlockKind::Observed);
    const BlockSet sim = fill(7, BlockKind::Simulated);
    const double q = q_nh(obs, sim, weight);
    const double oracle = is_integral(obs, sim, weight, 1000000, 9000 + instance);
    worst = std::max(worst, std::abs(q - oracle) / std::max(q, 1e-3));
  }
  return {1, "Lemma-1 equivalence (20 instances, all weight families)", worst < 0.01,
          "max rel err " + fmt(worst)};
}

// --- 2. Gaussian oracle formula ----------------------------------------------

Criterion criterion_2() {
  std::mt19937_64 g(202);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  double worst = 0.0;
  for (int instance = 0; instance < 10; ++instance) {
    BlockSet obs;
    obs.data.resize(5, 3);
    for (long j = 0; j < 5; ++j) {
      for (int i = 0; i < 3; ++i) obs.data(j, i) = unif(g);
    }
    Matrix a(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a(i, j) = unif(g);
    }
    const Matrix gamma = a * a.transpose() + 0.3 * Matrix::Identity(3, 3);
    const double q = q_oracle_gaussian(obs, gamma);

    CounterStream s = SeedPlan{static_cast<std::uint64_t>(1700 + instance)}.stream(StreamDomain::Reference, 0, 0);
    const BlockMatrix ts =
        weight_sample(WeightSpec{WeightFamily::Gaussian, 3}, 1000000, s);
    double acc = 0.0;
    for (long i = 0; i < ts.rows(); ++i) {
      const Vector t = ts.row(i).transpose();
      const double truth = std::exp(-0.5 * t.dot(gamma * t));
      acc += std::norm(empirical_chf(obs, t) - std::complex<double>(truth, 0.0));
    }
    acc /= static_cast<double>(ts.rows());
    worst = std::max(worst, std::abs(q - acc) / std::max(q, 1e-3));
  }
  return {2, "Gaussian closed-form objective vs numeric integral (10 instances)",
          worst < 0.01, "max rel err " + fmt(worst)};
}

// --- 3/4. replication experiments ---------------------------------------------

ExperimentConfig base_config(ModelKind kind, const Vector& theta0, WeightFamily weight,
                             std::uint64_t seed) {
  ExperimentConfig config;
  config.model.kind = kind;
  config.theta0 = theta0;
  config.n = 400;
  config.replications = 100;
  config.objective.H = 3000;
  config.objective.weight = WeightSpec{weight, 3};
  config.master_seed = seed;
  config.objective.seed_plan.master_seed = seed;
  config.threads = 0;
  return config;
}

Criterion criterion_3() {
  Vector theta(2);
  theta << 0.25, 1.0;
  ExperimentConfig config =
      base_config(ModelKind::Arfima0d0, theta, WeightFamily::Gaussian, 930025);
  config.estimators = {EstimatorKind::SimulationBased};
  const ReplicationSummary quarter = run_replications(config);
  const EstimatorSummary& s25 = quarter.summary_for(EstimatorKind::SimulationBased);

  config.theta0[0] = 0.45;
  config.master_seed = 930045;
  config.objective.seed_plan.master_seed = 930045;
  const ReplicationSummary edge = run_replications(config);
  const EstimatorSummary& s45 = edge.summary_for(EstimatorKind::SimulationBased);

  const bool ok25 = std::abs(s25.bias[0]) <= 0.02 && s25.rmse[0] >= 0.03 &&
                    s25.rmse[0] <= 0.07 && s25.failed == 0;
  const bool ok45 = s45.bias[0] < 0.0 && s45.rmse[0] >= 0.03 && s45.rmse[0] <= 0.08;
  std::ostringstream detail;
  detail << "d=0.25: bias " << fmt(s25.bias[0]) << ", rmse " << fmt(s25.rmse[0])
         << "; d=0.45: bias " << fmt(s45.bias[0]) << ", rmse " << fmt(s45.rmse[0]);
  return {3, "ARFIMA desk-scale replication study (simulation-based)", ok25 && ok45,
          detail.str()};
}

Criterion criterion_4() {
  Vector theta(3);
  theta << 0.150, 0.5, 0.619;
  ExperimentConfig config =
      base_config(ModelKind::PoissonAr1, theta, WeightFamily::Laplace, 941234);
  config.estimators = {EstimatorKind::SimulationBased, EstimatorKind::ControlVariates};
  const ReplicationSummary summary = run_replications(config);
  const EstimatorSummary& sim = summary.summary_for(EstimatorKind::SimulationBased);
  const EstimatorSummary& cv = summary.summary_for(EstimatorKind::ControlVariates);

  const bool beta_ok = std::abs(cv.bias[0]) <= 0.03;
  const bool sigma_ok = cv.rmse[2] <= 1.10 * sim.rmse[2];
  const double table_bias[3] = {-0.006, 0.005, -0.023};
  bool sim_ok = true;
  for (int i = 0; i < 3; ++i) {
    sim_ok = sim_ok && std::abs(sim.bias[i] - table_bias[i]) <= 0.04;
  }
  std::ostringstream detail;
  detail << "cv bias(beta) " << fmt(cv.bias[0]) << "; rmse(sigma) cv/sim "
         << fmt(cv.rmse[2]) << "/" << fmt(sim.rmse[2]) << "; sim bias ("
         << fmt(sim.bias[0]) << ", " << fmt(sim.bias[1]) << ", " << fmt(sim.bias[2])
         << ")";
  return {4, "Poisson-AR desk-scale replication study (simulation vs cv)",
          beta_ok && sigma_ok && sim_ok, detail.str()};
}

// --- 5. figure-style dominance ------------------------------------------------

Criterion criterion_5() {
  SeedPlan plan{5005};
  CounterStream ts = plan.stream(StreamDomain::TGrid, 0, 0);
  const BlockMatrix grid = weight_sample(WeightSpec{WeightFamily::Laplace, 3}, 500, ts);

  bool all_ok = true;
  std::ostringstream detail;
  struct Setup {
    ModelFamily model;
    Vector theta;
    const char* name;
  };
  std::vector<Setup> setups;
  {
    Vector ar(2);
    ar << 0.5, 1.0;
    setups.push_back({ModelFamily{ModelKind::GaussianAr1}, ar, "ar1"});
    Vector pa(3);
    pa << 0.150, 0.5, 0.619;
    setups.push_back({ModelFamily{ModelKind::PoissonAr1}, pa, "poisson_ar"});
  }
  for (const Setup& setup : setups) {
    const int p = 3;
    const BlockMoments moments = model_moments(setup.model, setup.theta, p);
    std::vector<std::complex<double>> truth;
    if (setup.model.kind == ModelKind::PoissonAr1) {
      truth = reference_chf(setup.model, setup.theta, grid, 1000000, plan);
    } else {
      truth.resize(grid.rows());
      for (long m = 0; m < grid.rows(); ++m) {
        const Vector t = grid.row(m).transpose();
        truth[m] = std::exp(-0.5 * t.dot(moments.cov * t));
      }
    }
    double sum_mc = 0.0, sum_cv = 0.0;
    long used = 0;
    for (int seed = 1; seed <= 50; ++seed) {
      const auto rows = chf_error_diagnostic(setup.model, setup.theta, grid, 3000,
                                             plan, seed, &truth);
      for (const auto& row : rows) {
        if (row.sqrt_var >= 1.0) continue;
        sum_mc += row.xi_mc;
        sum_cv += row.xi_cv;
        ++used;
      }
    }
    const bool ok = used > 0 && sum_cv < sum_mc;
    all_ok = all_ok && ok;
    detail << setup.name << ": mean xi_cv " << fmt(sum_cv / used) << " vs xi_mc "
           << fmt(sum_mc / used) << " (" << used / 50 << " points)  ";
  }
  return {5, "cv dominates mc for small arguments (50 seeds, 500 Laplace t)", all_ok,
          detail.str()};
}

// --- 6. variance reduction -----------------------------------------------------

Criterion criterion_6() {
  SeedPlan plan{6006};
  CounterStream ts = plan.stream(StreamDomain::TGrid, 0, 0);
  const BlockMatrix grid = weight_sample(WeightSpec{WeightFamily::Laplace, 3}, 20, ts);
  ModelFamily model{ModelKind::GaussianAr1};
  Vector theta(2);
  theta << 0.5, 1.0;
  const BlockMoments moments = model_moments(model, theta, 3);

  const int seeds = 200;
  const long M = grid.rows();
  std::vector<double> mc_re(M, 0), mc_re2(M, 0), mc_im(M, 0), mc_im2(M, 0);
  std::vector<double> cv_re(M, 0), cv_re2(M, 0), cv_im(M, 0), cv_im2(M, 0);
  ObjectiveConfig cfg;
  cfg.H = 3000;
  cfg.seed_plan = plan;
  for (int r = 1; r <= seeds; ++r) {
    cfg.replication = static_cast<std::uint64_t>(r);
    const BlockSet sim = simulate_blocks(model, theta, draw_simulation_variates(model, cfg));
    const auto mc = chf_batch(sim, grid);
    const auto cv = cv_chf_batch(sim, grid, moments);
    for (long m = 0; m < M; ++m) {
      mc_re[m] += mc[m].real();
      mc_re2[m] += mc[m].real() * mc[m].real();
      mc_im[m] += mc[m].imag();
      mc_im2[m] += mc[m].imag() * mc[m].imag();
      cv_re[m] += cv[m].value.real();
      cv_re2[m] += cv[m].value.real() * cv[m].value.real();
      cv_im[m] += cv[m].value.imag();
      cv_im2[m] += cv[m].value.imag() * cv[m].value.imag();
    }
  }
  bool ok = true;
  double worst = 0.0;
  auto var_of = [&](const std::vector<double>& s1, const std::vector<double>& s2,
                    long m) {
    const double mean = s1[m] / seeds;
    return s2[m] / seeds - mean * mean;
  };
  for (long m = 0; m < M; ++m) {
    const double ratio_re =
        var_of(cv_re, cv_re2, m) / std::max(var_of(mc_re, mc_re2, m), 1e-300);
    const double ratio_im =
        var_of(cv_im, cv_im2, m) / std::max(var_of(mc_im, mc_im2, m), 1e-300);
    worst = std::max({worst, ratio_re, ratio_im});
    ok = ok && ratio_re <= 1.05 && ratio_im <= 1.05;
  }
  return {6, "cv seed-variance <= 1.05 x mc (20 t, 200 seeds, H=3000)", ok,
          "worst variance ratio " + fmt(worst)};
}

// --- 7. moment oracles ----------------------------------------------------------

Criterion criterion_7() {
  SeedPlan plan{7008};
  const long n = 1000000;
  const int p = 3;
  bool ok = true;
  std::ostringstream detail;

  struct Setup {
    ModelFamily model;
    Vector theta;
    const char* name;
  };
  std::vector<Setup> setups;
  {
    Vector ar(2);
    ar << 0.5, 1.0;
    setups.push_back({ModelFamily{ModelKind::GaussianAr1}, ar, "ar1"});
    Vector af(2);
    af << 0.25, 1.0;
    setups.push_back({ModelFamily{ModelKind::Arfima0d0}, af, "arfima"});
    // theta chosen so every 1%-relative / 0.01-absolute band sits well above
    // the Monte Carlo oracle's own standard error at 10^6 samples
    Vector pa(3);
    pa << 0.15, 0.3, 0.3;
    setups.push_back({ModelFamily{ModelKind::PoissonAr1}, pa, "poisson_ar"});
  }
  int domain = 0;
  for (const Setup& setup : setups) {
    const BlockMoments want = model_moments(setup.model, setup.theta, p);
    CounterStream s = plan.stream(StreamDomain::Reference, domain++, 0);
    Vector mean = Vector::Zero(p);
    Matrix raw = Matrix::Zero(p, p);
    for (long j = 0; j < n; ++j) {
      Vector x(p);
      switch (setup.model.kind) {
        case ModelKind::GaussianAr1:
          x = ar1_block_sample(setup.theta[0], setup.theta[1], p, s);
          break;
        case ModelKind::Arfima0d0:
          x = gaussian_block_sample(want, Innovation::Gaussian, s);
          break;
        case ModelKind::PoissonAr1:
          x = poisson_ar_block_sample(setup.theta[0], setup.theta[1], setup.theta[2],
                                      p, s);
          break;
      }
      mean += x;
      raw += x * x.transpose();
    }
    mean /= static_cast<double>(n);
    const Matrix cov = raw / static_cast<double>(n) - mean * mean.transpose();

    double worst = 0.0;
    auto check_entry = [&](double got, double truth) {
      const double err = std::abs(got - truth);
      const double bound = std::abs(truth) < 0.1 ? 0.01 : 0.01 * std::abs(truth);
      worst = std::max(worst, err / bound);
    };
    for (int i = 0; i < p; ++i) {
      check_entry(mean[i], want.mean[i]);
      for (int j = 0; j < p; ++j) check_entry(cov(i, j), want.cov(i, j));
    }
    ok = ok && worst <= 1.0;
    detail << setup.name << " worst err/bound " << fmt(worst) << "  ";
  }
  return {7, "model moments match 10^6-sample Monte Carlo", ok, detail.str()};
}

// --- 8. byte-identical replicate outputs -----------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return "<missing:" + path + ">";
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Criterion criterion_8() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chfmatch_acceptance8";
  fs::create_directories(dir);
  const fs::path cfg = dir / "experiment.txt";
  {
    std::ofstream f(cfg);
    f << "model = ar1\ntheta0 = 0.5, 1.0\nn = 200\nreplications = 4\n"
         "estimators = simulation, cv\nweight = laplace\nH = 200\nM = 200\n"
         "seed = 4242\n";
  }
  auto run = [&](int threads, const std::string& tag) {
    const std::string prefix = (dir / tag).string();
    const std::string cmd = g_cli_path + " replicate --config " + cfg.string() +
                            " --threads " + std::to_string(threads) + " --out " +
                            prefix + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0 ? prefix : std::string{};
  };
  const std::string a = run(1, "a");
  const std::string b = run(2, "b");
  bool ok = !a.empty() && !b.empty();
  if (ok) {
    ok = slurp(a + "_replications.csv") == slurp(b + "_replications.csv") &&
         slurp(a + "_summary.csv") == slurp(b + "_summary.csv") &&
         slurp(a + "_summary.csv").find("param,") == 0;
  }
  fs::remove_all(dir);
  return {8, "replicate output is byte-identical across --threads", ok,
          ok ? "1 thread == 2 threads" : "outputs differ or cli failed"};
}

// --- 9. consistency smoke ---------------------------------------------------------

Criterion criterion_9() {
  Vector theta(2);
  theta << 0.5, 1.0;
  ExperimentConfig small =
      base_config(ModelKind::GaussianAr1, theta, WeightFamily::Laplace, 990400);
  small.estimators = {EstimatorKind::SimulationBased};
  const ReplicationSummary at400 = run_replications(small);

  ExperimentConfig large = small;
  large.n = 2000;
  large.master_seed = 992000;
  large.objective.seed_plan.master_seed = 992000;
  const ReplicationSummary at2000 = run_replications(large);

  const EstimatorSummary& s400 = at400.summary_for(EstimatorKind::SimulationBased);
  const EstimatorSummary& s2000 = at2000.summary_for(EstimatorKind::SimulationBased);
  const bool shrinks = s2000.rmse[0] < s400.rmse[0];
  const double mean_phi = 0.5 + s2000.bias[0];
  const bool centered = std::abs(mean_phi - 0.5) <= 0.03;
  std::ostringstream detail;
  detail << "rmse(phi) n=400: " << fmt(s400.rmse[0]) << ", n=2000: "
         << fmt(s2000.rmse[0]) << "; mean(phi) at n=2000: " << fmt(mean_phi);
  return {9, "simulation-based rmse shrinks from n=400 to n=2000", shrinks && centered,
          detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  g_cli_path =
      (std::filesystem::path(argv[0]).parent_path() / "chfmatch").string();

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  auto selected = [&](int id) {
    return wanted.empty() ||
           std::find(wanted.begin(), wanted.end(), id) != wanted.end();
  };

  using CriterionFn = Criterion (*)();
  const CriterionFn fns[] = {criterion_1, criterion_2, criterion_3,
                             criterion_4, criterion_5, criterion_6,
                             criterion_7, criterion_8, criterion_9};
  int failures = 0;
  for (int i = 0; i < 9; ++i) {
    if (!selected(i + 1)) continue;
    const Criterion c = fns[i]();
    std::printf("[%s] criterion %d: %s -- %s\n", c.passed ? "PASS" : "FAIL", c.id,
                c.label.c_str(), c.detail.c_str());
    std::fflush(stdout);
    if (!c.passed) ++failures;
  }
  return failures;
}
