#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chfmatch/harness.hpp"

namespace py = pybind11;
using namespace chfmatch;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parameter estimation for stationary time series by matching "
            "empirical and simulated characteristic functions";

  py::register_exception<mean_overflow_error>(m, "MeanOverflowError");
  py::register_exception<non_pd_error>(m, "NonPDError");

  py::enum_<ModelKind>(m, "ModelKind")
      .value("GaussianAr1", ModelKind::GaussianAr1)
      .value("Arfima0d0", ModelKind::Arfima0d0)
      .value("PoissonAr1", ModelKind::PoissonAr1);

  py::enum_<Innovation>(m, "Innovation")
      .value("Gaussian", Innovation::Gaussian)
      .value("Laplace", Innovation::Laplace)
      .value("StudentT6", Innovation::StudentT6);

  py::enum_<WeightFamily>(m, "WeightFamily")
      .value("Laplace", WeightFamily::Laplace)
      .value("Cauchy", WeightFamily::Cauchy)
      .value("Gaussian", WeightFamily::Gaussian);

  py::enum_<EstimatorKind>(m, "EstimatorKind")
      .value("Oracle", EstimatorKind::Oracle)
      .value("SimulationBased", EstimatorKind::SimulationBased)
      .value("ControlVariates", EstimatorKind::ControlVariates);

  py::enum_<BlockKind>(m, "BlockKind")
      .value("Observed", BlockKind::Observed)
      .value("Simulated", BlockKind::Simulated);

  py::class_<ModelFamily>(m, "ModelFamily")
      .def(py::init<>())
      .def(py::init([](ModelKind kind, Innovation innovation) {
             return ModelFamily{kind, innovation};
           }),
           py::arg("kind"), py::arg("innovation") = Innovation::Gaussian)
      .def_readwrite("kind", &ModelFamily::kind)
      .def_readwrite("innovation", &ModelFamily::innovation);

  py::class_<ParameterVector>(m, "ParameterVector")
      .def(py::init<>())
      .def_readwrite("values", &ParameterVector::values)
      .def_readwrite("lower", &ParameterVector::lower)
      .def_readwrite("upper", &ParameterVector::upper);

  py::class_<BlockSet>(m, "BlockSet")
      .def(py::init<>())
      .def_readwrite("data", &BlockSet::data)
      .def_readwrite("kind", &BlockSet::kind)
      .def_property_readonly("p", &BlockSet::p)
      .def_property_readonly("count", &BlockSet::count);

  py::class_<BlockMoments>(m, "BlockMoments")
      .def(py::init<>())
      .def_readwrite("mean", &BlockMoments::mean)
      .def_readwrite("cov", &BlockMoments::cov);

  py::class_<WeightSpec>(m, "WeightSpec")
      .def(py::init([](WeightFamily family, int dimension) {
             return WeightSpec{family, dimension};
           }),
           py::arg("family"), py::arg("dimension") = 3)
      .def_readwrite("family", &WeightSpec::family)
      .def_readwrite("dimension", &WeightSpec::dimension);

  py::class_<SeedPlan>(m, "SeedPlan")
      .def(py::init([](std::uint64_t seed) { return SeedPlan{seed}; }),
           py::arg("master_seed") = 0)
      .def_readwrite("master_seed", &SeedPlan::master_seed);

  py::class_<ObjectiveConfig>(m, "ObjectiveConfig")
      .def(py::init<>())
      .def_readwrite("p", &ObjectiveConfig::p)
      .def_readwrite("H", &ObjectiveConfig::H)
      .def_readwrite("weight", &ObjectiveConfig::weight)
      .def_readwrite("k", &ObjectiveConfig::k)
      .def_readwrite("M", &ObjectiveConfig::M)
      .def_readwrite("seed_plan", &ObjectiveConfig::seed_plan)
      .def_readwrite("variance_floor", &ObjectiveConfig::variance_floor)
      .def_readwrite("replication", &ObjectiveConfig::replication);

  py::class_<EstimationResult>(m, "EstimationResult")
      .def_readonly("theta_hat", &EstimationResult::theta_hat)
      .def_readonly("objective_value", &EstimationResult::objective_value)
      .def_readonly("evaluations", &EstimationResult::evaluations)
      .def_readonly("converged", &EstimationResult::converged)
      .def_readonly("master_seed", &EstimationResult::master_seed);

  py::class_<CvDiagnostics>(m, "CvDiagnostics")
      .def_readonly("beta_hat", &CvDiagnostics::beta_hat)
      .def_readonly("control_mean", &CvDiagnostics::control_mean)
      .def_readonly("gram_condition", &CvDiagnostics::gram_condition)
      .def_readonly("fallback_used", &CvDiagnostics::fallback_used);

  py::class_<EmpiricalCovariance>(m, "EmpiricalCovariance")
      .def_readonly("gamma_hat", &EmpiricalCovariance::gamma_hat)
      .def_readonly("mu_hat", &EmpiricalCovariance::mu_hat)
      .def("toeplitz", &EmpiricalCovariance::toeplitz);

  // models
  m.def("make_blocks", &make_blocks, py::arg("series"), py::arg("p"));
  m.def("ar1_covariance", &ar1_covariance, py::arg("phi"), py::arg("sigma"),
        py::arg("p"));
  m.def("arfima_covariance", &arfima_covariance, py::arg("d"), py::arg("sigma"),
        py::arg("p"));
  m.def("poisson_ar_moments", &poisson_ar_moments, py::arg("beta"), py::arg("phi"),
        py::arg("sigma"), py::arg("p"));
  m.def("index_of_dispersion", &index_of_dispersion, py::arg("beta"),
        py::arg("phi"), py::arg("sigma"));
  m.def(
      "simulate_path",
      [](const ModelFamily& model, const Vector& theta, int length,
         std::uint64_t seed, std::uint64_t replication) {
        CounterStream stream =
            SeedPlan{seed}.stream(StreamDomain::DataPath, replication, 0);
        return simulate_path(model, theta, length, stream);
      },
      py::arg("model"), py::arg("theta"), py::arg("length"), py::arg("seed") = 1,
      py::arg("replication") = 1);

  // weights
  m.def("weight_fourier", &weight_fourier, py::arg("spec"), py::arg("x"));
  m.def(
      "weight_sample",
      [](const WeightSpec& spec, long count, std::uint64_t seed) {
        CounterStream stream = SeedPlan{seed}.stream(StreamDomain::TGrid, 0, 0);
        return weight_sample(spec, count, stream);
      },
      py::arg("spec"), py::arg("count"), py::arg("seed") = 1);

  // chf
  m.def("empirical_chf", &empirical_chf, py::arg("blocks"), py::arg("t"));
  m.def("mc_chf", &mc_chf, py::arg("sim_blocks"), py::arg("t"));
  m.def("control_values", &control_values, py::arg("t"), py::arg("block_row"),
        py::arg("moments"));
  m.def(
      "cv_chf",
      [](const BlockSet& sim, const Vector& t, const BlockMoments& moments) {
        const CvChfResult r = cv_chf(sim, t, moments);
        return py::make_tuple(r.value, r.diagnostics);
      },
      py::arg("sim_blocks"), py::arg("t"), py::arg("moments"));

  // estimators
  m.def("empirical_covariance", &empirical_covariance, py::arg("series"),
        py::arg("p"));
  m.def("q_nh", &q_nh, py::arg("obs_blocks"), py::arg("sim_blocks"),
        py::arg("weight"));
  m.def("q_oracle_gaussian", &q_oracle_gaussian, py::arg("obs_blocks"),
        py::arg("gamma"));
  m.def("q_cv", &q_cv, py::arg("obs_blocks"), py::arg("theta"), py::arg("model"),
        py::arg("config"), py::arg("emp_cov"), py::arg("t_grid"));
  m.def("estimate", &estimate, py::arg("series"), py::arg("model"),
        py::arg("estimator"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  // harness
  m.def(
      "chf_error_diagnostic",
      [](const ModelFamily& model, const Vector& theta, const WeightSpec& weight,
         int count, int H, std::uint64_t seed) {
        const auto rows =
            chf_error_diagnostic(model, theta, weight, count, H, SeedPlan{seed});
        BlockMatrix out(static_cast<long>(rows.size()), 3);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          out(static_cast<long>(i), 0) = rows[i].sqrt_var;
          out(static_cast<long>(i), 1) = rows[i].xi_mc;
          out(static_cast<long>(i), 2) = rows[i].xi_cv;
        }
        return out;
      },
      py::arg("model"), py::arg("theta"), py::arg("weight"), py::arg("count"),
      py::arg("H"), py::arg("seed") = 1,
      py::call_guard<py::gil_scoped_release>());
}
