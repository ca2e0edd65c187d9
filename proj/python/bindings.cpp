#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvnn/activations.hpp"
#include "cvnn/capacity.hpp"
#include "cvnn/complex_core.hpp"
#include "cvnn/datasets.hpp"
#include "cvnn/experiment.hpp"
#include "cvnn/training.hpp"

namespace py = pybind11;
using namespace cvnn;

namespace {

ComplexTensor from_numpy(const Eigen::MatrixXcd& m) { return ComplexTensor(m.real(), m.imag()); }

Eigen::MatrixXcd to_numpy(const ComplexTensor& t) {
    Eigen::MatrixXcd out(t.rows(), t.cols());
    out.real() = t.re();
    out.imag() = t.im();
    return out;
}

py::dict plan_dict(const NetworkPlan& p) {
    py::dict d;
    d["domain"] = std::string(domain_name(p.domain));
    d["input_dim"] = p.input_dim;
    d["widths"] = p.hidden_widths;
    d["output_dim"] = p.output_dim;
    const PlanCounts c = plan_counts(p);
    d["params"] = c.without_bias;
    d["params_with_bias"] = c.with_bias;
    return d;
}

py::dict pair_dict(const MatchedPair& pair) {
    py::dict d;
    d["real"] = plan_dict(pair.real);
    d["complex"] = plan_dict(pair.complex);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "complex-valued MLP core";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<PoleError>(m, "PoleError", PyExc_OverflowError);
    py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_RuntimeError);

    m.def(
        "count_mlp_params",
        [](const std::string& domain, Count n, std::vector<Count> widths, Count c, bool bias) {
            return count_mlp_params(NetworkPlan{parse_domain(domain), n, std::move(widths), c, bias});
        },
        py::arg("domain"), py::arg("n"), py::arg("widths"), py::arg("c"), py::arg("bias") = false);
    m.def(
        "alternating_widths",
        [](Count width, int k, const std::string& domain) { return alternating_widths(width, k, parse_domain(domain)); },
        py::arg("m"), py::arg("k"), py::arg("domain"));
    m.def("budget_width_real", &budget_width_real, py::arg("p"), py::arg("n"), py::arg("c"), py::arg("k"));
    m.def("budget_width_complex", &budget_width_complex, py::arg("p"), py::arg("n"), py::arg("c"), py::arg("k"));
    m.def(
        "build_fixed_pair", [](Count n, Count c, Count width, int k) { return pair_dict(build_fixed_pair(n, c, width, k)); },
        py::arg("n"), py::arg("c"), py::arg("m"), py::arg("k"));
    m.def(
        "build_budget_pair", [](Count n, Count c, Count p, int k) { return pair_dict(build_budget_pair(n, c, p, k)); },
        py::arg("n"), py::arg("c"), py::arg("p"), py::arg("k"));

    m.def(
        "cmatmul",
        [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& w) { return to_numpy(cmatmul(from_numpy(x), from_numpy(w))); },
        py::arg("x"), py::arg("w"));
    m.def(
        "activate",
        [](const std::string& name, const Eigen::MatrixXcd& z) {
            return to_numpy(activate(parse_activation(name), from_numpy(z)));
        },
        py::arg("name"), py::arg("z"));

    m.def(
        "gen_synthetic",
        [](const std::string& mode, Eigen::Index n_samples, Eigen::Index d, double sigma, double origin_radius,
           std::uint64_t seed) {
            SyntheticSpec spec;
            spec.mode = mode == "complex" ? SyntheticMode::complex : SyntheticMode::real_projection;
            if (mode != "complex" && mode != "real") throw ValidationError("mode must be complex or real");
            spec.n_samples = n_samples;
            spec.d = d;
            spec.sigma = sigma;
            spec.origin_radius = origin_radius;
            spec.seed = seed;
            const Dataset ds = gen_synthetic(spec);
            py::dict out;
            out["x_train"] = to_numpy(ds.x_train);
            out["x_test"] = to_numpy(ds.x_test);
            out["y_train"] = ds.y_train;
            out["y_test"] = ds.y_test;
            out["metadata"] = ds.metadata;
            return out;
        },
        py::arg("mode") = "complex", py::arg("n_samples") = 10000, py::arg("d") = 25, py::arg("sigma") = 0.2,
        py::arg("origin_radius") = SyntheticSpec{}.origin_radius, py::arg("seed") = 0);

    py::class_<EpochDiagnostics>(m, "EpochDiagnostics")
        .def(py::init<>())
        .def_readwrite("epoch", &EpochDiagnostics::epoch)
        .def_readwrite("train_loss", &EpochDiagnostics::train_loss)
        .def_readwrite("train_acc", &EpochDiagnostics::train_acc)
        .def_readwrite("test_acc", &EpochDiagnostics::test_acc)
        .def_readwrite("mean_abs_re", &EpochDiagnostics::mean_abs_re)
        .def_readwrite("mean_abs_im", &EpochDiagnostics::mean_abs_im)
        .def_readwrite("mean_magnitude", &EpochDiagnostics::mean_magnitude);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("seed", &RunResult::seed)
        .def_readonly("final_test_acc", &RunResult::final_test_acc)
        .def_readonly("final_train_acc", &RunResult::final_train_acc)
        .def_readonly("diagnostics", &RunResult::diagnostics)
        .def_readonly("failed", &RunResult::failed)
        .def_readonly("failure", &RunResult::failure);

    m.def(
        "train_run",
        [](const std::string& domain, int k, Count width, const std::string& activation, const std::string& dataset,
           int epochs, std::uint64_t seed, Eigen::Index n_samples) {
            ExperimentConfig cfg;
            cfg.dataset = dataset;
            cfg.domain = domain;
            cfg.k = k;
            cfg.m = width;
            cfg.activation = activation;
            cfg.epochs = epochs;
            cfg.n_samples = n_samples;
            const NetworkPlan plan = experiment_plans(cfg).front();
            const Dataset data = load_experiment_data(cfg);
            ModelSpec spec;
            spec.plan = plan;
            spec.hidden = parse_activation(cfg.activation);
            spec.head = parse_activation(cfg.head);
            spec.init.scheme = plan.domain == Domain::complex ? cfg.init_scheme : InitScheme::real_glorot;
            TrainConfig tc;
            tc.epochs = epochs;
            py::gil_scoped_release release;
            return train_run(spec, data, tc, seed);
        },
        py::arg("domain") = "complex", py::arg("k") = 2, py::arg("m") = 64, py::arg("activation") = "relu",
        py::arg("dataset") = "synthetic_complex", py::arg("epochs") = 5, py::arg("seed") = 0,
        py::arg("n_samples") = 10000);

    m.def(
        "follow_score",
        [](const std::vector<EpochDiagnostics>& trajectory) {
            const FollowScore f = follow_score(trajectory);
            py::dict d;
            d["delta_correlation"] = f.delta_correlation ? py::cast(*f.delta_correlation) : py::none();
            d["convergence_lag"] = f.convergence_lag ? py::cast(*f.convergence_lag) : py::none();
            return d;
        },
        py::arg("trajectory"));

    m.def(
        "plan_only",
        [](const std::map<std::string, std::string>& settings) {
            ExperimentConfig cfg;
            for (const auto& [key, value] : settings) cfg.set(key, value);
            return plan_only(cfg);
        },
        py::arg("settings"));
}
