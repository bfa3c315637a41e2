// Python bindings: plain functions over numpy arrays plus the sweep entry point.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wscl/bounds.hpp"
#include "wscl/error.hpp"
#include "wscl/evaluation.hpp"
#include "wscl/joint.hpp"
#include "wscl/label_model.hpp"
#include "wscl/spectral.hpp"
#include "wscl/sweep.hpp"
#include "wscl/synthetic.hpp"

namespace py = pybind11;
using namespace wscl;

namespace {

BoundInputs make_inputs(double delta_u, double delta_s, double rho, const Vector& nu, Index k, double theta,
                        double gamma, int r) {
  BoundInputs bi;
  bi.delta_u = delta_u;
  bi.delta_s = delta_s;
  bi.rho = rho;
  bi.nu = nu;
  bi.k = k;
  bi.theta = theta;
  bi.r = r;
  bi.gamma = gamma;
  bi.alpha = make_noise_model(r, gamma).alpha;
  return bi;
}

// Borrowed from the module, which outlives every translated call.
PyObject* g_error_type = nullptr;

py::dict world_to_dict(const World& w) {
  py::dict d;
  d["aug_graph"] = w.aug_graph.weights();
  d["aug_dist"] = w.aug_dist;
  d["natural_prior"] = w.natural_prior;
  d["natural_of"] = w.natural_of;
  d["label_of_natural"] = w.label_of_natural;
  d["posteriors"] = w.posteriors.eta();
  d["n_labeled"] = w.layout.n_labeled;
  d["n_unlabeled"] = w.layout.n_unlabeled;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wscl, m) {
  m.doc() = "Spectral contrastive learning with noisy label graphs";

  g_error_type = py::exception<Error>(m, "WsclError", PyExc_RuntimeError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(g_error_type)(e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(g_error_type, exc.ptr());
    }
  });

  m.def("noise_coefficients", [](int r, double gamma) {
    const NoiseModel nm = make_noise_model(r, gamma);
    return py::make_tuple(nm.alpha, nm.beta);
  }, py::arg("r"), py::arg("gamma"), "(alpha, beta) of symmetric label noise.");

  m.def("normalize", [](const Matrix& w) { return normalize(SymmetricGraph(w)).matrix; }, py::arg("weights"),
        "D^{-1/2} W D^{-1/2} of a symmetric nonnegative weight matrix.");

  m.def("eigh", [](const Matrix& a) {
    const Spectrum s = eigh(a);
    return py::make_tuple(s.values, s.vectors);
  }, py::arg("matrix"), "Descending eigenvalues and eigenvectors of a symmetric matrix.");

  m.def("label_graph", [](const Matrix& eta, int r, double gamma) {
    return noisy_label_graph(PosteriorMatrix(eta), make_noise_model(r, gamma)).weights();
  }, py::arg("posteriors"), py::arg("r"), py::arg("gamma"), "Noisy label graph Y T^2 Y^T.");

  m.def("closed_form_label_graph", [](const Matrix& eta, int r, double gamma, Index n_unlabeled) {
    const PosteriorMatrix y(eta);
    return lemma41_closed_form(y, make_noise_model(r, gamma), {y.n_labeled(), n_unlabeled}).matrix;
  }, py::arg("posteriors"), py::arg("r"), py::arg("gamma"), py::arg("n_unlabeled") = 0,
        "Normalized semi-supervised label graph from the class-balanced closed form.");

  m.def("predict_label_spectrum", [](const Matrix& eta, int r, double gamma, Index n_unlabeled) {
    const PosteriorMatrix y(eta);
    return predict_label_spectrum(y, make_noise_model(r, gamma), {y.n_labeled(), n_unlabeled});
  }, py::arg("posteriors"), py::arg("r"), py::arg("gamma"), py::arg("n_unlabeled") = 0);

  m.def("mix", [](const Matrix& a0, const Matrix& a_star, double theta) {
    const Index n = a0.rows();
    const DegreeVector ones(Vector::Ones(n));
    return mix_graphs(NormalizedGraph{a0, ones}, NormalizedGraph{a_star, ones}, theta).matrix;
  }, py::arg("a0"), py::arg("a_star"), py::arg("theta"), "(1 - theta) a0 + theta a_star.");

  m.def("top_k_factor", [](const Matrix& normalized, Index k) {
    const Index n = normalized.rows();
    return top_k_factor(NormalizedGraph{normalized, DegreeVector(Vector::Ones(n))}, k).f;
  }, py::arg("normalized"), py::arg("k"), "Best rank-k PSD factor F with F F^T closest to the matrix.");

  m.def("mf_loss", [](const Matrix& f, const Matrix& normalized) {
    const DegreeVector ones(Vector::Ones(f.rows()));
    return matrix_factorization_loss(FactorMatrix{f, ones}, NormalizedGraph{normalized, ones});
  }, py::arg("f"), py::arg("normalized"), "|A - F F^T|_F^2.");

  m.def("gd_train", [](const Matrix& normalized, Index k, std::uint64_t seed, int max_iters) {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = max_iters;
    const Index n = normalized.rows();
    const TrainOutcome out = gd_train(NormalizedGraph{normalized, DegreeVector(Vector::Ones(n))}, k, cfg);
    return py::make_tuple(out.factor.f, out.loss, out.iters, out.converged);
  }, py::arg("normalized"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 20000,
        "Gradient descent on the factorization loss: (F, loss, iters, converged).");

  m.def("noisy_bound", [](double du, double ds, double rho, const Vector& nu, Index k, double theta, double gamma,
                          int r) { return noisy_bound(make_inputs(du, ds, rho, nu, k, theta, gamma, r)).value; },
        py::arg("delta_u"), py::arg("delta_s"), py::arg("rho"), py::arg("nu"), py::arg("k"), py::arg("theta"),
        py::arg("gamma"), py::arg("r"));

  m.def("semi_bound", [](double du, double ds, double rho, const Vector& nu, Index k, double theta) {
    return semi_bound(make_inputs(du, ds, rho, nu, k, theta, 0.0, 2)).value;
  }, py::arg("delta_u"), py::arg("delta_s"), py::arg("rho"), py::arg("nu"), py::arg("k"), py::arg("theta"));

  m.def("gamma_threshold", [](double du, double ds, double rho, const Vector& nu, Index k, int r) {
    return gamma_threshold(make_inputs(du, ds, rho, nu, k, 0.0, 0.0, r));
  }, py::arg("delta_u"), py::arg("delta_s"), py::arg("rho"), py::arg("nu"), py::arg("k"), py::arg("r"));

  m.def("generate_world", [](int r, int naturals_per_class, int augs_per_natural, double p_in, double p_out,
                             double jitter, double labeled_fraction, double gamma, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.r = r;
    cfg.naturals_per_class = naturals_per_class;
    cfg.augs_per_natural = augs_per_natural;
    cfg.intra_class_overlap = p_in;
    cfg.inter_class_overlap = p_out;
    cfg.overlap_jitter = jitter;
    cfg.labeled_fraction = labeled_fraction;
    cfg.gamma = gamma;
    cfg.seed = seed;
    return world_to_dict(gen_block_world(cfg));
  }, py::arg("r") = 2, py::arg("naturals_per_class") = 2, py::arg("augs_per_natural") = 2, py::arg("p_in") = 0.0,
        py::arg("p_out") = 0.0, py::arg("jitter") = 0.0, py::arg("labeled_fraction") = 1.0,
        py::arg("gamma") = 0.0, py::arg("seed") = 0, "Synthetic block world as a dict of arrays.");

  m.def("run_sweep_json", [](const std::string& config_json) {
    const SweepResult res = run_sweep(sweep_config_from_json(nlohmann::json::parse(config_json)));
    return py::make_tuple(res.results_csv, res.summary_csv);
  }, py::arg("config_json"), "Runs a sweep from its JSON config and returns (results_csv, summary_csv).");
}
