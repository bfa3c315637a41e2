// wscl: command line driver for worlds, spectra, training, evaluation,
// bounds and sweeps.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wscl/bounds.hpp"
#include "wscl/error.hpp"
#include "wscl/evaluation.hpp"
#include "wscl/io.hpp"
#include "wscl/joint.hpp"
#include "wscl/spectral.hpp"
#include "wscl/sweep.hpp"
#include "wscl/synthetic.hpp"

namespace {

using namespace wscl;
using io::json;
namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--out", c.out, "Output path (file or directory)");
  cmd->add_option("--seed", c.seed, "Seed override");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

json load_json(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::kConfigInvalid, "--config is required");
  try {
    return json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, path + ": " + e.what());
  }
}

void emit(const Common& c, const std::string& text, const std::string& default_name = "") {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  fs::path p = c.out;
  if (!default_name.empty() && fs::is_directory(p)) p /= default_name;
  io::write_text(p, text);
}

std::string vector_out(const Vector& v, const std::string& name, const std::string& format) {
  if (format == "csv") {
    std::string s = "index," + name + "\n";
    for (Index i = 0; i < v.size(); ++i) s += fmt::format("{},{}\n", i + 1, io::format_double(v[i]));
    return s;
  }
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return json{{name, arr}}.dump(2) + "\n";
}

struct WorldArgs {
  std::string world_dir;
  std::optional<double> gamma;
};

// A world comes from --world <dir> or from a scenario --config.
World obtain_world(const Common& c, const WorldArgs& wa, ScenarioConfig& cfg) {
  if (!wa.world_dir.empty()) {
    World w = io::load_world(wa.world_dir, &cfg);
    if (wa.gamma) {
      cfg.gamma = *wa.gamma;
      realize_noisy_labels(w, make_noise_model(cfg.r, cfg.gamma), derive_seed({cfg.seed, 0x6e6f697365ULL}));
    }
    return w;
  }
  cfg = io::scenario_from_json(load_json(c.config));
  if (c.seed) cfg.seed = *c.seed;
  if (wa.gamma) cfg.gamma = *wa.gamma;
  validate(cfg);
  return gen_block_world(cfg);
}

struct Graphs {
  NormalizedGraph a0;
  NormalizedGraph a_star;
  NoiseModel nm;
};

Graphs build_graphs(const World& w, const ScenarioConfig& cfg) {
  Graphs g;
  g.nm = make_noise_model(cfg.r, cfg.gamma);
  g.a0 = normalize(w.aug_graph);
  const SymmetricGraph edges = world_label_graph(w, g.nm, cfg.label_graph_mode);
  const bool closed = cfg.label_graph_mode == LabelGraphMode::kExpected && w.layout.n_labeled > 0 &&
                      w.posteriors.is_class_balanced();
  g.a_star = closed ? normalize_label_block(edges, w.posteriors, g.nm) : normalize(edges);
  return g;
}

void add_world_args(CLI::App* cmd, WorldArgs& wa) {
  cmd->add_option("--world", wa.world_dir, "World directory written by 'generate'");
  cmd->add_option("--gamma", wa.gamma, "Noise rate override");
}

BoundInputs bound_inputs_from_json(const json& j) {
  BoundInputs bi;
  bi.delta_u = j.value("delta_u", bi.delta_u);
  bi.delta_s = j.value("delta_s", bi.delta_s);
  bi.rho = j.value("rho", bi.rho);
  bi.k = j.value("k", bi.k);
  bi.theta = j.value("theta", bi.theta);
  bi.r = j.value("r", bi.r);
  bi.n_labeled = j.value("n_labeled", bi.n_labeled);
  bi.n_unlabeled = j.value("n_unlabeled", bi.n_unlabeled);
  if (j.contains("gamma")) {
    bi.gamma = j.at("gamma").get<double>();
    bi.alpha = make_noise_model(bi.r, bi.gamma).alpha;
  }
  bi.alpha = j.value("alpha", bi.alpha);
  const auto nu = j.at("nu").get<std::vector<double>>();
  bi.nu = Eigen::Map<const Vector>(nu.data(), static_cast<Index>(nu.size()));
  return bi;
}

int run(int argc, char** argv) {
  CLI::App app{"Weakly supervised spectral contrastive learning laboratory"};
  app.require_subcommand(1);

  Common gen_c, eig_c, mix_c, train_c, eval_c, bound_c, sweep_c;
  WorldArgs eig_w, mix_w, train_w, eval_w;

  auto* gen = app.add_subcommand("generate", "Generate a block world and write it to --out");
  add_common(gen, gen_c);

  auto* eig = app.add_subcommand("eigen", "Spectrum of the normalized augmentation or label graph");
  add_common(eig, eig_c);
  add_world_args(eig, eig_w);
  std::string eig_graph = "aug";
  eig->add_option("--graph", eig_graph, "Which graph")->check(CLI::IsMember({"aug", "label", "predicted"}));

  auto* mix = app.add_subcommand("mix", "Mixed normalized graph (1 - theta) A0 + theta A*");
  add_common(mix, mix_c);
  add_world_args(mix, mix_w);
  double mix_theta = 0.5;
  mix->add_option("--theta", mix_theta, "Mixture weight");

  auto* train = app.add_subcommand("train", "Factorize the mixed graph");
  add_common(train, train_c);
  add_world_args(train, train_w);
  double train_theta = 0.5;
  int train_k = 2;
  std::string method = "exact";
  TrainConfig tcfg;
  train->add_option("--theta", train_theta, "Mixture weight");
  train->add_option("--k", train_k, "Embedding dimension");
  train->add_option("--method", method, "exact or gd")->check(CLI::IsMember({"exact", "gd"}));
  train->add_option("--step", tcfg.step_size, "Step size");
  train->add_option("--max-iters", tcfg.max_iters, "Iteration cap");
  train->add_option("--grad-tol", tcfg.grad_tol, "Gradient norm tolerance");

  auto* eval = app.add_subcommand("evaluate", "Fit a probe on the exact factor and report errors");
  add_common(eval, eval_c);
  add_world_args(eval, eval_w);
  double eval_theta = 0.5;
  int eval_k = 2;
  double ridge = 1e-8;
  eval->add_option("--theta", eval_theta, "Mixture weight");
  eval->add_option("--k", eval_k, "Embedding dimension");
  eval->add_option("--ridge", ridge, "Probe ridge");

  auto* bound = app.add_subcommand("bound", "Evaluate an error bound from a JSON input record");
  add_common(bound, bound_c);
  std::string kind = "noisy";
  bound->add_option("--kind", kind, "Bound to evaluate")
      ->check(CLI::IsMember({"noisy", "semi", "threshold", "finite", "argmin"}));

  auto* sweep = app.add_subcommand("sweep", "Run a theta/gamma/k sweep");
  add_common(sweep, sweep_c);
  std::optional<int> threads;
  sweep->add_option("--threads", threads, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    ScenarioConfig cfg = io::scenario_from_json(load_json(gen_c.config));
    if (gen_c.seed) cfg.seed = *gen_c.seed;
    if (gen_c.out.empty()) throw Error(ErrorCode::kConfigInvalid, "generate needs --out <dir>");
    const World w = gen_block_world(cfg);
    io::save_world(gen_c.out, w, cfg);
    std::cout << fmt::format("world n={} naturals={} n_labeled={} sha256={}\n", w.n(), w.naturals(),
                             w.layout.n_labeled, io::world_content_hash(w));
  } else if (eig->parsed()) {
    ScenarioConfig cfg;
    const World w = obtain_world(eig_c, eig_w, cfg);
    const Graphs g = build_graphs(w, cfg);
    Vector values;
    if (eig_graph == "aug") values = eigh(g.a0.matrix).values;
    else if (eig_graph == "label") values = eigh(g.a_star.matrix).values;
    else values = predict_label_spectrum(w.posteriors, g.nm, w.layout);
    emit(eig_c, vector_out(values, "eigenvalues", eig_c.format), "eigen." + eig_c.format);
  } else if (mix->parsed()) {
    ScenarioConfig cfg;
    const World w = obtain_world(mix_c, mix_w, cfg);
    const Graphs g = build_graphs(w, cfg);
    const NormalizedGraph m = mix_graphs(g.a0, g.a_star, mix_theta);
    const std::string text = mix_c.format == "csv" ? io::matrix_to_csv(m.matrix)
                                                   : io::graph_to_json(SymmetricGraph(m.matrix)).dump() + "\n";
    emit(mix_c, text, "mixed." + mix_c.format);
  } else if (train->parsed()) {
    ScenarioConfig cfg;
    const World w = obtain_world(train_c, train_w, cfg);
    const Graphs g = build_graphs(w, cfg);
    if (train_c.seed) tcfg.seed = *train_c.seed;
    TrainOutcome out;
    if (method == "exact") {
      const NormalizedGraph m = mix_graphs(g.a0, g.a_star, train_theta);
      out.factor = top_k_factor(m, train_k);
      out.loss = joint_mf_loss(out.factor, g.a0, g.a_star, train_theta);
      out.converged = true;
    } else {
      out = gd_train_joint(g.a0, g.a_star, train_theta, train_k, tcfg);
    }
    if (!train_c.out.empty()) io::save_factor(train_c.out, out, tcfg.seed);
    std::cout << json{{"n", out.factor.n()}, {"k", out.factor.k()}, {"loss", io::number(out.loss)},
                      {"iters", out.iters}, {"converged", out.converged}}
                     .dump(2)
              << "\n";
  } else if (eval->parsed()) {
    ScenarioConfig cfg;
    const World w = obtain_world(eval_c, eval_w, cfg);
    const Graphs g = build_graphs(w, cfg);
    const NormalizedGraph m = mix_graphs(g.a0, g.a_star, eval_theta);
    const FactorMatrix fm = top_k_factor(m, eval_k);
    const EvalReport rep = evaluate(fm, w, eigh(g.a0.matrix).values, eval_theta, ridge);
    std::string text;
    if (eval_c.format == "csv") {
      text = "E,vote_error,delta_u,delta_s,probe_norm,norm_cap,gate\n" +
             fmt::format("{},{},{},{},{},{},{}\n", io::format_double(rep.per_aug_error),
                         io::format_double(rep.natural_vote_error), io::format_double(rep.delta_u),
                         io::format_double(rep.delta_s), io::format_double(rep.probe_norm),
                         io::format_double(rep.theorem_norm_cap), rep.gate ? 1 : 0);
    } else {
      text = io::eval_report_to_json(rep).dump(2) + "\n";
    }
    emit(eval_c, text, "eval." + eval_c.format);
  } else if (bound->parsed()) {
    const json j = load_json(bound_c.config);
    const BoundInputs bi = bound_inputs_from_json(j);
    std::string text;
    if (kind == "threshold") {
      text = json{{"gamma_threshold", gamma_threshold(bi)}}.dump(2) + "\n";
    } else if (kind == "argmin") {
      const auto grid = j.value("theta_grid", std::vector<double>{0.0, 0.5, 1.0});
      const EndpointResult res = endpoint_argmin(bi, grid);
      if (bound_c.format == "csv") {
        text = "theta,gamma,k,bound,active_term\n";
        BoundInputs cur = bi;
        for (double t : grid) {
          cur.theta = t;
          const BoundReport rep = noisy_bound(cur);
          text += fmt::format("{},{},{},{},{}\n", io::format_double(t), io::format_double(bi.gamma), bi.k,
                              io::format_double(rep.value), rep.active_term);
        }
      } else {
        text = json{{"theta_star", res.theta_star}, {"values", res.values},
                    {"interior_violation", res.interior_violation}}
                   .dump(2) +
               "\n";
      }
    } else {
      BoundReport rep;
      if (kind == "noisy") {
        rep = noisy_bound(bi);
      } else if (kind == "semi") {
        rep = semi_bound(bi);
      } else {
        FiniteSampleInputs fsi;
        fsi.rademacher = j.value("rademacher", fsi.rademacher);
        fsi.kappa = j.value("kappa", fsi.kappa);
        fsi.epsilon = j.value("epsilon", fsi.epsilon);
        if (j.contains("n")) fsi.n = j.at("n").get<double>();
        fsi.failure_prob = j.value("failure_prob", fsi.failure_prob);
        if (j.contains("c1")) fsi.c1 = j.at("c1").get<double>();
        if (j.contains("c2")) fsi.c2 = j.at("c2").get<double>();
        rep = finite_sample_bound(bi, fsi, j.value("k_prime_min", Index{1}), j.value("k_prime_max", bi.k)).report;
      }
      if (bound_c.format == "csv") {
        text = "theta,gamma,k,bound,active_term\n" +
               fmt::format("{},{},{},{},{}\n", io::format_double(bi.theta), io::format_double(bi.gamma), bi.k,
                           io::format_double(rep.value), rep.active_term);
      } else {
        text = io::bound_report_to_json(rep).dump(2) + "\n";
      }
    }
    emit(bound_c, text, "bound." + bound_c.format);
  } else if (sweep->parsed()) {
    SweepConfig cfg = sweep_config_from_json(load_json(sweep_c.config));
    if (!sweep_c.out.empty()) cfg.output_dir = sweep_c.out;
    if (sweep_c.seed) cfg.master_seed = *sweep_c.seed;
    if (threads) cfg.threads = *threads;
    const SweepResult res = run_sweep(cfg);
    if (cfg.output_dir.empty()) {
      std::cout << (sweep_c.format == "csv" ? res.results_csv : res.summary_csv);
    } else {
      std::cout << fmt::format("{} rows, {} cells ({} resumed), {:.2f} s -> {}\n", res.rows.size(),
                               res.cells_total, res.cells_resumed, res.seconds, cfg.output_dir);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const wscl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
