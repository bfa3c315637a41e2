#include "wscl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "wscl/bounds.hpp"
#include "wscl/error.hpp"
#include "wscl/evaluation.hpp"
#include "wscl/io.hpp"
#include "wscl/joint.hpp"
#include "wscl/rng.hpp"
#include "wscl/spectral.hpp"

namespace wscl {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kResultsHeader =
    "replicate,seed,gamma,theta,k,E,vote_error,delta_u,delta_s,probe_norm,norm_cap,bound,gate";
const char* const kSummaryHeader =
    "gamma,k,best_theta,err_theta0,err_theta1,min_over_grid,baseline_gap,mean_replicate_gap";

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::kConfigInvalid, why); }

}  // namespace

SweepConfig normalized(const SweepConfig& cfg) {
  SweepConfig out = cfg;
  validate(out.scenario);
  if (out.theta_grid.empty()) invalid("theta_grid is empty");
  if (out.gamma_grid.empty()) invalid("gamma_grid is empty");
  if (out.k_grid.empty()) invalid("k_grid is empty");
  if (out.replicates < 1) invalid("replicates must be >= 1");
  if (out.threads < 1) invalid("threads must be >= 1");
  if (!(out.ridge >= 0.0)) invalid("ridge must be >= 0");
  for (double t : out.theta_grid) {
    if (!(t >= 0.0 && t <= 1.0)) invalid(fmt::format("theta {} outside [0, 1]", t));
  }
  const double limit = static_cast<double>(out.scenario.r - 1) / out.scenario.r;
  for (double g : out.gamma_grid) {
    if (!(g >= 0.0 && g < limit)) invalid(fmt::format("gamma {} outside [0, {})", g, limit));
  }
  const int n = out.scenario.augmented();
  for (int k : out.k_grid) {
    if (k < 1 || k > n) invalid(fmt::format("k {} outside [1, {}]", k, n));
  }
  out.theta_grid.push_back(0.0);
  out.theta_grid.push_back(1.0);
  std::sort(out.theta_grid.begin(), out.theta_grid.end());
  out.theta_grid.erase(std::unique(out.theta_grid.begin(), out.theta_grid.end()), out.theta_grid.end());
  return out;
}

SweepConfig sweep_config_from_json(const json& j) {
  if (!j.is_object()) invalid("sweep config must be a JSON object");
  static const char* const known[] = {"scenario", "theta_grid", "gamma_grid", "k_grid", "master_seed",
                                      "replicates", "output_dir", "threads", "ridge"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      invalid("unknown sweep key '" + key + "'");
    }
  }
  SweepConfig cfg;
  try {
    cfg.scenario = io::scenario_from_json(j.at("scenario"));
    cfg.theta_grid = j.at("theta_grid").get<std::vector<double>>();
    cfg.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
    cfg.k_grid = j.at("k_grid").get<std::vector<int>>();
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.ridge = j.value("ridge", cfg.ridge);
  } catch (const json::exception& e) {
    invalid(std::string("sweep config: ") + e.what());
  }
  return normalized(cfg);
}

json sweep_config_to_json(const SweepConfig& cfg) {
  return json{{"scenario", io::scenario_to_json(cfg.scenario)},
              {"theta_grid", cfg.theta_grid},
              {"gamma_grid", cfg.gamma_grid},
              {"k_grid", cfg.k_grid},
              {"master_seed", cfg.master_seed},
              {"replicates", cfg.replicates},
              {"output_dir", cfg.output_dir},
              {"threads", cfg.threads},
              {"ridge", cfg.ridge}};
}

std::vector<SweepRow> run_cell(const SweepConfig& cfg, int replicate, int gamma_index) {
  const double gamma = cfg.gamma_grid.at(static_cast<std::size_t>(gamma_index));
  ScenarioConfig sc = cfg.scenario;
  sc.seed = derive_seed({cfg.master_seed, static_cast<std::uint64_t>(replicate)});
  sc.gamma = gamma;
  World w = gen_block_world(sc);
  const NoiseModel nm = make_noise_model(sc.r, gamma);
  realize_noisy_labels(w, nm,
                       derive_seed({cfg.master_seed, static_cast<std::uint64_t>(replicate),
                                    static_cast<std::uint64_t>(gamma_index)}));

  const NormalizedGraph a0 = normalize(w.aug_graph);
  const Vector nu = eigh(a0.matrix).values;
  const SymmetricGraph a_star_edges = world_label_graph(w, nm, sc.label_graph_mode);
  const bool closed_form = sc.label_graph_mode == LabelGraphMode::kExpected &&
                           w.layout.n_labeled > 0 && w.posteriors.is_class_balanced();
  const NormalizedGraph a_star =
      closed_form ? normalize_label_block(a_star_edges, w.posteriors, nm) : normalize(a_star_edges);

  const Deltas d = compute_deltas(w, bayes_labeler(w));
  const double rho = compute_rho(a0.source_degrees) + kTol.rho_slack;

  std::vector<SweepRow> rows;
  rows.reserve(cfg.theta_grid.size() * cfg.k_grid.size());
  for (double theta : cfg.theta_grid) {
    const NormalizedGraph mixed = mix_graphs(a0, a_star, theta);
    const Spectrum spec = eigh(mixed.matrix);
    for (int k : cfg.k_grid) {
      const FactorMatrix fm = top_k_factor(spec, mixed.source_degrees, k);
      const LinearProbe probe = fit_probe(fm, w, cfg.ridge);
      SweepRow row;
      row.replicate = replicate;
      row.seed = sc.seed;
      row.gamma = gamma;
      row.theta = theta;
      row.k = k;
      row.error = per_aug_error(fm, probe, w);
      row.vote_error = natural_vote_error(fm, probe, w);
      row.delta_u = d.delta_u;
      row.delta_s = d.delta_s;
      row.probe_norm = probe.frobenius_norm;
      row.norm_cap = theorem_norm_cap(nu, k, theta);
      row.gate = row.probe_norm <= row.norm_cap;
      row.bound = std::numeric_limits<double>::quiet_NaN();
      if (k > sc.r && w.layout.n_unlabeled == 0) {
        BoundInputs bi;
        bi.delta_u = d.delta_u;
        bi.delta_s = d.delta_s;
        bi.rho = rho;
        bi.nu = nu;
        bi.k = k;
        bi.theta = theta;
        bi.alpha = nm.alpha;
        bi.gamma = gamma;
        bi.r = sc.r;
        bi.n_labeled = w.layout.n_labeled;
        try {
          row.bound = noisy_bound(bi).value;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerateDenominator) throw;
          row.bound = std::numeric_limits<double>::infinity();
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows, bool header) {
  using io::format_double;
  std::string out;
  if (header) {
    out += kResultsHeader;
    out += '\n';
  }
  for (const SweepRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.replicate, r.seed,
                       format_double(r.gamma), format_double(r.theta), r.k, format_double(r.error),
                       format_double(r.vote_error), format_double(r.delta_u),
                       format_double(r.delta_s), format_double(r.probe_norm),
                       format_double(r.norm_cap), format_double(r.bound), r.gate ? 1 : 0);
  }
  return out;
}

std::vector<SweepRow> rows_from_csv(const std::string& text) {
  std::vector<SweepRow> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line.rfind("replicate,", 0) == 0) continue;
    std::vector<std::string> f;
    std::size_t p = 0;
    while (true) {
      const std::size_t q = line.find(',', p);
      f.push_back(line.substr(p, q == std::string::npos ? std::string::npos : q - p));
      if (q == std::string::npos) break;
      p = q + 1;
    }
    if (f.size() != 13) throw Error(ErrorCode::kIo, "results row has " + std::to_string(f.size()) + " fields");
    SweepRow r;
    r.replicate = std::stoi(f[0]);
    r.seed = std::stoull(f[1]);
    r.gamma = io::parse_double(f[2]);
    r.theta = io::parse_double(f[3]);
    r.k = std::stoi(f[4]);
    r.error = io::parse_double(f[5]);
    r.vote_error = io::parse_double(f[6]);
    r.delta_u = io::parse_double(f[7]);
    r.delta_s = io::parse_double(f[8]);
    r.probe_norm = io::parse_double(f[9]);
    r.norm_cap = io::parse_double(f[10]);
    r.bound = io::parse_double(f[11]);
    r.gate = f[12] == "1";
    rows.push_back(r);
  }
  return rows;
}

std::vector<SummaryRow> summarize(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  // (gamma, k) -> theta -> replicate -> error
  std::map<std::pair<double, int>, std::map<double, std::map<int, double>>> table;
  for (const SweepRow& r : rows) table[{r.gamma, r.k}][r.theta][r.replicate] = r.error;

  std::vector<SummaryRow> out;
  for (double gamma : cfg.gamma_grid) {
    for (int k : cfg.k_grid) {
      auto it = table.find({gamma, k});
      if (it == table.end()) continue;
      const auto& by_theta = it->second;
      if (!by_theta.count(0.0) || !by_theta.count(1.0)) continue;
      SummaryRow s;
      s.gamma = gamma;
      s.k = k;
      s.min_over_grid = std::numeric_limits<double>::infinity();
      for (const auto& [theta, reps] : by_theta) {
        double mean = 0.0;
        for (const auto& [rep, e] : reps) mean += e;
        mean /= static_cast<double>(reps.size());
        if (theta == 0.0) s.err_theta0 = mean;
        if (theta == 1.0) s.err_theta1 = mean;
        if (mean <= s.min_over_grid) {
          s.min_over_grid = mean;
          s.best_theta = theta;
        }
      }
      s.baseline_gap = s.min_over_grid - std::min(s.err_theta0, s.err_theta1);
      double gap_sum = 0.0;
      int gap_count = 0;
      for (const auto& [rep, e0] : by_theta.at(0.0)) {
        const auto e1 = by_theta.at(1.0).find(rep);
        if (e1 == by_theta.at(1.0).end()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [theta, reps] : by_theta) {
          const auto e = reps.find(rep);
          if (e != reps.end()) best = std::min(best, e->second);
        }
        gap_sum += best - std::min(e0, e1->second);
        ++gap_count;
      }
      s.mean_replicate_gap = gap_count ? gap_sum / gap_count : 0.0;
      out.push_back(s);
    }
  }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& summary) {
  using io::format_double;
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const SummaryRow& s : summary) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", format_double(s.gamma), s.k,
                       format_double(s.best_theta), format_double(s.err_theta0),
                       format_double(s.err_theta1), format_double(s.min_over_grid),
                       format_double(s.baseline_gap), format_double(s.mean_replicate_gap));
  }
  return out;
}

namespace {

fs::path cell_path(const fs::path& dir, int rep, int gi) {
  return dir / "cells" / fmt::format("cell_r{:05d}_g{:03d}.csv", rep, gi);
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  io::write_text(tmp, text);
  fs::rename(tmp, path);
}

// Guards against resuming into a directory that holds another config's cells.
void check_cell_stamp(const fs::path& dir, const std::string& stamp) {
  const fs::path path = dir / "cells" / "config.sha256";
  if (fs::exists(path)) {
    if (io::read_text(path) != stamp) invalid("output_dir holds cells from a different sweep config");
    return;
  }
  write_atomic(path, stamp);
}

}  // namespace

SweepResult run_sweep(const SweepConfig& raw, const SweepOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepConfig cfg = normalized(raw);
  const bool persist = !cfg.output_dir.empty();
  const fs::path dir = cfg.output_dir;

  json stamp_cfg = sweep_config_to_json(cfg);
  stamp_cfg.erase("output_dir");
  stamp_cfg.erase("threads");
  const std::string stamp = io::sha256_hex(stamp_cfg.dump());
  if (persist) {
    fs::create_directories(dir / "cells");
    check_cell_stamp(dir, stamp);
  }

  const int gammas = static_cast<int>(cfg.gamma_grid.size());
  const int cells = cfg.replicates * gammas;
  std::vector<std::string> cell_text(static_cast<std::size_t>(cells));
  std::vector<char> done(static_cast<std::size_t>(cells), 0);
  SweepResult result;
  result.cells_total = cells;

  std::vector<int> pending;
  for (int c = 0; c < cells; ++c) {
    const fs::path p = persist ? cell_path(dir, c / gammas, c % gammas) : fs::path();
    if (persist && fs::exists(p)) {
      cell_text[static_cast<std::size_t>(c)] = io::read_text(p);
      done[static_cast<std::size_t>(c)] = 1;
      ++result.cells_resumed;
    } else {
      pending.push_back(c);
    }
  }

  const int budget = opts.max_new_cells < 0 ? static_cast<int>(pending.size())
                                            : std::min<int>(opts.max_new_cells, static_cast<int>(pending.size()));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    while (true) {
      const int slot = next.fetch_add(1);
      if (slot >= budget) return;
      const int c = pending[static_cast<std::size_t>(slot)];
      try {
        std::string text = rows_to_csv(run_cell(cfg, c / gammas, c % gammas), false);
        if (persist) write_atomic(cell_path(dir, c / gammas, c % gammas), text);
        cell_text[static_cast<std::size_t>(c)] = std::move(text);
        done[static_cast<std::size_t>(c)] = 1;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(budget);
        return;
      }
    }
  };
  const int nthreads = std::max(1, std::min(cfg.threads, budget));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Canonical order: replicate, then gamma index; rows inside a cell are
  // already ordered by theta then k.
  std::string body;
  bool complete = true;
  for (int c = 0; c < cells; ++c) {
    if (!done[static_cast<std::size_t>(c)]) {
      complete = false;
      continue;
    }
    body += cell_text[static_cast<std::size_t>(c)];
  }
  result.results_csv = std::string(kResultsHeader) + "\n" + body;
  result.rows = rows_from_csv(body);
  result.summary = summarize(cfg, result.rows);
  result.summary_csv = summary_to_csv(result.summary);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (persist && complete) {
    io::write_text(dir / "results.csv", result.results_csv);
    io::write_text(dir / "summary.csv", result.summary_csv);
    emit_plot_data(result, dir / "plots");
    const json manifest{{"schema_version", kSchemaVersion},
                        {"config", sweep_config_to_json(cfg)},
                        {"config_sha256", stamp},
                        {"sha256",
                         {{"results.csv", io::sha256_hex(result.results_csv)},
                          {"summary.csv", io::sha256_hex(result.summary_csv)}}},
                        {"cells", cells},
                        {"cells_resumed", result.cells_resumed},
                        {"rows", result.rows.size()},
                        {"timings", {{"total_seconds", result.seconds}}}};
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  return result;
}

void emit_plot_data(const SweepResult& result, const fs::path& dir) {
  using io::format_double;
  std::string fig1 = "gamma,k,err_theta0,err_theta1,endpoint_winner,joint_best\n";
  std::string fig2a = "gamma,k,best_theta\n";
  for (const SummaryRow& s : result.summary) {
    fig1 += fmt::format("{},{},{},{},{},{}\n", format_double(s.gamma), s.k, format_double(s.err_theta0),
                        format_double(s.err_theta1), format_double(std::min(s.err_theta0, s.err_theta1)),
                        format_double(s.min_over_grid));
    fig2a += fmt::format("{},{},{}\n", format_double(s.gamma), s.k, format_double(s.best_theta));
  }

  struct Acc {
    double err = 0.0, bound = 0.0;
    int n = 0, nb = 0;
  };
  std::map<std::tuple<double, double, int>, Acc> acc;
  for (const SweepRow& r : result.rows) {
    Acc& a = acc[{r.gamma, r.theta, r.k}];
    a.err += r.error;
    ++a.n;
    if (!std::isnan(r.bound)) {
      a.bound += r.bound;
      ++a.nb;
    }
  }
  std::string bounds = "gamma,theta,k,mean_error,mean_bound\n";
  std::string table1 = "gamma,theta,k,mean_error\n";
  for (const auto& [key, a] : acc) {
    const auto& [gamma, theta, k] = key;
    const double me = a.err / a.n;
    const double mb = a.nb ? a.bound / a.nb : std::numeric_limits<double>::quiet_NaN();
    bounds += fmt::format("{},{},{},{},{}\n", format_double(gamma), format_double(theta), k,
                          format_double(me), format_double(mb));
    table1 += fmt::format("{},{},{},{}\n", format_double(gamma), format_double(theta), k, format_double(me));
  }
  io::write_text(dir / "fig1_baseline.csv", fig1);
  io::write_text(dir / "fig2a_optimal_theta.csv", fig2a);
  io::write_text(dir / "bounds.csv", bounds);
  io::write_text(dir / "table1_k.csv", table1);
}

}  // namespace wscl
