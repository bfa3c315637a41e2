// Acceptance battery: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "support.hpp"
#include "wscl/bounds.hpp"
#include "wscl/error.hpp"
#include "wscl/evaluation.hpp"
#include "wscl/io.hpp"
#include "wscl/joint.hpp"
#include "wscl/label_model.hpp"
#include "wscl/spectral.hpp"
#include "wscl/sweep.hpp"
#include "wscl/synthetic.hpp"

using namespace wscl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Noise rates as fractions of the admissible range (r - 1) / r.
const std::vector<double> kGammaFractions{0.0, 0.1, 0.25, 0.4, 0.6, 0.8, 0.95};

struct BalancedInstance {
  int r;
  PosteriorMatrix y;
  SemiSupervisedLayout layout;
};

std::vector<BalancedInstance> balanced_battery(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<BalancedInstance> out;
  for (int i = 0; i < count; ++i) {
    const int r = 2 + static_cast<int>(rng.index(9));
    const Index blocks = 1 + static_cast<Index>(rng.index(static_cast<std::size_t>(200 / r)));
    PosteriorMatrix y = test::balanced_posteriors(rng, r, blocks, i % 4 == 0);
    const SemiSupervisedLayout layout{y.n_labeled(), static_cast<Index>(rng.index(11))};
    out.push_back({r, std::move(y), layout});
  }
  return out;
}

Outcome ac1_closed_form() {
  double worst = 0.0;
  int checks = 0;
  for (const auto& inst : balanced_battery(101, 100)) {
    for (double frac : kGammaFractions) {
      const NoiseModel nm = make_noise_model(inst.r, frac * (inst.r - 1.0) / inst.r);
      const Matrix closed = lemma41_closed_form(inst.y, nm, inst.layout).matrix;
      const Matrix direct = normalize(semi_block_graph(inst.y, nm, inst.layout)).matrix;
      worst = std::max(worst, test::frob_diff(closed, direct));
      ++checks;
    }
  }
  return {worst <= 1e-10, fmt::format("max |closed - direct|_F = {:.3e} over {} checks (tol 1e-10)", worst, checks)};
}

Outcome ac2_label_spectrum() {
  double worst = 0.0;
  int checks = 0;
  const auto battery = balanced_battery(101, 100);
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto& inst = battery[i];
    // One noise rate per instance keeps the dense Jacobi solves inside the time budget.
    const double frac = kGammaFractions[i % kGammaFractions.size()];
    const NoiseModel nm = make_noise_model(inst.r, frac * (inst.r - 1.0) / inst.r);
    const Vector pred = predict_label_spectrum(inst.y, nm, inst.layout);
    const Vector got = eigh(normalize(semi_block_graph(inst.y, nm, inst.layout)).matrix).values;
    worst = std::max(worst, (pred - got).cwiseAbs().maxCoeff());
    ++checks;
  }
  // Deterministic specialization: exact multiset {1 x (n_U + 1), alpha x (r - 1), 0 x rest}.
  Rng rng(202);
  double det_worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int r = 2 + static_cast<int>(rng.index(5));
    const PosteriorMatrix y = test::balanced_posteriors(rng, r, 1 + static_cast<Index>(rng.index(8)), true);
    const SemiSupervisedLayout layout{y.n_labeled(), static_cast<Index>(rng.index(4))};
    const NoiseModel nm = make_noise_model(r, kGammaFractions[static_cast<std::size_t>(i) % 7] * (r - 1.0) / r);
    const Vector det = predict_deterministic_spectrum(nm, layout);
    Vector expect = Vector::Zero(layout.n());
    expect.head(layout.n_unlabeled + 1).setOnes();
    expect.segment(layout.n_unlabeled + 1, r - 1).setConstant(nm.alpha);
    if (det != expect) det_worst = kInf;
    const Vector got = eigh(normalize(semi_block_graph(y, nm, layout)).matrix).values;
    det_worst = std::max(det_worst, (det - got).cwiseAbs().maxCoeff());
  }
  const bool ok = worst <= 1e-8 && det_worst <= 1e-8;
  return {ok, fmt::format("max |predicted - eigh| = {:.3e} over {} instances; deterministic shape max dev {:.3e} (tol 1e-8)",
                          worst, checks, det_worst)};
}

Outcome ac3_weyl_interval() {
  Rng rng(303);
  int violations = 0;
  int checks = 0;
  double worst = 0.0;
  for (int world = 0; world < 100; ++world) {
    const int r = 2 + static_cast<int>(rng.index(3));
    const Index per_class = 1 + static_cast<Index>(rng.index(6));
    const Index nl = per_class * r;
    const SemiSupervisedLayout layout{nl, static_cast<Index>(rng.index(static_cast<std::size_t>(41 - nl)))};
    const Index n = layout.n();
    const NoiseModel nm = make_noise_model(r, rng.uniform(0.0, (r - 1.0) / r));
    const SymmetricGraph aug = world % 2 ? test::random_psd_graph(rng, n, 1 + static_cast<Index>(rng.index(6)))
                                         : test::random_graph(rng, n);
    const NormalizedGraph a0 = normalize(aug);
    const Vector nu = eigh(a0.matrix).values;
    const PosteriorMatrix y = test::balanced_posteriors(rng, r, per_class, true);
    const NormalizedGraph as = lemma41_closed_form(y, nm, layout);
    for (double theta : {0.0, rng.uniform(), rng.uniform(), 1.0}) {
      const Vector lam = eigh(mix_graphs(a0, as, theta).matrix).values;
      for (Index k = 0; k + 1 <= n; ++k) {
        const EigInterval iv = mixed_eig_bounds(nu, nm, layout, theta, k);
        const double v = lam[k];
        const double excess = std::max(iv.lower - v, v - iv.upper);
        worst = std::max(worst, excess);
        if (excess > 1e-9) ++violations;
        ++checks;
      }
    }
  }
  return {violations == 0 && checks > 0,
          fmt::format("{} violations in {} (world, theta, k) checks; worst excess {:.3e}", violations, checks, worst)};
}

Outcome ac4_loss_gap() {
  Rng rng(404);
  double spread = 0.0, offset = 0.0;
  for (int g = 0; g < 20; ++g) {
    const Index n = 3 + static_cast<Index>(rng.index(28));
    const SymmetricGraph graph = g % 2 ? test::random_graph(rng, n) : test::random_psd_graph(rng, n, 5);
    const DegreeVector d = degrees(graph);
    const double a2 = normalize(graph).matrix.squaredNorm();
    double lo = kInf, hi = -kInf;
    for (int f = 0; f < 100; ++f) {
      const Index k = 1 + static_cast<Index>(rng.index(5));
      const double gap = loss_gap(FactorMatrix{test::random_matrix(rng, n, k, -1.0, 1.0), d}, graph);
      lo = std::min(lo, gap);
      hi = std::max(hi, gap);
      offset = std::max(offset, std::abs(gap - a2));
    }
    spread = std::max(spread, hi - lo);
  }
  return {spread <= 1e-9 && offset <= 1e-9,
          fmt::format("max spread {:.3e}, max |gap - |A|_F^2| {:.3e} over 20 graphs x 100 F (tol 1e-9)", spread, offset)};
}

Outcome ac5_trainer() {
  Rng rng(505);
  double worst_rel = 0.0;
  int instances = 0;
  TrainConfig cfg;
  cfg.max_iters = 100000;
  cfg.grad_tol = 1e-11;
  for (int attempt = 0; attempt < 200 && instances < 8; ++attempt) {
    const Index n = 5 + static_cast<Index>(rng.index(16));
    const NormalizedGraph ng = normalize(test::random_psd_graph(rng, n, 2 + static_cast<Index>(rng.index(6))));
    const Index k = 1 + static_cast<Index>(rng.index(4));
    const Vector ev = eigh(ng.matrix).values;
    if (ev[k - 1] - ev[k] < 0.05) continue;
    ++instances;
    const double opt = matrix_factorization_loss(top_k_factor(ng, k), ng);
    cfg.seed = static_cast<std::uint64_t>(attempt);
    const double got = gd_train(ng, k, cfg).loss;
    worst_rel = std::max(worst_rel, std::abs(got - opt) / std::max(opt, 1e-12));
  }
  double fd_worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.index(12));
    const Index k = 1 + static_cast<Index>(rng.index(4));
    const NormalizedGraph ng = normalize(test::random_graph(rng, n));
    const Matrix f = test::random_matrix(rng, n, k, -1.0, 1.0);
    const Matrix g = mf_gradient(FactorMatrix{f, ng.source_degrees}, ng);
    const double h = 1e-5;
    double err = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < k; ++j) {
        Matrix fp = f, fm = f;
        fp(i, j) += h;
        fm(i, j) -= h;
        const double fd = ((ng.matrix - fp * fp.transpose()).squaredNorm() -
                           (ng.matrix - fm * fm.transpose()).squaredNorm()) /
                          (2 * h);
        err = std::max(err, std::abs(fd - g(i, j)));
      }
    }
    fd_worst = std::max(fd_worst, err / std::max(g.cwiseAbs().maxCoeff(), 1e-12));
  }
  return {instances >= 5 && worst_rel <= 1e-4 && fd_worst <= 1e-5,
          fmt::format("gd vs spectral optimum max rel {:.3e} on {} gap>=0.05 instances (tol 1e-4); "
                      "gradient vs central differences max rel {:.3e} (tol 1e-5)",
                      worst_rel, instances, fd_worst)};
}

BoundInputs random_admissible(Rng& rng) {
  BoundInputs bi;
  bi.r = 2 + static_cast<int>(rng.index(9));
  bi.k = bi.r + 1 + static_cast<Index>(rng.index(6));
  const Index n = bi.k + 1 + static_cast<Index>(rng.index(6));
  Vector nu = test::random_matrix(rng, n, 1, 0.0, 0.999);
  std::sort(nu.data(), nu.data() + n, std::greater<double>());
  nu[0] = 1.0;
  bi.nu = nu;
  bi.rho = rng.uniform(1.0, 3.0);
  bi.delta_u = rng.uniform(0.0, 0.25);
  bi.delta_s = rng.uniform(0.0, std::min(0.3, 0.99 / (1.0 + bi.rho)));
  const double gamma = rng.uniform(0.0, (bi.r - 1.0) / bi.r);
  bi.gamma = gamma;
  bi.alpha = make_noise_model(bi.r, gamma).alpha;
  return bi;
}

Outcome ac6_endpoint() {
  Rng rng(606);
  std::vector<double> grid(1001);
  for (int i = 0; i <= 1000; ++i) grid[static_cast<std::size_t>(i)] = i / 1000.0;
  int interior = 0, mismatch = 0, cases = 0;
  double worst_margin = 0.0;
  while (cases < 1000) {
    BoundInputs bi = random_admissible(rng);
    if (1.0 - nu_at(bi.nu, bi.k + 1) <= 1e-6) continue;
    ++cases;
    const EndpointResult res = endpoint_argmin(bi, grid);
    const double v0 = res.values.front(), v1 = res.values.back();
    const double best = *std::min_element(res.values.begin(), res.values.end());
    if (best < std::min(v0, v1) - 1e-12) {
      ++interior;
      worst_margin = std::max(worst_margin, std::min(v0, v1) - best);
    }
    const double winner = v1 < v0 ? 1.0 : 0.0;
    double predicted;
    try {
      const double gth = gamma_threshold(bi);
      predicted = bi.gamma < gth ? 1.0 : 0.0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedThreshold) throw;
      predicted = 1.0;  // negative radicand: theta = 1 wins at every admissible gamma
    }
    if (predicted != winner) ++mismatch;
  }
  return {interior == 0 && mismatch == 0,
          fmt::format("{} cases: {} interior minima (worst margin {:.3e}), {} threshold mismatches", cases,
                      interior, worst_margin, mismatch)};
}

Outcome ac7_theta0() {
  Rng rng(707);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    BoundInputs bi = random_admissible(rng);
    bi.theta = 0.0;
    const double nu = nu_at(bi.nu, bi.k + 1);
    const double expect = 4 * bi.delta_u / (1 - nu) + 8 * bi.delta_u;
    worst = std::max(worst, std::abs(noisy_bound(bi).value - expect));
  }
  return {worst <= 1e-12, fmt::format("max |bound - (4du/(1-nu) + 8du)| = {:.3e} over 1000 inputs (tol 1e-12)", worst)};
}

Outcome ac8_theta1() {
  Rng rng(808);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    BoundInputs bi = random_admissible(rng);
    bi.theta = 1.0;
    bi.gamma = 0.0;
    bi.alpha = make_noise_model(bi.r, 0.0).alpha;
    const double expect = 2 * (1 + bi.rho) * bi.delta_s + 8 * bi.delta_u;
    worst = std::max(worst, std::abs(noisy_bound(bi).value - expect));
  }
  return {worst <= 1e-12, fmt::format("max |bound - (2(1+rho)ds + 8du)| = {:.3e} over 1000 inputs (tol 1e-12)", worst)};
}

Outcome ac9_phi_hat() {
  Rng rng(909);
  int violations = 0;
  double worst = -kInf;
  for (int combo = 0; combo < 100; ++combo) {
    ScenarioConfig cfg;
    cfg.seed = rng.next();
    cfg.r = 2 + static_cast<int>(rng.index(3));
    cfg.naturals_per_class = 1 + static_cast<int>(rng.index(4));
    cfg.augs_per_natural = 1 + static_cast<int>(rng.index(3));
    cfg.intra_class_overlap = rng.uniform(0.0, 0.5);
    cfg.inter_class_overlap = rng.uniform(0.0, cfg.intra_class_overlap);
    cfg.overlap_jitter = rng.uniform();
    cfg.gamma = rng.uniform(0.0, (cfg.r - 1.0) / cfg.r);
    const World w = gen_block_world(cfg);
    const NoiseModel nm = make_noise_model(cfg.r, cfg.gamma);
    const NormalizedGraph a0 = normalize(w.aug_graph);
    const NormalizedGraph as = normalize(world_label_graph(w, nm, LabelGraphMode::kExpected));
    std::vector<int> yhat = bayes_labeler(w);
    // Perturb the labeler on a random share of points; every third combo uses it unchanged.
    if (combo % 3 != 0) {
      const double flip = rng.uniform(0.0, 0.5);
      for (int& y : yhat) {
        if (rng.uniform() < flip) y = static_cast<int>(rng.index(static_cast<std::size_t>(cfg.r)));
      }
    }
    const Deltas d = compute_deltas(w, yhat);
    BoundInputs bi;
    bi.delta_u = d.delta_u;
    bi.delta_s = d.delta_s;
    bi.rho = compute_rho(a0.source_degrees) + kTol.rho_slack;
    bi.alpha = nm.alpha;
    bi.r = cfg.r;
    bi.nu = Vector::Ones(1);
    bi.theta = combo % 10 == 0 ? 1.0 : (combo % 10 == 1 ? 0.0 : rng.uniform());
    const double phi = compute_phi_hat(a0, as, bi.theta, yhat);
    const double excess = phi - phi_hat_bound(bi);
    worst = std::max(worst, excess);
    if (excess > 1e-10) ++violations;
  }
  return {violations == 0, fmt::format("{} violations in 100 combos; max phi - bound = {:.3e} (tol 1e-10)", violations, worst)};
}

SweepConfig ac10_sweep(const fs::path& out) {
  SweepConfig cfg;
  cfg.scenario.r = 2;
  cfg.scenario.naturals_per_class = 20;
  cfg.scenario.augs_per_natural = 2;
  cfg.scenario.intra_class_overlap = 0.2;
  cfg.scenario.inter_class_overlap = 0.2;
  cfg.scenario.overlap_jitter = 0.8;
  cfg.scenario.labeled_fraction = 1.0;
  cfg.scenario.label_graph_mode = LabelGraphMode::kSampled;
  cfg.theta_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  cfg.gamma_grid = {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45};
  cfg.k_grid = {3, 4, 6};
  cfg.master_seed = 1;
  cfg.replicates = 20;
  cfg.threads = 1;
  cfg.output_dir = out.string();
  return cfg;
}

Outcome ac10_pattern(const fs::path& work, std::string* results_csv) {
  const fs::path dir = work / "ac10_run1";
  fs::remove_all(dir);
  const SweepResult res = run_sweep(ac10_sweep(dir));
  *results_csv = io::read_text(dir / "results.csv");
  double gap = 0.0;
  for (const SummaryRow& s : res.summary) gap += s.baseline_gap;
  gap /= static_cast<double>(res.summary.size());
  // Mean over k of best_theta per noise rate.
  std::map<double, std::pair<double, int>> by_gamma;
  for (const SummaryRow& s : res.summary) {
    by_gamma[s.gamma].first += s.best_theta;
    by_gamma[s.gamma].second += 1;
  }
  std::string curve;
  std::vector<double> b;
  for (const auto& [g, acc] : by_gamma) {
    b.push_back(acc.first / acc.second);
    curve += fmt::format("{}{:.2f}", curve.empty() ? "" : " ", b.back());
  }
  const bool gap_ok = gap >= -0.01;
  const bool migrates = b.front() >= 0.9 && b.back() <= b.front() - 0.5;
  const bool fast = res.seconds < 300.0;
  return {gap_ok && migrates && fast,
          fmt::format("mean baseline gap {:.4f} (>= -0.01); mean best_theta by gamma [{}] "
                      "(needs >= 0.9 at the lowest gamma and a drop >= 0.5 by the highest); {:.1f} s (< 300 s)",
                      gap, curve, res.seconds)};
}

Outcome ac11_finite() {
  Rng rng(1111);
  double worst = 0.0;
  int mono_fail = 0, cases = 0;
  while (cases < 300) {
    BoundInputs bi = random_admissible(rng);
    bi.theta = rng.uniform();
    FiniteSampleInputs pop;
    pop.rademacher = 0.0;
    pop.epsilon = 0.0;
    FiniteSampleReport rep;
    try {
      rep = finite_sample_bound(bi, pop, 1, bi.k + 1 - bi.r);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateDenominator) throw;
      continue;
    }
    ++cases;
    // Independent evaluation of the population bound at each k'.
    const double c = bi.alpha * (1 + bi.rho) * bi.delta_s - 2 * bi.delta_u + (1 - bi.alpha);
    const double numer = 2 * (2 * bi.delta_u + c * bi.theta);
    double best = kInf;
    for (Index kp = 1; kp <= bi.k + 1 - bi.r; ++kp) {
      const double lam = std::min({bi.theta + (1 - bi.theta) * nu_at(bi.nu, kp + 1),
                                   bi.theta * bi.alpha + (1 - bi.theta) * nu_at(bi.nu, kp),
                                   (1 - bi.theta) * nu_at(bi.nu, kp + 1 - bi.r)});
      const double v = numer <= 0.0 ? 0.0 : (1 - lam > 1e-12 ? numer / (1 - lam) : kInf);
      best = std::min(best, v);
    }
    best += 8 * bi.delta_u;
    worst = std::max(worst, std::abs(rep.report.value - best) / std::max(1.0, best));

    FiniteSampleInputs fs;
    fs.rademacher = rng.uniform(0.0, 0.1);
    fs.epsilon = rng.uniform(0.0, 0.01);
    fs.n = std::pow(10.0, rng.uniform(2, 7));
    try {
      const FiniteSampleReport fr = finite_sample_bound(bi, fs, 1, bi.k + 1 - bi.r);
      for (std::size_t i = 1; i < fr.k_primes.size(); ++i) {
        if (fr.approx_terms[i] > fr.approx_terms[i - 1]) ++mono_fail;
        if (fr.sample_terms[i] < fr.sample_terms[i - 1]) ++mono_fail;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateDenominator) throw;
    }
  }
  return {worst <= 1e-12 && mono_fail == 0,
          fmt::format("{} cases: max rel |finite(0, 0) - min_k' population| = {:.3e}; {} monotonicity failures",
                      cases, worst, mono_fail)};
}

Outcome ac12_reproducible(const fs::path& work, const std::string& first) {
  const fs::path dir = work / "ac10_run2";
  fs::remove_all(dir);
  const SweepResult res = run_sweep(ac10_sweep(dir));
  const std::string second = io::read_text(dir / "results.csv");
  const bool same = !first.empty() && first == second;
  const bool same_summary = io::read_text(work / "ac10_run1" / "summary.csv") == io::read_text(dir / "summary.csv");
  return {same && same_summary,
          fmt::format("results.csv {} ({} bytes, sha256 {}), summary.csv {}", same ? "identical" : "DIFFERENT",
                      second.size(), io::sha256_hex(second).substr(0, 16), same_summary ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance battery"};
  std::string workdir = (fs::temp_directory_path() / "wscl_acceptance").string();
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Directory for sweep artifacts");
  app.add_option("--only", only, "Run only these criteria (1-12)");
  CLI11_PARSE(app, argc, argv);
  const fs::path work = workdir;
  fs::create_directories(work);

  std::string ac10_csv;
  struct Criterion {
    int id;
    double budget_s;  // runtime limit, infinity when none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 10.0, ac1_closed_form},
      {2, 10.0, ac2_label_spectrum},
      {3, 30.0, ac3_weyl_interval},
      {4, kInf, ac4_loss_gap},
      {5, kInf, ac5_trainer},
      {6, kInf, ac6_endpoint},
      {7, kInf, ac7_theta0},
      {8, kInf, ac8_theta1},
      {9, kInf, ac9_phi_hat},
      {10, 300.0, [&] { return ac10_pattern(work, &ac10_csv); }},
      {11, kInf, ac11_finite},
      {12, kInf, [&] {
         if (ac10_csv.empty()) {
           (void)ac10_pattern(work, &ac10_csv);
         }
         return ac12_reproducible(work, ac10_csv);
       }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= c.budget_s) {
      o.pass = false;
      o.detail += fmt::format("; runtime {:.1f} s exceeds {:.0f} s", secs, c.budget_s);
    }
    if (!o.pass) ++failures;
    std::cout << fmt::format("AC{:<2} {} {} [{:.2f} s]", c.id, o.pass ? "PASS" : "FAIL", o.detail, secs)
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
