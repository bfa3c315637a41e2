#include "wscl/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wscl/error.hpp"
#include "wscl/rng.hpp"

namespace wscl {

const char* to_string(LabelGraphMode mode) {
  return mode == LabelGraphMode::kExpected ? "expected" : "sampled";
}

LabelGraphMode label_graph_mode_from_string(const std::string& s) {
  if (s == "expected") return LabelGraphMode::kExpected;
  if (s == "sampled") return LabelGraphMode::kSampled;
  throw Error(ErrorCode::kConfigInvalid, "unknown label_graph_mode '" + s + "'");
}

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kConfigInvalid, why); };
  if (cfg.r < 2) fail("r must be >= 2");
  if (cfg.naturals_per_class < 1) fail("naturals_per_class must be >= 1");
  if (cfg.augs_per_natural < 1) fail("augs_per_natural must be >= 1");
  const double p_in = cfg.intra_class_overlap;
  const double p_out = cfg.inter_class_overlap;
  if (!(p_in >= 0.0 && p_in <= 1.0)) fail("intra_class_overlap must lie in [0, 1]");
  if (!(p_out >= 0.0 && p_out <= p_in)) fail("inter_class_overlap must lie in [0, intra_class_overlap]");
  // Each natural keeps some mass on its own points so every degree is positive.
  if (!(p_in + p_out < 1.0)) fail("intra + inter overlap must be < 1");
  if (!(cfg.labeled_fraction >= 0.0 && cfg.labeled_fraction <= 1.0)) fail("labeled_fraction must lie in [0, 1]");
  if (!(cfg.overlap_jitter >= 0.0 && cfg.overlap_jitter <= 1.0)) fail("overlap_jitter must lie in [0, 1]");
  if (!cfg.class_priors.empty()) {
    if (cfg.class_priors.size() != static_cast<std::size_t>(cfg.r)) fail("class_priors must have r entries");
    double sum = 0.0;
    for (double p : cfg.class_priors) {
      if (!(p > 0.0)) fail("class_priors must be positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail("class_priors must sum to 1");
  }
  const double limit = static_cast<double>(cfg.r - 1) / static_cast<double>(cfg.r);
  if (!(cfg.gamma >= 0.0 && cfg.gamma < limit)) fail("gamma must lie in [0, (r-1)/r)");
  if (static_cast<std::size_t>(cfg.augmented()) > kTol.max_vertices) fail("world exceeds the vertex cap");
}

std::vector<int> World::clean_labels() const {
  std::vector<int> out(natural_of.size());
  for (std::size_t x = 0; x < natural_of.size(); ++x) {
    out[x] = label_of_natural[static_cast<std::size_t>(natural_of[x])];
  }
  return out;
}

Vector World::class_mass() const {
  Vector mass = Vector::Zero(r);
  for (Index j = 0; j < naturals(); ++j) mass[label_of_natural[static_cast<std::size_t>(j)]] += natural_prior[j];
  return mass;
}

World gen_block_world(const ScenarioConfig& cfg) {
  validate(cfg);
  const int r = cfg.r;
  const int npc = cfg.naturals_per_class;
  const int m = cfg.augs_per_natural;
  const int big_n = cfg.naturals();
  const Index n = cfg.augmented();

  World w;
  w.r = r;
  w.label_of_natural.resize(static_cast<std::size_t>(big_n));
  w.natural_prior.resize(big_n);
  for (int j = 0; j < big_n; ++j) {
    const int c = j / npc;
    w.label_of_natural[static_cast<std::size_t>(j)] = c;
    const double prior = cfg.class_priors.empty() ? 1.0 / r : cfg.class_priors[static_cast<std::size_t>(c)];
    w.natural_prior[j] = prior / npc;
  }

  // Labeled points come first: q per class, taken in natural-major order.
  const int class_size = npc * m;
  const int q = std::min<int>(
      class_size, static_cast<int>(std::llround(cfg.labeled_fraction * static_cast<double>(class_size))));
  std::vector<std::vector<int>> points_of_natural(static_cast<std::size_t>(big_n));
  w.natural_of.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < r; ++c) {
    for (int t = 0; t < q; ++t) {
      const int j = c * npc + t / m;
      points_of_natural[static_cast<std::size_t>(j)].push_back(static_cast<int>(w.natural_of.size()));
      w.natural_of.push_back(j);
    }
  }
  for (int c = 0; c < r; ++c) {
    for (int t = q; t < class_size; ++t) {
      const int j = c * npc + t / m;
      points_of_natural[static_cast<std::size_t>(j)].push_back(static_cast<int>(w.natural_of.size()));
      w.natural_of.push_back(j);
    }
  }
  w.layout = SemiSupervisedLayout{static_cast<Index>(q) * r, n - static_cast<Index>(q) * r};

  Rng rng(cfg.seed);
  const double p_in = cfg.intra_class_overlap;
  const double p_out = cfg.inter_class_overlap;
  const double jit = cfg.overlap_jitter;
  w.aug_dist = Matrix::Zero(big_n, n);
  auto spread = [&](int source, int target, double mass) {
    const auto& pts = points_of_natural[static_cast<std::size_t>(target)];
    for (int x : pts) w.aug_dist(source, x) += mass / static_cast<double>(pts.size());
  };
  for (int j = 0; j < big_n; ++j) {
    const int c = j / npc;
    // Both draws happen for every natural so the stream does not depend on jitter.
    int same_pick = c * npc + static_cast<int>(rng.index(static_cast<std::size_t>(npc)));
    if (npc > 1 && same_pick == j) same_pick = c * npc + (same_pick - c * npc + 1) % npc;
    const int others = big_n - npc;
    int other_pick = static_cast<int>(rng.index(static_cast<std::size_t>(others)));
    if (other_pick >= c * npc) other_pick += npc;

    spread(j, j, 1.0 - p_in - p_out);
    for (int t = c * npc; t < (c + 1) * npc; ++t) spread(j, t, p_in * (1.0 - jit) / npc);
    spread(j, same_pick, p_in * jit);
    for (int t = 0; t < big_n; ++t) {
      if (t / npc != c) spread(j, t, p_out * (1.0 - jit) / others);
    }
    spread(j, other_pick, p_out * jit);
  }

  Matrix weights = w.aug_dist.transpose() * w.natural_prior.asDiagonal() * w.aug_dist;
  weights = 0.5 * (weights + weights.transpose()).eval();
  w.aug_graph = SymmetricGraph(std::move(weights), true);

  std::vector<int> labeled(static_cast<std::size_t>(w.layout.n_labeled));
  for (Index x = 0; x < w.layout.n_labeled; ++x) labeled[static_cast<std::size_t>(x)] = w.label_of(x);
  w.posteriors = PosteriorMatrix::one_hot(labeled, r);

  realize_noisy_labels(w, make_noise_model(r, cfg.gamma), derive_seed({cfg.seed, 0x6e6f697365ULL}));
  return w;
}

void realize_noisy_labels(World& w, const NoiseModel& nm, std::uint64_t seed) {
  if (nm.r != w.r) throw Error(ErrorCode::kDimensionMismatch, "noise model class count differs from world");
  Rng rng(seed);
  w.noisy_label_of_natural = sample_noisy_labels(w.label_of_natural, nm, rng);
}

SymmetricGraph world_label_graph(const World& w, const NoiseModel& nm, LabelGraphMode mode) {
  if (mode == LabelGraphMode::kExpected) return semi_block_graph(w.posteriors, nm, w.layout);
  std::vector<int> noisy(static_cast<std::size_t>(w.layout.n_labeled));
  for (Index x = 0; x < w.layout.n_labeled; ++x) {
    noisy[static_cast<std::size_t>(x)] =
        w.noisy_label_of_natural[static_cast<std::size_t>(w.natural_of[static_cast<std::size_t>(x)])];
  }
  return semi_block_graph(label_graph(PosteriorMatrix::one_hot(noisy, w.r)), w.layout);
}

std::vector<int> bayes_labeler(const World& w) {
  std::vector<int> out(static_cast<std::size_t>(w.n()));
  for (Index x = 0; x < w.n(); ++x) {
    Index best = 0;
    double best_mass = -1.0;
    for (Index j = 0; j < w.naturals(); ++j) {
      const double mass = w.natural_prior[j] * w.aug_dist(j, x);
      if (mass > best_mass) {
        best_mass = mass;
        best = j;
      }
    }
    out[static_cast<std::size_t>(x)] = w.label_of_natural[static_cast<std::size_t>(best)];
  }
  return out;
}

}  // namespace wscl
