#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wscl/graph.hpp"
#include "wscl/label_model.hpp"

namespace wscl {

/// How the label similarity graph of a world is built.
enum class LabelGraphMode {
  kExpected,  ///< Y T^2 Y^T from the clean posteriors (population noise)
  kSampled,   ///< one-hot realized noisy labels, one draw per natural point
};

const char* to_string(LabelGraphMode mode);
LabelGraphMode label_graph_mode_from_string(const std::string& s);

struct ScenarioConfig {
  std::uint64_t seed = 0;
  int r = 2;
  int naturals_per_class = 2;
  int augs_per_natural = 2;
  double intra_class_overlap = 0.0;  ///< p_in
  double inter_class_overlap = 0.0;  ///< p_out
  std::vector<double> class_priors;  ///< empty means uniform
  double labeled_fraction = 1.0;
  double gamma = 0.0;
  /// Fraction of each overlap budget sent to one randomly drawn target natural
  /// instead of being spread uniformly. 0 reproduces the uniform block world.
  double overlap_jitter = 0.0;
  LabelGraphMode label_graph_mode = LabelGraphMode::kExpected;

  int naturals() const { return r * naturals_per_class; }
  int augmented() const { return naturals() * augs_per_natural; }
};

/// Throws ConfigInvalid on any violated invariant.
void validate(const ScenarioConfig& cfg);

/// A finite world: natural points, their augmentation distributions, the
/// induced augmentation graph and the labeled subset.
///
/// Augmented points are ordered with the labeled block first.
struct World {
  int r = 2;
  SymmetricGraph aug_graph;           ///< mass-normalized, n x n
  Matrix aug_dist;                    ///< N x n, row j is A(.|natural j)
  Vector natural_prior;               ///< P(natural j)
  std::vector<int> natural_of;        ///< augmented index -> owning natural
  std::vector<int> label_of_natural;  ///< clean class of each natural
  std::vector<int> noisy_label_of_natural;
  PosteriorMatrix posteriors;         ///< clean one-hot rows of the labeled block
  SemiSupervisedLayout layout;

  Index n() const { return aug_graph.n(); }
  Index naturals() const { return static_cast<Index>(label_of_natural.size()); }
  int label_of(Index x) const { return label_of_natural[static_cast<std::size_t>(natural_of[static_cast<std::size_t>(x)])]; }
  std::vector<int> clean_labels() const;
  /// Mass of each class under P.
  Vector class_mass() const;
};

World gen_block_world(const ScenarioConfig& cfg);

/// Redraws the per-natural noisy labels with a given noise model and seed.
void realize_noisy_labels(World& w, const NoiseModel& nm, std::uint64_t seed);

/// Unnormalized label similarity graph over all augmented points (semi block form).
SymmetricGraph world_label_graph(const World& w, const NoiseModel& nm, LabelGraphMode mode);

/// y_hat(x) = label of argmax_j P(j) A(x|j), ties to the lowest natural index.
std::vector<int> bayes_labeler(const World& w);

}  // namespace wscl
