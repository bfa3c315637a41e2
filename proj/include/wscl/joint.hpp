#pragma once

#include "wscl/graph.hpp"
#include "wscl/label_model.hpp"
#include "wscl/spectral.hpp"

namespace wscl {

struct MixedGraphSpec {
  double theta = 0.0;
  double gamma = 0.0;
  Index n_labeled = 0;
  Index n_unlabeled = 0;
};

/// Throws ThetaOutOfRange / NoiseRateOutOfRange.
void validate(const MixedGraphSpec& spec, int r);

/// (1 - theta) A0 + theta A*, each already normalized by its own degrees.
/// The result carries A0's degrees, which define the embedding map.
NormalizedGraph mix_graphs(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta);

/// (1 - theta)|A0 - F F^T|^2 + theta |A* - F F^T|^2.
double joint_mf_loss(const FactorMatrix& fm, const NormalizedGraph& a0,
                     const NormalizedGraph& a_star, double theta);

/// (1 - theta)|A0|^2 + theta |A*|^2 - |(1 - theta) A0 + theta A*|^2.
double c0_constant(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta);

/// Sum of the two component gradients.
Matrix joint_mf_gradient(const FactorMatrix& fm, const NormalizedGraph& a0,
                         const NormalizedGraph& a_star, double theta);

/// Gradient descent on joint_mf_loss.
TrainOutcome gd_train_joint(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta,
                            Index k, const TrainConfig& cfg);

}  // namespace wscl
