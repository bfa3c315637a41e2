#pragma once

#include <span>
#include <vector>

#include "wscl/graph.hpp"
#include "wscl/rng.hpp"

namespace wscl {

/// Class posteriors eta_j(x_i) for the labeled samples, one row per sample.
class PosteriorMatrix {
 public:
  PosteriorMatrix() = default;
  /// Rows must be probability vectors (within Tolerances::posterior_row_sum).
  /// A matrix with zero rows needs `classes` to know r.
  explicit PosteriorMatrix(Matrix eta, const Tolerances& tol = kTol);
  PosteriorMatrix(Index classes, Matrix eta, const Tolerances& tol = kTol);

  /// One-hot rows from hard labels in [0, r).
  static PosteriorMatrix one_hot(std::span<const int> labels, int r);

  Index n_labeled() const { return eta_.rows(); }
  Index classes() const { return classes_; }
  const Matrix& eta() const { return eta_; }

  /// Soft class counts n_l (column sums).
  Vector class_counts() const { return eta_.colwise().sum().transpose(); }

  bool is_class_balanced(double tol = kTol.class_balance) const;

 private:
  Index classes_ = 0;
  Matrix eta_;
};

/// Symmetric label noise: flip to each other class with probability gamma/(r-1).
struct NoiseModel {
  int r = 2;
  double gamma = 0.0;
  Matrix transition;
  double alpha = 1.0;  ///< (1 - r gamma/(r-1))^2, NaN for a general transition
  double beta = 0.0;   ///< (gamma/(r-1)) (2 - r gamma/(r-1)), NaN for a general transition
  bool symmetric = true;

  /// Wraps an arbitrary row-stochastic transition matrix. Accepted by
  /// apply_noise and the graph builders, rejected by the closed forms.
  static NoiseModel from_transition(Matrix transition);
};

/// Throws NoiseRateOutOfRange unless 0 <= gamma < (r-1)/r, InvalidArgument if r < 2.
NoiseModel make_noise_model(int r, double gamma);

/// Y T.
PosteriorMatrix apply_noise(const PosteriorMatrix& y, const NoiseModel& nm);

/// Y Y^T.
SymmetricGraph label_graph(const PosteriorMatrix& y);

/// (Y T)(Y T)^T, which is Y T^2 Y^T for symmetric T.
SymmetricGraph noisy_label_graph(const PosteriorMatrix& y, const NoiseModel& nm);

struct SemiSupervisedLayout {
  Index n_labeled = 0;
  Index n_unlabeled = 0;

  Index n() const { return n_labeled + n_unlabeled; }
};

/// Block graph with the noisy label graph top-left and I_{n_U} bottom-right.
SymmetricGraph semi_block_graph(const PosteriorMatrix& y, const NoiseModel& nm,
                                const SemiSupervisedLayout& layout);

/// Same block shape around an already-built labeled block.
SymmetricGraph semi_block_graph(const SymmetricGraph& labeled_block,
                                const SemiSupervisedLayout& layout);

/// Labeled degrees d_i = alpha sum_l eta_l(x_i) n_l + n_L beta, unlabeled degree 1.
DegreeVector label_block_degrees(const PosteriorMatrix& y, const NoiseModel& nm,
                                 const SemiSupervisedLayout& layout);

/// Normalizes a semi-supervised block graph with label_block_degrees.
NormalizedGraph normalize_label_block(const SymmetricGraph& a_star, const PosteriorMatrix& y,
                                      const NoiseModel& nm);

/// block[ alpha A_L + beta (r/n_L) 1 1^T ; I ] assembled without T^2.
/// Throws NotClassBalanced / Precondition (non-symmetric noise).
NormalizedGraph lemma41_closed_form(const PosteriorMatrix& y, const NoiseModel& nm,
                                    const SemiSupervisedLayout& layout);

/// Draws one noisy label per entry of `clean` from the rows of the transition matrix.
std::vector<int> sample_noisy_labels(std::span<const int> clean, const NoiseModel& nm, Rng& rng);

}  // namespace wscl
