#pragma once

#include <span>
#include <vector>

#include "wscl/spectral.hpp"
#include "wscl/synthetic.hpp"

namespace wscl {

struct LinearProbe {
  Matrix b;  ///< k x r
  double frobenius_norm = 0.0;
};

struct EvalReport {
  double per_aug_error = 0.0;
  double natural_vote_error = 0.0;
  double delta_u = 0.0;
  double delta_s = 0.0;
  double probe_norm = 0.0;
  double theorem_norm_cap = 0.0;
  bool gate = false;  ///< probe_norm <= theorem_norm_cap
};

struct Deltas {
  double delta_u = 0.0;
  double delta_s = 0.0;
};

/// Weighted ridge regression of clean one-hot labels on the embeddings, with
/// the augmentation marginal as weights. Throws SingularSystem when the
/// regularized normal matrix has condition above Tolerances::singular_condition.
LinearProbe fit_probe(const FactorMatrix& fm, const World& w, double ridge = 1e-8);

/// argmax_i (B^T f(x))_i per augmented point, ties to the smallest class.
std::vector<int> probe_predict(const FactorMatrix& fm, const LinearProbe& probe);

/// sum_{nat} P(nat) sum_x A(x|nat) 1[pred(x) != y(nat)].
double per_aug_error(const FactorMatrix& fm, const LinearProbe& probe, const World& w);

/// Per natural point: the class predicted for most augmentation mass.
std::vector<int> natural_vote_predict(const FactorMatrix& fm, const LinearProbe& probe,
                                      const World& w);

double natural_vote_error(const FactorMatrix& fm, const LinearProbe& probe, const World& w);

/// Tightest constants of the labeling assumption for labeler `yhat` over the
/// augmented points.
Deltas compute_deltas(const World& w, std::span<const int> yhat);

/// 1 / ((1 - theta) nu_k), +inf when the denominator vanishes.
double theorem_norm_cap(const Vector& nu, Index k, double theta);

/// Fits a probe on `fm` and fills every field; deltas use the Bayes labeler.
EvalReport evaluate(const FactorMatrix& fm, const World& w, const Vector& nu, double theta,
                    double ridge = 1e-8);

}  // namespace wscl
