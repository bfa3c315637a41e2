#pragma once

#include <cstdint>
#include <functional>

#include "wscl/graph.hpp"

namespace wscl {

/// Factor F (rows u_x) together with the degrees that map rows to
/// embeddings f(x) = w_x^{-1/2} u_x.
struct FactorMatrix {
  Matrix f;
  DegreeVector degrees;

  Index n() const { return f.rows(); }
  Index k() const { return f.cols(); }
  /// Rows are f(x).
  Matrix embeddings() const;
};

struct TrainConfig {
  double step_size = 0.05;
  int max_iters = 20000;
  double grad_tol = 1e-9;
  int batch_pairs = 1000;
  std::uint64_t seed = 0;
  bool backtracking = true;
};

void validate(const TrainConfig& cfg);

struct TrainOutcome {
  FactorMatrix factor;
  double loss = 0.0;
  int iters = 0;
  bool converged = false;
};

/// -2 sum w_xx' f(x)^T f(x') + sum w_x w_x' (f(x)^T f(x'))^2, with the
/// degrees of g mapping the rows of F to embeddings.
double population_spectral_loss(const FactorMatrix& fm, const SymmetricGraph& g);

/// |A - F F^T|_F^2.
double matrix_factorization_loss(const FactorMatrix& fm, const NormalizedGraph& ng);

/// matrix_factorization_loss(fm, normalize(g)) - population_spectral_loss(fm, g).
double loss_gap(const FactorMatrix& fm, const SymmetricGraph& g);

/// V_k diag(sqrt(max(lambda, 0))) from the top-k eigenpairs.
FactorMatrix top_k_factor(const NormalizedGraph& ng, Index k);
FactorMatrix top_k_factor(const Spectrum& s, const DegreeVector& d, Index k);

/// -4 (A - F F^T) F.
Matrix mf_gradient(const FactorMatrix& fm, const NormalizedGraph& ng);

/// Full-gradient descent on |A - F F^T|^2 with optional backtracking.
/// Throws Diverged after 50 consecutive loss increases.
TrainOutcome gd_train(const NormalizedGraph& ng, Index k, const TrainConfig& cfg);

struct PairLossEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int pairs = 0;
};

/// Monte-Carlo estimate of population_spectral_loss from cfg.batch_pairs
/// positive pairs (drawn proportional to edge weight) and as many independent
/// pairs (drawn from the degree marginal). Throws SamplerUnderflow when the
/// graph carries no mass.
PairLossEstimate sample_pair_loss(const SymmetricGraph& edges, const FactorMatrix& fm,
                                  const TrainConfig& cfg);

/// (1 - theta) * estimate on a0_edges + theta * estimate on a_star_edges for
/// one shared F, each component using its own degrees.
PairLossEstimate sample_joint_pair_loss(const SymmetricGraph& a0_edges,
                                        const SymmetricGraph& a_star_edges, double theta,
                                        const Matrix& f, const TrainConfig& cfg);

namespace detail {

Matrix init_factor(Index n, Index k, std::uint64_t seed);

/// Gradient descent driver shared by the single and joint trainers.
TrainOutcome descend(Matrix f, DegreeVector degrees, const TrainConfig& cfg,
                     const std::function<double(const Matrix&)>& loss_fn,
                     const std::function<Matrix(const Matrix&)>& grad_fn);

}  // namespace detail

}  // namespace wscl
