#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wscl/graph.hpp"
#include "wscl/label_model.hpp"

namespace wscl {

/// Inputs shared by the population bounds.
///
/// `nu` holds the eigenvalues of the normalized augmentation graph in
/// descending order; nu_j is 1-based in every formula.
struct BoundInputs {
  double delta_u = 0.0;
  double delta_s = 0.0;
  double rho = 1.0;
  Vector nu;
  Index k = 1;
  double theta = 0.0;
  double alpha = 1.0;
  int r = 2;
  Index n_labeled = 0;
  Index n_unlabeled = 0;
  /// Echo only; the bounds depend on gamma through alpha.
  double gamma = std::numeric_limits<double>::quiet_NaN();
};

/// nu_j with the edge conventions: j < 1 maps to nu_1, j > n maps to 0.
double nu_at(const Vector& nu, Index j);

struct FiniteSampleInputs {
  double rademacher = 0.0;
  double kappa = 1.0;
  double epsilon = 0.0;
  double n = std::numeric_limits<double>::infinity();
  double failure_prob = 0.05;
  /// NaN selects the defaults c1 = k^2 kappa^2 + k kappa, c2 = k kappa^2 + k^2 kappa^4.
  double c1 = std::numeric_limits<double>::quiet_NaN();
  double c2 = std::numeric_limits<double>::quiet_NaN();
};

struct BoundReport {
  double value = 0.0;
  /// 1, 2 or 3: which lambda candidate attained the min (0 when not applicable).
  int active_term = 0;
  double lambda = 0.0;
  /// Minimizing k' for the finite-sample bound, 0 otherwise.
  Index k_prime = 0;
  BoundInputs inputs;
  std::vector<std::string> warnings;
};

/// lambda(nu; theta, alpha) evaluated at index k+1 and the winning term.
struct LambdaTerm {
  double value = 0.0;
  int term = 1;
};

LambdaTerm lambda_term(const Vector& nu, double theta, double alpha, int r, Index k);

/// Eigenvalues of the normalized semi-supervised block graph: 1 repeated
/// n_U + 1 times, then alpha mu_2, ..., alpha mu_{n_L}.
/// Throws NotClassBalanced / Precondition (non-symmetric noise).
Vector predict_label_spectrum(const PosteriorMatrix& y, const NoiseModel& nm,
                              const SemiSupervisedLayout& layout);

/// Same prediction from a precomputed descending spectrum of A_L; the caller
/// vouches for class balance.
Vector predict_label_spectrum(const Vector& mu, const NoiseModel& nm,
                              const SemiSupervisedLayout& layout);

/// Deterministic labels: {1 x (n_U + 1), alpha x (r - 1), 0 x rest}.
Vector predict_deterministic_spectrum(const NoiseModel& nm, const SemiSupervisedLayout& layout);

struct EigInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Weyl interval for lambda_{k+1} of (1 - theta) A0 + theta A* in the
/// deterministic class-balanced scenario. Terms whose indices fall outside
/// [1, n] are dropped. Throws IndexOutOfRange when k + 1 > n.
EigInterval mixed_eig_bounds(const Vector& nu, const NoiseModel& nm,
                             const SemiSupervisedLayout& layout, double theta, Index k);

/// 2[2 du + ((1 + rho) ds - 2 du) theta] / ((1 - theta)(1 - nu_{k+1})) + 8 du.
BoundReport semi_bound(const BoundInputs& bi);

/// 2[2 du + c theta] / (1 - lambda) + 8 du with
/// c = alpha (1 + rho) ds - 2 du + (1 - alpha).
BoundReport noisy_bound(const BoundInputs& bi);

/// ((r - 1)/r)(1 - sqrt((1 - nu_{k+1} - 2 du) / ((1 - (1 + rho) ds)(1 - nu_{k+1})))).
/// Below it theta = 1 gives the smaller bound, above it theta = 0.
double gamma_threshold(const BoundInputs& bi);

struct EndpointResult {
  double theta_star = 0.0;
  std::vector<double> values;
  /// Set when an interior grid point beats both endpoints by more than the margin.
  bool interior_violation = false;
  double violation_margin = 0.0;
};

/// Evaluates noisy_bound over the grid (which must contain 0 and 1).
/// Ties go to the smallest theta.
EndpointResult endpoint_argmin(const BoundInputs& bi, std::span<const double> theta_grid);

struct FiniteSampleReport {
  BoundReport report;
  std::vector<Index> k_primes;
  std::vector<double> approx_terms;
  std::vector<double> sample_terms;
};

/// min over k' in [k_lo, k_hi] (clipped to [1, k + 1 - r]) of the
/// approximation term plus the sample term, plus 8 du.
/// Throws EmptyKRange / DegenerateDenominator.
FiniteSampleReport finite_sample_bound(const BoundInputs& bi, const FiniteSampleInputs& fsi,
                                       Index k_lo, Index k_hi);

/// sum_ij sqrt(w_i w_j) M_ij 1[y_i != y_j] for M = (1 - theta) A0 + theta A*,
/// with w the degrees carried by a0.
double compute_phi_hat(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta,
                       std::span<const int> labels);

/// 2 du + (alpha (1 + rho) ds - 2 du + (1 - alpha)) theta.
double phi_hat_bound(const BoundInputs& bi);

}  // namespace wscl
