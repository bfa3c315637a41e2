#include "wscl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wscl/error.hpp"

namespace wscl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_common(const BoundInputs& bi) {
  if (!(bi.delta_u >= 0.0) || !(bi.delta_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta_u and delta_s must be >= 0");
  }
  if (!(bi.rho >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "rho must be >= 1");
  if (!(bi.theta >= 0.0 && bi.theta <= 1.0)) {
    throw Error(ErrorCode::kThetaOutOfRange, "theta " + std::to_string(bi.theta) + " outside [0, 1]");
  }
  if (!(bi.alpha >= 0.0 && bi.alpha <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha outside [0, 1]");
  if (bi.r < 2) throw Error(ErrorCode::kInvalidArgument, "r must be >= 2");
  if (bi.nu.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty nu spectrum");
  if (bi.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
}

void add_ordering_warning(BoundReport& rep) {
  if (rep.inputs.delta_s > rep.inputs.delta_u) {
    rep.warnings.push_back("delta_s exceeds delta_u");
  }
}

double noisy_numerator(const BoundInputs& bi) {
  const double c = bi.alpha * (1.0 + bi.rho) * bi.delta_s - 2.0 * bi.delta_u + (1.0 - bi.alpha);
  return 2.0 * (2.0 * bi.delta_u + c * bi.theta);
}

}  // namespace

double nu_at(const Vector& nu, Index j) {
  if (nu.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty nu spectrum");
  if (j < 1) return nu[0];
  if (j > nu.size()) return 0.0;
  return nu[j - 1];
}

LambdaTerm lambda_term(const Vector& nu, double theta, double alpha, int r, Index k) {
  const double t1 = theta + (1.0 - theta) * nu_at(nu, k + 1);
  const double t2 = theta * alpha + (1.0 - theta) * nu_at(nu, k);
  const double t3 = (1.0 - theta) * nu_at(nu, k + 1 - r);
  LambdaTerm out{t1, 1};
  if (t2 < out.value) out = {t2, 2};
  if (t3 < out.value) out = {t3, 3};
  return out;
}

Vector predict_label_spectrum(const Vector& mu, const NoiseModel& nm,
                              const SemiSupervisedLayout& layout) {
  if (!nm.symmetric) throw Error(ErrorCode::kPrecondition, "prediction needs symmetric label noise");
  if (mu.size() != layout.n_labeled) {
    throw Error(ErrorCode::kDimensionMismatch, "mu spectrum does not match n_labeled");
  }
  Vector out(layout.n());
  if (layout.n_labeled == 0) {
    out.setOnes();
    return out;
  }
  out.head(layout.n_unlabeled + 1).setOnes();
  out.tail(layout.n_labeled - 1) = nm.alpha * mu.tail(layout.n_labeled - 1);
  return out;
}

Vector predict_label_spectrum(const PosteriorMatrix& y, const NoiseModel& nm,
                              const SemiSupervisedLayout& layout) {
  if (y.n_labeled() != layout.n_labeled) {
    throw Error(ErrorCode::kDimensionMismatch, "posterior rows do not match layout.n_labeled");
  }
  if (y.classes() != nm.r) throw Error(ErrorCode::kDimensionMismatch, "class counts differ");
  if (layout.n_labeled == 0) return Vector::Ones(layout.n());
  if (!y.is_class_balanced()) {
    throw Error(ErrorCode::kNotClassBalanced, "prediction requires class-balanced labels");
  }
  return predict_label_spectrum(eigh(normalize(label_graph(y)).matrix).values, nm, layout);
}

Vector predict_deterministic_spectrum(const NoiseModel& nm, const SemiSupervisedLayout& layout) {
  if (!nm.symmetric) throw Error(ErrorCode::kPrecondition, "prediction needs symmetric label noise");
  if (layout.n_labeled == 0) return Vector::Ones(layout.n());
  if (layout.n_labeled < nm.r) {
    throw Error(ErrorCode::kNotClassBalanced, "deterministic prediction needs n_L >= r");
  }
  Vector out = Vector::Zero(layout.n());
  out.head(layout.n_unlabeled + 1).setOnes();
  out.segment(layout.n_unlabeled + 1, nm.r - 1).setConstant(nm.alpha);
  return out;
}

EigInterval mixed_eig_bounds(const Vector& nu, const NoiseModel& nm,
                             const SemiSupervisedLayout& layout, double theta, Index k) {
  if (!nm.symmetric) throw Error(ErrorCode::kPrecondition, "interval needs symmetric label noise");
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::kThetaOutOfRange, "theta outside [0, 1]");
  const Index n = layout.n();
  if (nu.size() != n) throw Error(ErrorCode::kDimensionMismatch, "nu does not match layout size");
  if (k < 0 || k + 1 > n) {
    throw Error(ErrorCode::kIndexOutOfRange, "lambda_" + std::to_string(k + 1) + " with n=" +
                                                 std::to_string(n));
  }
  const Index nl = layout.n_labeled;
  const Index nu_cnt = layout.n_unlabeled;
  const int r = nm.r;
  const double a = nm.alpha;
  auto v = [&](Index j) { return nu_at(nu, j); };
  auto valid = [&](Index j) { return j >= 1 && j <= n; };

  if (nl == 0) {
    const double exact = theta + (1.0 - theta) * v(k + 1);
    return {exact, exact};
  }
  if (nl < r) throw Error(ErrorCode::kNotClassBalanced, "interval needs n_L >= r");

  // Lower: lambda_{i+j-n}(A+B) >= a_i + b_j, each block of B at its last index.
  double lower = (1.0 - theta) * v(k + 1);
  if (valid(nl + k)) lower = std::max(lower, theta + (1.0 - theta) * v(nl + k));
  if (valid(nl + k - r + 1)) lower = std::max(lower, theta * a + (1.0 - theta) * v(nl + k - r + 1));

  // Upper: lambda_{i+j-1}(A+B) <= a_i + b_j, each block of B at its first index.
  double upper = theta + (1.0 - theta) * v(k + 1);
  if (k >= nu_cnt + 1) upper = std::min(upper, theta * a + (1.0 - theta) * v(k - nu_cnt));
  if (k >= nu_cnt + r) upper = std::min(upper, (1.0 - theta) * v(k + 1 - r - nu_cnt));
  return {lower, upper};
}

BoundReport semi_bound(const BoundInputs& bi) {
  check_common(bi);
  if (std::abs(bi.alpha - 1.0) > 1e-15) {
    throw Error(ErrorCode::kPrecondition, "semi-supervised bound assumes clean labels (alpha = 1)");
  }
  if (bi.k > bi.n_unlabeled) {
    throw Error(ErrorCode::kPrecondition, "semi-supervised bound needs k <= n_U");
  }
  const double nu1 = nu_at(bi.nu, bi.k + 1);
  const double denom = (1.0 - bi.theta) * (1.0 - nu1);
  if (denom <= kTol.degenerate) {
    throw Error(ErrorCode::kDegenerateDenominator, "1 - theta - (1 - theta) nu_{k+1} is not positive");
  }
  const double numer =
      2.0 * (2.0 * bi.delta_u + ((1.0 + bi.rho) * bi.delta_s - 2.0 * bi.delta_u) * bi.theta);
  BoundReport rep;
  rep.inputs = bi;
  rep.lambda = bi.theta + (1.0 - bi.theta) * nu1;
  rep.active_term = 1;
  rep.value = numer / denom + 8.0 * bi.delta_u;
  add_ordering_warning(rep);
  return rep;
}

BoundReport noisy_bound(const BoundInputs& bi) {
  check_common(bi);
  if (bi.k <= bi.r) throw Error(ErrorCode::kPrecondition, "noisy bound needs k > r");
  if (bi.n_unlabeled != 0) throw Error(ErrorCode::kPrecondition, "noisy bound covers n_U = 0");
  const LambdaTerm lam = lambda_term(bi.nu, bi.theta, bi.alpha, bi.r, bi.k);
  const double denom = 1.0 - lam.value;
  if (denom <= kTol.degenerate) {
    throw Error(ErrorCode::kDegenerateDenominator, "1 - lambda is not positive");
  }
  BoundReport rep;
  rep.inputs = bi;
  rep.lambda = lam.value;
  rep.active_term = lam.term;
  rep.value = noisy_numerator(bi) / denom + 8.0 * bi.delta_u;
  add_ordering_warning(rep);
  return rep;
}

double gamma_threshold(const BoundInputs& bi) {
  check_common(bi);
  const double nu1 = nu_at(bi.nu, bi.k + 1);
  const double sup = 1.0 - (1.0 + bi.rho) * bi.delta_s;
  if (!(sup > 0.0)) throw Error(ErrorCode::kUndefinedThreshold, "(1 + rho) delta_s >= 1");
  if (!(1.0 - nu1 > kTol.degenerate)) throw Error(ErrorCode::kUndefinedThreshold, "nu_{k+1} = 1");
  const double radicand = (1.0 - nu1 - 2.0 * bi.delta_u) / (sup * (1.0 - nu1));
  if (radicand < 0.0) {
    throw Error(ErrorCode::kUndefinedThreshold, "negative radicand: theta = 1 wins for every gamma");
  }
  const double r = bi.r;
  return (r - 1.0) / r * (1.0 - std::sqrt(radicand));
}

EndpointResult endpoint_argmin(const BoundInputs& bi, std::span<const double> theta_grid) {
  const bool has0 = std::find(theta_grid.begin(), theta_grid.end(), 0.0) != theta_grid.end();
  const bool has1 = std::find(theta_grid.begin(), theta_grid.end(), 1.0) != theta_grid.end();
  if (!has0 || !has1) throw Error(ErrorCode::kInvalidArgument, "theta grid must contain 0 and 1");
  EndpointResult out;
  out.values.reserve(theta_grid.size());
  double best = kInf;
  double v0 = kInf, v1 = kInf, interior = kInf;
  BoundInputs cur = bi;
  for (double t : theta_grid) {
    cur.theta = t;
    const double v = noisy_bound(cur).value;
    out.values.push_back(v);
    if (v < best || (v == best && t < out.theta_star)) {
      best = v;
      out.theta_star = t;
    }
    if (t == 0.0) v0 = v;
    else if (t == 1.0) v1 = v;
    else interior = std::min(interior, v);
  }
  const double ends = std::min(v0, v1);
  if (interior < ends - kTol.endpoint_margin) {
    out.interior_violation = true;
    out.violation_margin = ends - interior;
  }
  return out;
}

FiniteSampleReport finite_sample_bound(const BoundInputs& bi, const FiniteSampleInputs& fsi,
                                       Index k_lo, Index k_hi) {
  check_common(bi);
  if (!(fsi.rademacher >= 0.0) || !(fsi.kappa > 0.0) || !(fsi.epsilon >= 0.0) || !(fsi.n > 0.0) ||
      !(fsi.failure_prob > 0.0 && fsi.failure_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "finite-sample inputs out of range");
  }
  const Index lo = std::max<Index>(k_lo, 1);
  const Index hi = std::min<Index>(k_hi, bi.k + 1 - bi.r);
  if (lo > hi) {
    throw Error(ErrorCode::kEmptyKRange, "no k' in [" + std::to_string(k_lo) + ", " +
                                             std::to_string(k_hi) + "] within [1, k + 1 - r]");
  }
  const double k = static_cast<double>(bi.k);
  const double kap = fsi.kappa;
  const double c1 = std::isnan(fsi.c1) ? k * k * kap * kap + k * kap : fsi.c1;
  const double c2 = std::isnan(fsi.c2) ? k * kap * kap + k * k * std::pow(kap, 4) : fsi.c2;
  const double conc = std::isinf(fsi.n) ? 0.0 : std::sqrt(std::log(2.0 / fsi.failure_prob) / fsi.n);
  const double sample_numer = c1 * fsi.rademacher + c2 * (conc + fsi.epsilon);
  const double phi = noisy_numerator(bi);
  const double lam_k1 = lambda_term(bi.nu, bi.theta, bi.alpha, bi.r, bi.k).value;

  FiniteSampleReport out;
  double best = kInf;
  for (Index kp = lo; kp <= hi; ++kp) {
    const LambdaTerm lam = lambda_term(bi.nu, bi.theta, bi.alpha, bi.r, kp);
    const double approx_den = 1.0 - lam.value;
    double approx = 0.0;
    if (phi > 0.0) approx = approx_den > kTol.degenerate ? phi / approx_den : kInf;
    const double gap = (1.0 - bi.theta) * nu_at(bi.nu, kp) - lam_k1;
    double sample = 0.0;
    if (sample_numer > 0.0) {
      sample = gap > kTol.degenerate ? 4.0 * static_cast<double>(kp) * sample_numer / (gap * gap) : kInf;
    }
    out.k_primes.push_back(kp);
    out.approx_terms.push_back(approx);
    out.sample_terms.push_back(sample);
    if (approx + sample < best) {
      best = approx + sample;
      out.report.k_prime = kp;
      out.report.lambda = lam.value;
      out.report.active_term = lam.term;
    }
  }
  if (std::isinf(best)) {
    throw Error(ErrorCode::kDegenerateDenominator, "every k' has a vanishing denominator");
  }
  out.report.inputs = bi;
  out.report.value = best + 8.0 * bi.delta_u;
  add_ordering_warning(out.report);
  return out;
}

double compute_phi_hat(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta,
                       std::span<const int> labels) {
  if (a0.n() != a_star.n() || static_cast<std::size_t>(a0.n()) != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "phi_hat inputs differ in size");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::kThetaOutOfRange, "theta outside [0, 1]");
  const Vector s = a0.source_degrees.values().cwiseSqrt();
  const Index n = a0.n();
  double sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) continue;
      const double m = (1.0 - theta) * a0.matrix(i, j) + theta * a_star.matrix(i, j);
      sum += s[i] * s[j] * m;
    }
  }
  return sum;
}

double phi_hat_bound(const BoundInputs& bi) {
  check_common(bi);
  return 0.5 * noisy_numerator(bi);
}

}  // namespace wscl
