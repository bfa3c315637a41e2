#include "wscl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wscl/error.hpp"
#include "wscl/rng.hpp"

namespace wscl {

Matrix FactorMatrix::embeddings() const {
  return degrees.values().cwiseSqrt().cwiseInverse().asDiagonal() * f;
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.step_size > 0.0)) throw Error(ErrorCode::kConfigInvalid, "step_size must be > 0");
  if (!(cfg.grad_tol > 0.0)) throw Error(ErrorCode::kConfigInvalid, "grad_tol must be > 0");
  if (cfg.max_iters < 0) throw Error(ErrorCode::kConfigInvalid, "max_iters must be >= 0");
  if (cfg.batch_pairs < 1) throw Error(ErrorCode::kConfigInvalid, "batch_pairs must be >= 1");
}

double population_spectral_loss(const FactorMatrix& fm, const SymmetricGraph& g) {
  if (fm.n() != g.n()) throw Error(ErrorCode::kDimensionMismatch, "factor rows differ from graph size");
  const DegreeVector d = degrees(g);
  const Matrix e = d.values().cwiseSqrt().cwiseInverse().asDiagonal() * fm.f;
  const Matrix gram = e * e.transpose();
  const Matrix marg = d.values() * d.values().transpose();
  return -2.0 * g.weights().cwiseProduct(gram).sum() +
         marg.cwiseProduct(gram.cwiseProduct(gram)).sum();
}

double matrix_factorization_loss(const FactorMatrix& fm, const NormalizedGraph& ng) {
  if (fm.n() != ng.n()) throw Error(ErrorCode::kDimensionMismatch, "factor rows differ from graph size");
  return (ng.matrix - fm.f * fm.f.transpose()).squaredNorm();
}

double loss_gap(const FactorMatrix& fm, const SymmetricGraph& g) {
  return matrix_factorization_loss(fm, normalize(g)) - population_spectral_loss(fm, g);
}

FactorMatrix top_k_factor(const Spectrum& s, const DegreeVector& d, Index k) {
  if (k < 1 || k > s.n()) {
    throw Error(ErrorCode::kInvalidArgument, "k=" + std::to_string(k) + " outside [1, " +
                                                 std::to_string(s.n()) + "]");
  }
  if (d.size() != s.n()) throw Error(ErrorCode::kDimensionMismatch, "degrees differ from spectrum size");
  const Vector scale = s.values.head(k).cwiseMax(0.0).cwiseSqrt();
  return FactorMatrix{s.vectors.leftCols(k) * scale.asDiagonal(), d};
}

FactorMatrix top_k_factor(const NormalizedGraph& ng, Index k) {
  return top_k_factor(eigh(ng.matrix), ng.source_degrees, k);
}

Matrix mf_gradient(const FactorMatrix& fm, const NormalizedGraph& ng) {
  if (fm.n() != ng.n()) throw Error(ErrorCode::kDimensionMismatch, "factor rows differ from graph size");
  return -4.0 * (ng.matrix - fm.f * fm.f.transpose()) * fm.f;
}

namespace detail {

Matrix init_factor(Index n, Index k, std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(n * k));
  Matrix f(n, k);
  // Row-major fill keeps the stream layout independent of Eigen's storage order.
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) f(i, j) = rng.uniform(-bound, bound);
  }
  return f;
}

TrainOutcome descend(Matrix f, DegreeVector degrees, const TrainConfig& cfg,
                     const std::function<double(const Matrix&)>& loss_fn,
                     const std::function<Matrix(const Matrix&)>& grad_fn) {
  validate(cfg);
  constexpr int kMaxHalvings = 30;
  constexpr int kDivergeRun = 50;
  double loss = loss_fn(f);
  int increases = 0;
  int it = 0;
  bool converged = false;
  for (; it < cfg.max_iters; ++it) {
    const Matrix g = grad_fn(f);
    if (g.norm() <= cfg.grad_tol) {
      converged = true;
      break;
    }
    double step = cfg.step_size;
    Matrix cand = f - step * g;
    double cand_loss = loss_fn(cand);
    if (cfg.backtracking) {
      int halvings = 0;
      while (!(cand_loss <= loss) && halvings < kMaxHalvings) {
        step *= 0.5;
        cand = f - step * g;
        cand_loss = loss_fn(cand);
        ++halvings;
      }
      // No descent at step_size * 2^-30: stationary to working precision.
      if (!(cand_loss <= loss)) {
        converged = true;
        break;
      }
    }
    if (!std::isfinite(cand_loss)) throw Error(ErrorCode::kDiverged, "loss is no longer finite");
    if (cand_loss > loss) {
      if (++increases >= kDivergeRun) {
        throw Error(ErrorCode::kDiverged, "loss increased for " + std::to_string(kDivergeRun) +
                                              " consecutive iterations");
      }
    } else {
      increases = 0;
    }
    f = std::move(cand);
    loss = cand_loss;
  }
  return TrainOutcome{FactorMatrix{std::move(f), std::move(degrees)}, loss, it, converged};
}

}  // namespace detail

TrainOutcome gd_train(const NormalizedGraph& ng, Index k, const TrainConfig& cfg) {
  if (k < 1 || k > ng.n()) throw Error(ErrorCode::kInvalidArgument, "k outside [1, n]");
  const Matrix& a = ng.matrix;
  return detail::descend(
      detail::init_factor(ng.n(), k, cfg.seed), ng.source_degrees, cfg,
      [&](const Matrix& f) { return (a - f * f.transpose()).squaredNorm(); },
      [&](const Matrix& f) -> Matrix { return -4.0 * (a - f * f.transpose()) * f; });
}

namespace {

class CumulativeSampler {
 public:
  explicit CumulativeSampler(const double* w, std::size_t count) : prefix_(count) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      acc += w[i];
      prefix_[i] = acc;
    }
  }

  double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform() * total();
    auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
    // upper_bound never lands on a zero-weight entry.
    if (it == prefix_.end()) --it;
    return static_cast<std::size_t>(it - prefix_.begin());
  }

 private:
  std::vector<double> prefix_;
};

struct TermStats {
  double mean = 0.0;
  double var = 0.0;
};

TermStats stats(const std::vector<double>& xs) {
  TermStats s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    for (double x : xs) s.var += (x - s.mean) * (x - s.mean);
    s.var /= static_cast<double>(xs.size() - 1);
  }
  return s;
}

PairLossEstimate estimate(const SymmetricGraph& edges, const Matrix& f, const TrainConfig& cfg,
                          std::uint64_t seed) {
  if (f.rows() != edges.n()) throw Error(ErrorCode::kDimensionMismatch, "factor rows differ from graph size");
  if (cfg.batch_pairs < 1) throw Error(ErrorCode::kConfigInvalid, "batch_pairs must be >= 1");
  const Index n = edges.n();
  // Row-major copy so flat indices decode as (i, j) = (idx / n, idx % n).
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = edges.weights();
  const CumulativeSampler pos(w.data(), static_cast<std::size_t>(w.size()));
  const double mass = pos.total();
  if (!(mass >= kTol.sampler_floor)) {
    throw Error(ErrorCode::kSamplerUnderflow, "graph mass below the sampler floor");
  }
  const Vector deg = w.rowwise().sum();
  const CumulativeSampler marg(deg.data(), static_cast<std::size_t>(n));
  // Isolated vertices are never drawn; give them a zero embedding.
  const Vector inv_sqrt = (deg.array() > 0.0).select(deg.cwiseSqrt().cwiseInverse(), 0.0);
  const Matrix e = inv_sqrt.asDiagonal() * f;

  Rng rng(seed);
  const auto b = static_cast<std::size_t>(cfg.batch_pairs);
  std::vector<double> pos_terms(b), ind_terms(b);
  for (std::size_t t = 0; t < b; ++t) {
    const std::size_t idx = pos.draw(rng);
    const Index i = static_cast<Index>(idx) / n;
    const Index j = static_cast<Index>(idx) % n;
    pos_terms[t] = e.row(i).dot(e.row(j));
  }
  for (std::size_t t = 0; t < b; ++t) {
    const auto i = static_cast<Index>(marg.draw(rng));
    const auto j = static_cast<Index>(marg.draw(rng));
    const double dot = e.row(i).dot(e.row(j));
    ind_terms[t] = dot * dot;
  }
  const TermStats sp = stats(pos_terms);
  const TermStats si = stats(ind_terms);
  const double bd = static_cast<double>(b);
  PairLossEstimate out;
  out.value = -2.0 * mass * sp.mean + mass * mass * si.mean;
  out.std_error = std::sqrt(4.0 * mass * mass * sp.var / bd + std::pow(mass, 4) * si.var / bd);
  out.pairs = cfg.batch_pairs;
  return out;
}

}  // namespace

PairLossEstimate sample_pair_loss(const SymmetricGraph& edges, const FactorMatrix& fm,
                                  const TrainConfig& cfg) {
  return estimate(edges, fm.f, cfg, cfg.seed);
}

PairLossEstimate sample_joint_pair_loss(const SymmetricGraph& a0_edges,
                                        const SymmetricGraph& a_star_edges, double theta,
                                        const Matrix& f, const TrainConfig& cfg) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::kThetaOutOfRange, "theta outside [0, 1]");
  const PairLossEstimate u = estimate(a0_edges, f, cfg, derive_seed({cfg.seed, 0}));
  const PairLossEstimate s = estimate(a_star_edges, f, cfg, derive_seed({cfg.seed, 1}));
  PairLossEstimate out;
  out.value = (1.0 - theta) * u.value + theta * s.value;
  out.std_error = std::hypot((1.0 - theta) * u.std_error, theta * s.std_error);
  out.pairs = u.pairs + s.pairs;
  return out;
}

}  // namespace wscl
