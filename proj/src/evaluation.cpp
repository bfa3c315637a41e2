#include "wscl/evaluation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wscl/bounds.hpp"
#include "wscl/error.hpp"

namespace wscl {

namespace {

void check_world(const FactorMatrix& fm, const World& w) {
  if (fm.n() != w.n()) throw Error(ErrorCode::kDimensionMismatch, "factor rows differ from world size");
}

int argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (Index c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = static_cast<int>(c);
  }
  return best;
}

}  // namespace

LinearProbe fit_probe(const FactorMatrix& fm, const World& w, double ridge) {
  check_world(fm, w);
  if (!(ridge >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "ridge must be >= 0");
  const Matrix e = fm.embeddings();
  const Vector marg = degrees(w.aug_graph).values();
  Matrix targets = Matrix::Zero(w.n(), w.r);
  for (Index x = 0; x < w.n(); ++x) targets(x, w.label_of(x)) = 1.0;

  const Matrix we = marg.asDiagonal() * e;
  Matrix normal = e.transpose() * we;
  normal.diagonal().array() += ridge;
  const Matrix rhs = we.transpose() * targets;

  const Eigen::SelfAdjointEigenSolver<Matrix> es(normal, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kTol.singular_condition) {
    const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::kSingularSystem, "probe normal matrix condition " + std::to_string(cond));
  }
  LinearProbe probe;
  probe.b = normal.ldlt().solve(rhs);
  probe.frobenius_norm = probe.b.norm();
  return probe;
}

std::vector<int> probe_predict(const FactorMatrix& fm, const LinearProbe& probe) {
  if (probe.b.rows() != fm.k()) throw Error(ErrorCode::kDimensionMismatch, "probe rows differ from k");
  const Matrix scores = fm.embeddings() * probe.b;
  std::vector<int> out(static_cast<std::size_t>(fm.n()));
  for (Index x = 0; x < fm.n(); ++x) out[static_cast<std::size_t>(x)] = argmax_row(scores.row(x));
  return out;
}

double per_aug_error(const FactorMatrix& fm, const LinearProbe& probe, const World& w) {
  check_world(fm, w);
  const std::vector<int> pred = probe_predict(fm, probe);
  double err = 0.0;
  for (Index j = 0; j < w.naturals(); ++j) {
    const int y = w.label_of_natural[static_cast<std::size_t>(j)];
    double miss = 0.0;
    for (Index x = 0; x < w.n(); ++x) {
      if (pred[static_cast<std::size_t>(x)] != y) miss += w.aug_dist(j, x);
    }
    err += w.natural_prior[j] * miss;
  }
  return err;
}

std::vector<int> natural_vote_predict(const FactorMatrix& fm, const LinearProbe& probe,
                                      const World& w) {
  check_world(fm, w);
  const std::vector<int> pred = probe_predict(fm, probe);
  std::vector<int> out(static_cast<std::size_t>(w.naturals()));
  Eigen::RowVectorXd votes(w.r);
  for (Index j = 0; j < w.naturals(); ++j) {
    votes.setZero();
    for (Index x = 0; x < w.n(); ++x) votes[pred[static_cast<std::size_t>(x)]] += w.aug_dist(j, x);
    out[static_cast<std::size_t>(j)] = argmax_row(votes);
  }
  return out;
}

double natural_vote_error(const FactorMatrix& fm, const LinearProbe& probe, const World& w) {
  const std::vector<int> votes = natural_vote_predict(fm, probe, w);
  double err = 0.0;
  for (Index j = 0; j < w.naturals(); ++j) {
    if (votes[static_cast<std::size_t>(j)] != w.label_of_natural[static_cast<std::size_t>(j)]) {
      err += w.natural_prior[j];
    }
  }
  return err;
}

Deltas compute_deltas(const World& w, std::span<const int> yhat) {
  if (yhat.size() != static_cast<std::size_t>(w.n())) {
    throw Error(ErrorCode::kDimensionMismatch, "labeler does not cover every augmented point");
  }
  Deltas d;
  for (Index j = 0; j < w.naturals(); ++j) {
    const int y = w.label_of_natural[static_cast<std::size_t>(j)];
    double miss = 0.0;
    for (Index x = 0; x < w.n(); ++x) {
      if (yhat[static_cast<std::size_t>(x)] != y) miss += w.aug_dist(j, x);
    }
    d.delta_u += w.natural_prior[j] * miss;
  }
  const Index nl = w.layout.n_labeled;
  if (nl > 0) {
    const Matrix& eta = w.posteriors.eta();
    double miss = 0.0;
    for (Index i = 0; i < nl; ++i) {
      for (Index c = 0; c < eta.cols(); ++c) {
        if (yhat[static_cast<std::size_t>(i)] != c) miss += eta(i, c);
      }
    }
    d.delta_s = miss / static_cast<double>(nl);
  }
  return d;
}

double theorem_norm_cap(const Vector& nu, Index k, double theta) {
  const double den = (1.0 - theta) * nu_at(nu, k);
  return den > 0.0 ? 1.0 / den : std::numeric_limits<double>::infinity();
}

EvalReport evaluate(const FactorMatrix& fm, const World& w, const Vector& nu, double theta,
                    double ridge) {
  const LinearProbe probe = fit_probe(fm, w, ridge);
  const Deltas d = compute_deltas(w, bayes_labeler(w));
  EvalReport rep;
  rep.per_aug_error = per_aug_error(fm, probe, w);
  rep.natural_vote_error = natural_vote_error(fm, probe, w);
  rep.delta_u = d.delta_u;
  rep.delta_s = d.delta_s;
  rep.probe_norm = probe.frobenius_norm;
  rep.theorem_norm_cap = theorem_norm_cap(nu, fm.k(), theta);
  rep.gate = rep.probe_norm <= rep.theorem_norm_cap;
  return rep;
}

}  // namespace wscl
