#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "wscl/graph.hpp"
#include "wscl/label_model.hpp"
#include "wscl/rng.hpp"

namespace wscl::test {

/// Two classes, two deterministic samples each.
inline PosteriorMatrix tiny_posteriors() {
  const std::vector<int> y{0, 0, 1, 1};
  return PosteriorMatrix::one_hot(y, 2);
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double lo = 0.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

inline Matrix random_symmetric(Rng& rng, Index n) {
  const Matrix a = random_matrix(rng, n, n, -1.0, 1.0);
  return 0.5 * (a + a.transpose());
}

/// B B^T with a nonnegative B: symmetric, nonnegative and PSD, unit mass.
inline SymmetricGraph random_psd_graph(Rng& rng, Index n, Index rank) {
  const Matrix b = random_matrix(rng, n, rank);
  Matrix w = b * b.transpose();
  w = 0.5 * (w + w.transpose()).eval();
  return SymmetricGraph(w / w.sum(), true);
}

/// Random symmetric nonnegative weights with a positive diagonal.
inline SymmetricGraph random_graph(Rng& rng, Index n) {
  Matrix w = random_matrix(rng, n, n);
  w = 0.5 * (w + w.transpose()).eval();
  w.diagonal().array() += 0.1;
  return SymmetricGraph(w / w.sum(), true);
}

inline std::vector<Index> permutation(Rng& rng, Index n) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    std::swap(p[static_cast<std::size_t>(i)], p[rng.index(static_cast<std::size_t>(i + 1))]);
  }
  return p;
}

/// Soft class-balanced posteriors: `blocks` groups of r cyclic shifts of a
/// random probability vector, rows shuffled. Column sums are all `blocks`.
inline PosteriorMatrix balanced_posteriors(Rng& rng, int r, Index blocks, bool one_hot = false) {
  const Index n = blocks * r;
  Matrix eta(n, r);
  for (Index b = 0; b < blocks; ++b) {
    Vector p(r);
    if (one_hot) {
      p.setZero();
      p[0] = 1.0;
    } else {
      for (int c = 0; c < r; ++c) p[c] = rng.uniform(0.05, 1.0);
      p /= p.sum();
    }
    for (int s = 0; s < r; ++s) {
      for (int c = 0; c < r; ++c) eta(b * r + s, (c + s) % r) = p[c];
    }
  }
  const auto perm = permutation(rng, n);
  Matrix shuffled(n, r);
  for (Index i = 0; i < n; ++i) shuffled.row(i) = eta.row(perm[static_cast<std::size_t>(i)]);
  return PosteriorMatrix(r, shuffled);
}

/// sum_ij (a_ij - b_ij)^2 by explicit loops.
inline double frob_diff(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) s += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
  }
  return std::sqrt(s);
}

/// Eigenvalues from Eigen's solver, descending.
inline Vector oracle_eigenvalues(const Matrix& m) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

}  // namespace wscl::test
