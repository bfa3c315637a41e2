#include "wscl/label_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wscl/error.hpp"

namespace wscl {

PosteriorMatrix::PosteriorMatrix(Matrix eta, const Tolerances& tol)
    : PosteriorMatrix(static_cast<Index>(eta.cols()), Matrix(eta), tol) {}

PosteriorMatrix::PosteriorMatrix(Index classes, Matrix eta, const Tolerances& tol)
    : classes_(classes), eta_(std::move(eta)) {
  if (eta_.cols() != classes_) {
    throw Error(ErrorCode::kDimensionMismatch, "posterior column count differs from class count");
  }
  for (Index i = 0; i < eta_.rows(); ++i) {
    const double row_sum = eta_.row(i).sum();
    if (std::abs(row_sum - 1.0) > tol.posterior_row_sum) {
      throw Error(ErrorCode::kInvalidArgument,
                  "posterior row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
    }
    if (eta_.row(i).minCoeff() < 0.0 || eta_.row(i).maxCoeff() > 1.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "posterior row " + std::to_string(i) + " leaves [0, 1]");
    }
  }
}

PosteriorMatrix PosteriorMatrix::one_hot(std::span<const int> labels, int r) {
  Matrix eta = Matrix::Zero(static_cast<Index>(labels.size()), r);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= r) {
      throw Error(ErrorCode::kInvalidArgument, "label out of range at " + std::to_string(i));
    }
    eta(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return PosteriorMatrix(r, std::move(eta));
}

bool PosteriorMatrix::is_class_balanced(double tol) const {
  if (classes_ == 0) return false;
  const double target = static_cast<double>(n_labeled()) / static_cast<double>(classes_);
  return ((class_counts().array() - target).abs() <= tol).all();
}

NoiseModel make_noise_model(int r, double gamma) {
  if (r < 2) throw Error(ErrorCode::kInvalidArgument, "noise model needs r >= 2");
  const double limit = static_cast<double>(r - 1) / static_cast<double>(r);
  if (!(gamma >= 0.0) || !(gamma < limit)) {
    throw Error(ErrorCode::kNoiseRateOutOfRange,
                "gamma " + std::to_string(gamma) + " outside [0, " + std::to_string(limit) + ")");
  }
  NoiseModel nm;
  nm.r = r;
  nm.gamma = gamma;
  const double off = gamma / static_cast<double>(r - 1);
  nm.transition = Matrix::Constant(r, r, off);
  nm.transition.diagonal().setConstant(1.0 - gamma);
  const double shrink = 1.0 - static_cast<double>(r) * off;
  nm.alpha = shrink * shrink;
  nm.beta = off * (2.0 - static_cast<double>(r) * off);
  nm.symmetric = true;
  return nm;
}

NoiseModel NoiseModel::from_transition(Matrix transition) {
  if (transition.rows() != transition.cols() || transition.rows() < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "transition must be square with r >= 2");
  }
  for (Index i = 0; i < transition.rows(); ++i) {
    if (std::abs(transition.row(i).sum() - 1.0) > kTol.posterior_row_sum ||
        transition.row(i).minCoeff() < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "transition rows must be probability vectors");
    }
  }
  NoiseModel nm;
  nm.r = static_cast<int>(transition.rows());
  nm.gamma = std::numeric_limits<double>::quiet_NaN();
  nm.transition = std::move(transition);
  nm.alpha = std::numeric_limits<double>::quiet_NaN();
  nm.beta = std::numeric_limits<double>::quiet_NaN();
  nm.symmetric = false;
  return nm;
}

namespace {

void require_classes(const PosteriorMatrix& y, const NoiseModel& nm) {
  if (y.classes() != nm.r) {
    throw Error(ErrorCode::kDimensionMismatch, "posterior has " + std::to_string(y.classes()) +
                                                   " classes, noise model " + std::to_string(nm.r));
  }
}

}  // namespace

PosteriorMatrix apply_noise(const PosteriorMatrix& y, const NoiseModel& nm) {
  require_classes(y, nm);
  return PosteriorMatrix(y.classes(), y.eta() * nm.transition);
}

SymmetricGraph label_graph(const PosteriorMatrix& y) {
  return SymmetricGraph(y.eta() * y.eta().transpose());
}

SymmetricGraph noisy_label_graph(const PosteriorMatrix& y, const NoiseModel& nm) {
  return label_graph(apply_noise(y, nm));
}

SymmetricGraph semi_block_graph(const SymmetricGraph& labeled_block,
                                const SemiSupervisedLayout& layout) {
  if (labeled_block.n() != layout.n_labeled) {
    throw Error(ErrorCode::kDimensionMismatch, "labeled block does not match layout");
  }
  Matrix w = Matrix::Zero(layout.n(), layout.n());
  w.topLeftCorner(layout.n_labeled, layout.n_labeled) = labeled_block.weights();
  w.bottomRightCorner(layout.n_unlabeled, layout.n_unlabeled).setIdentity();
  return SymmetricGraph(std::move(w));
}

SymmetricGraph semi_block_graph(const PosteriorMatrix& y, const NoiseModel& nm,
                                const SemiSupervisedLayout& layout) {
  if (y.n_labeled() != layout.n_labeled) {
    throw Error(ErrorCode::kDimensionMismatch, "posterior rows do not match layout.n_labeled");
  }
  return semi_block_graph(noisy_label_graph(y, nm), layout);
}

DegreeVector label_block_degrees(const PosteriorMatrix& y, const NoiseModel& nm,
                                 const SemiSupervisedLayout& layout) {
  require_classes(y, nm);
  if (!nm.symmetric) {
    throw Error(ErrorCode::kPrecondition, "closed-form degrees need symmetric label noise");
  }
  if (y.n_labeled() != layout.n_labeled) {
    throw Error(ErrorCode::kDimensionMismatch, "posterior rows do not match layout.n_labeled");
  }
  Vector d = Vector::Ones(layout.n());
  const Vector counts = y.class_counts();
  d.head(layout.n_labeled) = (nm.alpha * (y.eta() * counts)).array() +
                             static_cast<double>(layout.n_labeled) * nm.beta;
  return DegreeVector(std::move(d));
}

NormalizedGraph normalize_label_block(const SymmetricGraph& a_star, const PosteriorMatrix& y,
                                      const NoiseModel& nm) {
  const SemiSupervisedLayout layout{y.n_labeled(), a_star.n() - y.n_labeled()};
  if (layout.n_unlabeled < 0) {
    throw Error(ErrorCode::kDimensionMismatch, "graph smaller than labeled block");
  }
  return normalize_with(a_star, label_block_degrees(y, nm, layout));
}

NormalizedGraph lemma41_closed_form(const PosteriorMatrix& y, const NoiseModel& nm,
                                    const SemiSupervisedLayout& layout) {
  require_classes(y, nm);
  if (!nm.symmetric) {
    throw Error(ErrorCode::kPrecondition, "closed form only covers symmetric label noise");
  }
  if (y.n_labeled() != layout.n_labeled) {
    throw Error(ErrorCode::kDimensionMismatch, "posterior rows do not match layout.n_labeled");
  }
  const Index nl = layout.n_labeled;
  NormalizedGraph out;
  out.matrix = Matrix::Zero(layout.n(), layout.n());
  out.matrix.bottomRightCorner(layout.n_unlabeled, layout.n_unlabeled).setIdentity();
  Vector d = Vector::Ones(layout.n());
  if (nl > 0) {
    if (!y.is_class_balanced()) {
      throw Error(ErrorCode::kNotClassBalanced, "closed form requires class-balanced labels");
    }
    const double scale = static_cast<double>(nm.r) / static_cast<double>(nl);
    const Matrix a_l = normalize(label_graph(y)).matrix;
    out.matrix.topLeftCorner(nl, nl) =
        nm.alpha * a_l + Matrix::Constant(nl, nl, nm.beta * scale);
    d.head(nl).setConstant(1.0 / scale);
  }
  out.source_degrees = DegreeVector(std::move(d));
  return out;
}

std::vector<int> sample_noisy_labels(std::span<const int> clean, const NoiseModel& nm, Rng& rng) {
  std::vector<int> noisy(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const int y = clean[i];
    if (y < 0 || y >= nm.r) throw Error(ErrorCode::kInvalidArgument, "label out of range");
    const double u = rng.uniform();
    double acc = 0.0;
    int pick = nm.r - 1;
    for (int j = 0; j < nm.r; ++j) {
      acc += nm.transition(y, j);
      if (u < acc) {
        pick = j;
        break;
      }
    }
    noisy[i] = pick;
  }
  return noisy;
}

}  // namespace wscl
