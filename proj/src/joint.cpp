#include "wscl/joint.hpp"

#include <string>

#include "wscl/error.hpp"

namespace wscl {

namespace {

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::kThetaOutOfRange, "theta " + std::to_string(theta) + " outside [0, 1]");
  }
}

void check_pair(const NormalizedGraph& a0, const NormalizedGraph& a_star) {
  if (a0.n() != a_star.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "mixture components differ in size");
  }
}

}  // namespace

void validate(const MixedGraphSpec& spec, int r) {
  check_theta(spec.theta);
  make_noise_model(r, spec.gamma);
  if (spec.n_labeled < 0 || spec.n_unlabeled < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative block size");
  }
}

NormalizedGraph mix_graphs(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta) {
  check_pair(a0, a_star);
  check_theta(theta);
  if (theta == 0.0) return a0;
  NormalizedGraph out;
  out.matrix = (1.0 - theta) * a0.matrix + theta * a_star.matrix;
  out.source_degrees = a0.source_degrees;
  return out;
}

double joint_mf_loss(const FactorMatrix& fm, const NormalizedGraph& a0,
                     const NormalizedGraph& a_star, double theta) {
  check_pair(a0, a_star);
  check_theta(theta);
  return (1.0 - theta) * matrix_factorization_loss(fm, a0) +
         theta * matrix_factorization_loss(fm, a_star);
}

double c0_constant(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta) {
  check_pair(a0, a_star);
  check_theta(theta);
  const Matrix mix = (1.0 - theta) * a0.matrix + theta * a_star.matrix;
  return (1.0 - theta) * a0.matrix.squaredNorm() + theta * a_star.matrix.squaredNorm() -
         mix.squaredNorm();
}

Matrix joint_mf_gradient(const FactorMatrix& fm, const NormalizedGraph& a0,
                         const NormalizedGraph& a_star, double theta) {
  check_pair(a0, a_star);
  check_theta(theta);
  return (1.0 - theta) * mf_gradient(fm, a0) + theta * mf_gradient(fm, a_star);
}

TrainOutcome gd_train_joint(const NormalizedGraph& a0, const NormalizedGraph& a_star, double theta,
                            Index k, const TrainConfig& cfg) {
  check_pair(a0, a_star);
  check_theta(theta);
  if (k < 1 || k > a0.n()) throw Error(ErrorCode::kInvalidArgument, "k outside [1, n]");
  const Matrix& u = a0.matrix;
  const Matrix& s = a_star.matrix;
  return detail::descend(
      detail::init_factor(a0.n(), k, cfg.seed), a0.source_degrees, cfg,
      [&](const Matrix& f) {
        const Matrix ff = f * f.transpose();
        return (1.0 - theta) * (u - ff).squaredNorm() + theta * (s - ff).squaredNorm();
      },
      [&](const Matrix& f) -> Matrix {
        const Matrix ff = f * f.transpose();
        return -4.0 * ((1.0 - theta) * (u - ff) * f + theta * (s - ff) * f);
      });
}

}  // namespace wscl
