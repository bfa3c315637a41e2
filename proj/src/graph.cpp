#include "wscl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "wscl/error.hpp"

namespace wscl {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroDegree: return "ZeroDegree";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kNoiseRateOutOfRange: return "NoiseRateOutOfRange";
    case ErrorCode::kNotClassBalanced: return "NotClassBalanced";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kSamplerUnderflow: return "SamplerUnderflow";
    case ErrorCode::kThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::kUndefinedThreshold: return "UndefinedThreshold";
    case ErrorCode::kEmptyKRange: return "EmptyKRange";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kPrecondition: return "Precondition";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

SymmetricGraph::SymmetricGraph(Matrix weights, bool mass_normalized, const Tolerances& tol)
    : weights_(std::move(weights)), mass_normalized_(mass_normalized) {
  if (weights_.rows() != weights_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "graph weights must be square");
  }
  if (static_cast<std::size_t>(weights_.rows()) > tol.max_vertices) {
    throw Error(ErrorCode::kInvalidArgument,
                "graph has " + std::to_string(weights_.rows()) + " vertices, cap is " +
                    std::to_string(tol.max_vertices));
  }
}

SymmetricGraph SymmetricGraph::with_unit_mass() const {
  const double mass = total_mass();
  if (!(mass > 0.0)) throw Error(ErrorCode::kZeroDegree, "graph has no edge mass");
  return SymmetricGraph(weights_ / mass, true);
}

ValidationReport validate_graph(const SymmetricGraph& g, const Tolerances& tol) {
  ValidationReport report;
  const Matrix& w = g.weights();
  if (w.size() == 0) return report;
  report.symmetry_defect = (w - w.transpose()).cwiseAbs().maxCoeff();
  report.negativity_defect = std::max(0.0, -w.minCoeff());
  report.symmetric = report.symmetry_defect <= tol.symmetry;
  report.nonnegative = report.negativity_defect == 0.0;
  if (g.mass_normalized()) {
    report.mass_defect = std::abs(w.sum() - 1.0);
    report.mass_ok = report.mass_defect <= tol.mass;
  }
  return report;
}

DegreeVector::DegreeVector(Vector values) : values_(std::move(values)) {
  for (Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0)) {
      throw Error(ErrorCode::kZeroDegree, "vertex " + std::to_string(i) + " has degree " +
                                              std::to_string(values_[i]));
    }
  }
}

DegreeVector degrees(const SymmetricGraph& g) { return DegreeVector(g.weights().rowwise().sum()); }

NormalizedGraph normalize_with(const SymmetricGraph& g, const DegreeVector& d) {
  if (d.size() != g.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "degree vector does not match graph");
  }
  const Vector s = d.values().cwiseSqrt().cwiseInverse();
  NormalizedGraph out;
  // w_ij (s_i s_j) keeps the result exactly symmetric.
  out.matrix = g.weights().cwiseProduct(s * s.transpose());
  out.source_degrees = d;
  return out;
}

NormalizedGraph normalize(const SymmetricGraph& g) { return normalize_with(g, degrees(g)); }

double compute_rho(const DegreeVector& d) {
  if (d.size() == 0) return 1.0;
  return d.values().maxCoeff() / d.values().minCoeff();
}

double frobenius_squared(const Matrix& m) { return m.squaredNorm(); }

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const Index n = a.rows();
  for (Index q = 1; q < n; ++q) {
    for (Index p = 0; p < q; ++p) sum += a(p, q) * a(p, q);
  }
  return std::sqrt(2.0 * sum);
}

// Orders eigenpairs descending and fixes the sign of each eigenvector.
Spectrum sorted_spectrum(const Matrix& a, const Matrix& v, const Tolerances& tol) {
  const Index n = a.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) > a(j, j); });
  Spectrum s;
  s.values.resize(n);
  s.vectors.resize(n, n);
  for (Index c = 0; c < n; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    s.values[c] = a(src, src);
    s.vectors.col(c) = v.col(src);
    for (Index r = 0; r < n; ++r) {
      const double x = s.vectors(r, c);
      if (std::abs(x) > tol.sign_threshold) {
        if (x < 0.0) s.vectors.col(c) *= -1.0;
        break;
      }
    }
  }
  return s;
}

}  // namespace

Spectrum eigh(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kDimensionMismatch, "eigh needs a square matrix");
  const Index n = m.rows();
  if (n == 0) return {};
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol.eigh_symmetry) {
    throw Error(ErrorCode::kInvalidArgument,
                "eigh input asymmetric by " + std::to_string(asym));
  }
  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);

  const double target = tol.eigh_offdiag * a.norm();
  // Entries this small cannot move the off-diagonal norm across the target.
  const double skip = 1e-3 * target / static_cast<double>(n);
  const std::size_t cap = tol.eigh_rotation_factor * static_cast<std::size_t>(n) *
                          static_cast<std::size_t>(n);
  std::size_t rotations = 0;
  Vector cp(n);

  while (off_diagonal_norm(a) > target) {
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        if (++rotations > cap) {
          throw Error(ErrorCode::kNoConvergence,
                      "Jacobi exceeded " + std::to_string(cap) + " rotations");
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = a(p, p) - t * apq;
        const double aqq = a(q, q) + t * apq;

        cp = a.col(p);
        a.col(p) = c * cp - s * a.col(q);
        a.col(q) = s * cp + c * a.col(q);
        a.row(p) = a.col(p).transpose();
        a.row(q) = a.col(q).transpose();
        a(p, p) = app;
        a(q, q) = aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        cp = v.col(p);
        v.col(p) = c * cp - s * v.col(q);
        v.col(q) = s * cp + c * v.col(q);
      }
    }
  }
  return sorted_spectrum(a, v, tol);
}

}  // namespace wscl
