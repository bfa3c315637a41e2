#pragma once

#include <Eigen/Dense>

#include "wscl/config.hpp"

namespace wscl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense symmetric nonnegative edge-weight matrix over a finite vertex set.
///
/// Construction only checks shape and the vertex cap; use validate_graph for
/// the symmetry / sign / mass report.
class SymmetricGraph {
 public:
  SymmetricGraph() = default;
  explicit SymmetricGraph(Matrix weights, bool mass_normalized = false,
                          const Tolerances& tol = kTol);

  Index n() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }
  bool mass_normalized() const { return mass_normalized_; }
  double total_mass() const { return weights_.sum(); }

  /// Copy rescaled to total mass one (flag set).
  SymmetricGraph with_unit_mass() const;

 private:
  Matrix weights_;
  bool mass_normalized_ = false;
};

struct ValidationReport {
  double symmetry_defect = 0.0;    ///< max |w_ij - w_ji|
  double negativity_defect = 0.0;  ///< max(0, -min w_ij)
  double mass_defect = 0.0;        ///< |sum w - 1|, 0 when not mass-normalized
  bool symmetric = true;
  bool nonnegative = true;
  bool mass_ok = true;

  bool passed() const { return symmetric && nonnegative && mass_ok; }
};

ValidationReport validate_graph(const SymmetricGraph& g, const Tolerances& tol = kTol);

/// Strictly positive vertex degrees w_x.
class DegreeVector {
 public:
  DegreeVector() = default;
  /// Throws ZeroDegree if any entry is <= 0.
  explicit DegreeVector(Vector values);

  Index size() const { return values_.size(); }
  const Vector& values() const { return values_; }
  double operator[](Index i) const { return values_[i]; }

 private:
  Vector values_;
};

/// D^{-1/2} A D^{-1/2} together with the degrees that produced it.
struct NormalizedGraph {
  Matrix matrix;
  DegreeVector source_degrees;

  Index n() const { return matrix.rows(); }
};

/// Eigenpairs with values in descending order; columns of `vectors` are
/// orthonormal and the first component above the sign threshold is positive.
struct Spectrum {
  Vector values;
  Matrix vectors;

  Index n() const { return values.size(); }
};

DegreeVector degrees(const SymmetricGraph& g);

NormalizedGraph normalize(const SymmetricGraph& g);

/// Scales A by the supplied degrees instead of its own row sums.
NormalizedGraph normalize_with(const SymmetricGraph& g, const DegreeVector& d);

/// max_i w_i / min_j w_j. Callers add Tolerances::rho_slack for a strict bound.
double compute_rho(const DegreeVector& d);

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Throws InvalidArgument on asymmetric input, NoConvergence at the rotation cap.
Spectrum eigh(const Matrix& m, const Tolerances& tol = kTol);

double frobenius_squared(const Matrix& m);

}  // namespace wscl
