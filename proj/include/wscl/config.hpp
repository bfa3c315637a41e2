#pragma once

#include <cstddef>

namespace wscl {

/// Every numerical tolerance used by the library lives here so that the
/// tests, the CLI and the Python bindings agree on what "close enough" means.
struct Tolerances {
  double symmetry = 1e-12;           ///< |w_ij - w_ji| for a valid graph
  double mass = 1e-10;               ///< |sum w - 1| for mass-normalized graphs
  double eigh_symmetry = 1e-10;      ///< input check for eigh
  double eigh_offdiag = 1e-12;       ///< Jacobi stop: off(M)_F <= tol * |M|_F
  std::size_t eigh_rotation_factor = 100;  ///< rotation cap = factor * n^2
  double sign_threshold = 1e-12;     ///< eigenvector sign convention cutoff
  double posterior_row_sum = 1e-12;
  double class_balance = 1e-9;
  double rho_slack = 1e-9;
  double degenerate = 1e-12;         ///< denominators at or below are degenerate
  double endpoint_margin = 1e-12;    ///< interior-beats-endpoint diagnostic
  double sampler_floor = 1e-15;      ///< minimum positive mass for sampling
  double singular_condition = 1e14;  ///< probe normal-matrix condition cap
  std::size_t max_vertices = 2048;
};

inline constexpr Tolerances kTol{};

}  // namespace wscl
