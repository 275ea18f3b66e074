#pragma once

#include <functional>

#include "specboot/linalg.hpp"

namespace specboot {

/// y = A x for a symmetric PSD operator A of dimension `dim`.
using SymmetricOperator = std::function<void(const Vector& x, Vector& y)>;

struct LanczosOptions {
  /// Convergence when every residual bound beta_m |s_{m,i}| for the k leading
  /// Ritz pairs is below tol * theta_1.
  double tol = 1e-11;
  /// Ritz values are re-checked every `check_every` steps.
  int check_every = 4;
};

struct LanczosResult {
  Vector values;  // k leading Ritz values, descending; zero-padded if dim < k
  int steps = 0;  // Krylov dimension reached
};

/// k largest eigenvalues of a PSD operator by Lanczos iteration with full
/// reorthogonalization. The start vector is a fixed pseudo-random vector, so
/// the result is a pure function of the operator. When the Krylov space
/// becomes invariant the iteration restarts from a fresh orthogonal vector,
/// which recovers exact multiplicities.
LanczosResult lanczos_top_eigenvalues(const SymmetricOperator& op, Eigen::Index dim,
                                      Eigen::Index k, const LanczosOptions& options = {});

}  // namespace specboot
