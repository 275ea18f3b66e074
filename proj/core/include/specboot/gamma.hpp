#pragma once

// The k x k fourth-moment matrix
//   Gamma_{jj'} = E[(<u_j, Z>^2 - 1)(<u_j', Z>^2 - 1)]
// that governs the joint fluctuation of the leading sample eigenvalues.
// Closed forms exist for independent-entry and elliptical Z; the empirical
// version needs the true eigenvectors and the latent Z draws, so it is only
// available inside simulations.

#include "specboot/linalg.hpp"

namespace specboot {

class GammaMatrix {
 public:
  /// Symmetrizes; throws ArgumentError when the input is not square or is
  /// materially indefinite (lambda_min < -1e-8 * lambda_max).
  explicit GammaMatrix(Matrix entries);

  Eigen::Index k() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  /// Eigenvalues, descending.
  Vector eigenvalues() const;

 private:
  Matrix entries_;
};

/// 2 I_k + H^T (D - 3 I_p) H with H[l, j] = u_{j,l}^2 and D = diag(kurtoses).
/// Throws DimensionError on size mismatch, ArgumentError for a kurtosis < 1.
GammaMatrix analytic_gamma_iid(const Vector& kurtoses, const OrthogonalBasis& basis,
                               Eigen::Index k);

/// a I_k + b 1 1^T with a = 2 E[xi^4] / (p(p+2)) and b = E[xi^4] / (p(p+2)) - 1.
/// Throws ArgumentError for p < 2, k outside [1, p] or xi4 < p^2.
GammaMatrix analytic_gamma_elliptical(Eigen::Index p, double xi4, Eigen::Index k);

/// (1/n) sum_i (W_i - W_bar)(W_i - W_bar)^T with W_ij = <u_j, Z_i>^2 - 1,
/// one Z_i per row of `z`. Throws DimensionError for n < 2 or mismatched p.
GammaMatrix empirical_gamma(const Matrix& z, const OrthogonalBasis& basis, Eigen::Index k);

}  // namespace specboot
