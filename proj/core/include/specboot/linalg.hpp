#pragma once

// Symmetric linear algebra for covariance spectra.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "specboot/streams.hpp"

namespace specboot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues in [-kNegativeEigenTolerance * lambda_1, 0) are rounding noise
/// and are clamped to zero; anything more negative is rejected.
inline constexpr double kNegativeEigenTolerance = 1e-10;

/// Largest dimension for which the dense symmetric eigensolver is used on the
/// covariance; above it the data matrix is factored by SVD instead.
inline constexpr Eigen::Index kDenseEigenMaxDim = 512;

/// Real symmetric PSD p x p matrix, stored with an exactly symmetric upper
/// triangle (copied from the lower one at construction).
class CovarianceMatrix {
 public:
  /// Throws ArgumentError if `entries` is not square or not symmetric to
  /// 1e-12 relative, DimensionError if empty.
  explicit CovarianceMatrix(Matrix entries);

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  double trace() const { return entries_.trace(); }

 private:
  Matrix entries_;
};

/// Eigenvalues sorted in non-increasing order, all >= 0 after clamping.
class Spectrum {
 public:
  Spectrum() = default;

  /// Validates ordering; values within the negative tolerance are clamped to
  /// zero. Throws ArgumentError on unsorted input, DomainError on a
  /// materially negative value.
  explicit Spectrum(Vector values);

  /// Sorts descending first.
  static Spectrum from_unsorted(Vector values);

  const Vector& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  double operator[](Eigen::Index j) const { return values_[j]; }
  double sum() const { return values_.sum(); }

  /// First k values.
  Spectrum head(Eigen::Index k) const;

 private:
  Vector values_;
};

/// p x p orthogonal matrix; column j is the j-th eigenvector.
class OrthogonalBasis {
 public:
  /// Throws ArgumentError unless max|Q^T Q - I| <= 1e-10.
  explicit OrthogonalBasis(Matrix q);
  static OrthogonalBasis identity(Eigen::Index p);

  Eigen::Index dim() const noexcept { return q_.rows(); }
  const Matrix& matrix() const noexcept { return q_; }
  auto column(Eigen::Index j) const { return q_.col(j); }

 private:
  Matrix q_;
};

/// (1/n) sum x_i x_i^T over the rows of `data`; with `centered`, column means
/// are removed first.
CovarianceMatrix sample_covariance(const Matrix& data, bool centered);

/// Full spectrum of a covariance matrix, descending.
Spectrum full_spectrum(const CovarianceMatrix& cov);

/// k largest eigenvalues. Throws ArgumentError if k is outside [1, p].
Spectrum top_eigenvalues(const CovarianceMatrix& cov, Eigen::Index k);

enum class DataRoute {
  Auto,        // Covariance when p <= kDenseEigenMaxDim, Svd otherwise
  Covariance,  // form the p x p covariance, dense symmetric eigensolver
  Svd,         // squared singular values of the (centered) data over n
};

/// k largest eigenvalues of sample_covariance(data, centered), computed
/// straight from the n x p data matrix.
Spectrum top_eigenvalues(const Matrix& data, Eigen::Index k, bool centered = false,
                         DataRoute route = DataRoute::Auto);

/// tr / lambda_1. Throws DegenerateInputError when lambda_1 is not positive.
double effective_rank(const Spectrum& full);

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// column j of Q multiplied by sign(R_jj).
OrthogonalBasis haar_orthogonal(Eigen::Index p, Rng& rng);

struct WielandtReport {
  bool applicable = false;
  /// lambda_j(A) - lambda_j(B), j = 1..k
  std::vector<double> gaps;
  /// lambda_1(C C^T) / (lambda_j(B) - lambda_1(D)), j = 1..k
  std::vector<double> bounds;
  /// 0 <= gaps[j] <= bounds[j] for every j (up to rounding slack).
  bool holds = false;
};

/// Partitions A as [[B, C], [C^T, D]] with B the leading k x k block and checks
/// the Wielandt perturbation inequality. Not applicable unless
/// lambda_k(B) > lambda_1(D).
WielandtReport wielandt_check(const CovarianceMatrix& a, Eigen::Index k);

}  // namespace specboot
