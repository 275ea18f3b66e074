#pragma once

// Nonparametric bootstrap for the leading sample-covariance eigenvalues.
//
// Each replicate resamples the n observations with replacement and records
// the top-k eigenvalues (and the trace) of the resampled covariance. The
// resampled covariance is never formed explicitly when a cheaper route exists:
// duplicated rows are folded into sqrt(multiplicity) weights, and the
// spectrum is taken from whichever of the p x p covariance, the m x m Gram
// matrix of distinct rows, or a Lanczos iteration is estimated to be cheapest.

#include <span>
#include <string>
#include <vector>

#include "specboot/linalg.hpp"
#include "specboot/models.hpp"
#include "specboot/streams.hpp"

namespace specboot {

// ---------------------------------------------------------------------------
// Transformations

class Transformation {
 public:
  enum class Kind { Log, Power };

  static Transformation log() { return Transformation(Kind::Log, 0.0); }
  /// x^a on [0, inf); a must lie in (0, 1].
  static Transformation power(double a);
  static Transformation identity() { return power(1.0); }
  static Transformation sqrt() { return power(0.5); }

  /// "log", "identity", "sqrt", or "power:<a>".
  static Transformation parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return exponent_; }
  bool is_identity() const noexcept { return kind_ == Kind::Power && exponent_ == 1.0; }
  std::string name() const;

  /// Throws DomainError (index 0) outside the domain.
  double operator()(double x) const;
  /// Inverse on the range; for Power, arguments below 0 are clamped to 0.
  double inverse(double y) const;

  bool operator==(const Transformation&) const = default;

 private:
  Transformation(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}
  Kind kind_;
  double exponent_;
};

/// Elementwise h; DomainError carries the offending index.
Vector apply_transform(const Transformation& h, const Vector& values);

// ---------------------------------------------------------------------------
// Replicates

enum class Statistic { Eigenvalues, Proportions };
std::string to_string(Statistic s);

/// B x k bootstrap draws of a statistic together with its value on the
/// original data. For Eigenvalues, rows are non-increasing; for Proportions
/// they are non-decreasing and lie in [0, 1].
struct BootstrapReplicates {
  Statistic statistic = Statistic::Eigenvalues;
  Vector point;  // lambda_hat (or pi_hat), length k
  Matrix reps;   // B x k

  Eigen::Index k() const noexcept { return point.size(); }
  Eigen::Index b() const noexcept { return reps.rows(); }
  /// Throws ArgumentError if shapes or the ordering/sign invariants fail.
  void validate() const;
};

enum class ReplicateRoute { Auto, Covariance, Gram, Krylov };
std::string to_string(ReplicateRoute r);

struct EngineOptions {
  /// Center each resample by its own mean (real data) instead of using the
  /// raw second-moment matrix (simulated mean-zero data).
  bool centered = false;
  ReplicateRoute route = ReplicateRoute::Auto;
  unsigned workers = 1;
};

/// Everything one pass of resampling produces; eigenvalue and proportion
/// replicates are both derived from it.
struct ReplicateDraws {
  Vector lam_hat;  // top-k of the original covariance
  double trace_hat = 0.0;
  Matrix reps;     // B x k top-k eigenvalues of resampled covariances
  Vector traces;   // B traces of resampled covariances
};

/// Computes the spectrum of resampled covariances one replicate at a time.
/// Holds a row-major copy of the data; one instance may serve many
/// replicates but is not itself thread-safe (use one per worker).
class ReplicateEngine {
 public:
  ReplicateEngine(const Matrix& data, Eigen::Index k, bool centered,
                  ReplicateRoute route = ReplicateRoute::Auto);

  /// Top-k eigenvalues and trace of the covariance of rows `indices`.
  void compute(std::span<const std::size_t> indices, double* top_k, double& trace);

  /// Route Auto resolves to for a resample with `distinct` distinct rows.
  ReplicateRoute choose_route(Eigen::Index distinct) const;
  ReplicateRoute last_route() const noexcept { return last_route_; }

 private:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  RowMatrix x_;
  Eigen::Index k_;
  bool centered_;
  ReplicateRoute route_;
  ReplicateRoute last_route_ = ReplicateRoute::Auto;
  std::vector<int> counts_;
  std::vector<std::size_t> distinct_;
  RowMatrix y_;
  Vector scale_;
  Vector mean_;
};

/// Runs B replicates, replicate b drawing its indices from
/// key.child("replicate", b). Output is independent of options.workers.
/// Throws ArgumentError if B < 2, k < 1, or k exceeds the number of nonzero
/// sample eigenvalues.
ReplicateDraws draw_replicates(const Dataset& data, Eigen::Index k, Eigen::Index B,
                               const StreamKey& key, const EngineOptions& options = {});

BootstrapReplicates eigenvalue_replicates(const ReplicateDraws& draws);

/// pi_j = (lambda_1 + ... + lambda_j) / trace, for j = 1..k.
/// Throws DegenerateInputError when the original trace is not positive.
BootstrapReplicates proportion_replicates(const ReplicateDraws& draws);

/// draw_replicates followed by eigenvalue_replicates.
BootstrapReplicates replicate_eigenvalues(const Dataset& data, Eigen::Index k, Eigen::Index B,
                                          const StreamKey& key,
                                          const EngineOptions& options = {});

// ---------------------------------------------------------------------------
// Statistics over replicates

/// Per-column sample standard deviation (divisor B-1) of h(reps).
Vector sigma_hat(const BootstrapReplicates& reps, const Transformation& h);

struct MaxMinSamples {
  Vector max;  // M*_b
  Vector min;  // L*_b
};

/// M*_b = max_j (h(reps[b,j]) - h(point[j])) / sigma_j^tau and L*_b the min.
/// sigma^0 is 1 even where sigma is 0. Throws DegenerateScaleError (carrying
/// the zero indices) when tau > 0 meets sigma_j = 0.
MaxMinSamples max_min_stats(const BootstrapReplicates& reps, const Transformation& h,
                            const Vector& sigma, double tau);

/// The ceil(B * alpha)-th order statistic (1-based) of `samples`.
/// Throws ArgumentError for alpha outside (0, 1) or empty samples.
double empirical_quantile(std::span<const double> samples, double alpha);

}  // namespace specboot
