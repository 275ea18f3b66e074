#pragma once

// Simultaneous confidence bands from max/min bootstrap statistics.
//
// For a transformation h and partial standardization tau, the j-th interval
// is the preimage under h of
//   [h(point_j) - s_j^tau q_M(1 - alpha/2),  h(point_j) - s_j^tau q_L(alpha/2)]
// where s_j is the bootstrap standard deviation of h(statistic_j) and q_M, q_L
// are empirical quantiles of the replicate max/min statistics.

#include <optional>
#include <string>
#include <vector>

#include "specboot/bootstrap.hpp"

namespace specboot {

struct ConfidenceBand {
  Statistic statistic = Statistic::Eigenvalues;
  Transformation h = Transformation::identity();
  double tau = 0.0;
  double alpha = 0.05;
  Vector point;
  Vector lower;
  Vector upper;

  Eigen::Index k() const noexcept { return point.size(); }
  Vector widths() const { return upper - lower; }
  /// True when every truth[j] lies in [lower[j], upper[j]].
  bool covers(const Vector& truth) const;
};

/// A proportion column that is exactly 1 in the point and every replicate
/// (pi_p when k = p) is left out of the max/min statistics and gets [1, 1].
/// Throws ArgumentError for alpha outside (0,1) or tau outside [0,1];
/// propagates DegenerateScaleError and DomainError.
ConfidenceBand build_band(const BootstrapReplicates& reps, const Transformation& h, double tau,
                          double alpha);

/// The candidate grid {0.0, 0.1, ..., 1.0}.
std::vector<double> tau_grid();

struct TauSelection {
  std::vector<double> grid;
  /// mean width + width sd (divisor k) per candidate; nullopt when skipped.
  std::vector<std::optional<double>> scores;
  double chosen = 0.0;
};

/// Argmin over the available scores, ties to the smallest tau. Falls back to
/// tau = 0 when every candidate was skipped.
double argmin_tau(const std::vector<double>& grid,
                  const std::vector<std::optional<double>>& scores);

/// Builds a band for each grid tau and keeps the one with the smallest
/// mean + sd of interval widths. Candidates that hit a zero bootstrap scale
/// are skipped.
TauSelection select_tau(const BootstrapReplicates& reps, const Transformation& h, double alpha);

/// A transformation plus either a fixed tau or data-adaptive selection.
struct IntervalRule {
  Transformation h = Transformation::sqrt();
  bool adaptive_tau = true;
  double tau = 0.0;

  /// "log" (tau 0), "standardization" (identity, tau 1), "sqrt" (adaptive).
  static IntervalRule named(const std::string& name);
  std::string tau_label() const;
};

/// Applies the rule. A fixed tau > 0 that meets a zero bootstrap scale falls
/// back to tau = 0 and appends a message to `warnings` (if given).
ConfidenceBand make_band(const BootstrapReplicates& reps, const IntervalRule& rule, double alpha,
                         std::vector<std::string>* warnings = nullptr);

/// Band for the explained-variance proportions pi_1..pi_k; endpoints are
/// clamped to [0, 1].
ConfidenceBand proportion_band(const Dataset& data, Eigen::Index k, Eigen::Index B,
                               const IntervalRule& rule, double alpha, const StreamKey& key,
                               const EngineOptions& options = {},
                               std::vector<std::string>* warnings = nullptr);

/// Smallest 1-based j whose lower endpoint exceeds `threshold`; nullopt if none.
std::optional<Eigen::Index> select_components(const ConfidenceBand& band, double threshold);

}  // namespace specboot
