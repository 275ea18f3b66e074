#pragma once

// Monte Carlo verification: Kolmogorov distance between bootstrap and
// sampling laws, simultaneous-coverage experiments and rate fitting.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specboot/bootstrap.hpp"
#include "specboot/intervals.hpp"
#include "specboot/models.hpp"

namespace specboot {

// ---------------------------------------------------------------------------
// Kolmogorov distance

/// m x k matrix of sample vectors, one per row.
struct EcdfSampleSet {
  Matrix points;

  Eigen::Index size() const noexcept { return points.rows(); }
  Eigen::Index dim() const noexcept { return points.cols(); }
  /// Fraction of rows with every coordinate <= t.
  double cdf(const Eigen::Ref<const Eigen::RowVectorXd>& t) const;
};

/// Rows of both sets stacked, followed by one +infinity corner.
Matrix pooled_grid(const EcdfSampleSet& a, const EcdfSampleSet& b);

/// max over grid rows t of |F_a(t) - F_b(t)| for coordinatewise ECDFs.
/// Throws DimensionError for an empty grid, empty sets or mismatched k.
double kolmogorov_distance(const EcdfSampleSet& a, const EcdfSampleSet& b, const Matrix& grid);

/// Pooled-point grid. Exact two-sample KS statistic when k = 1; a lower
/// bound on the sup over R^k otherwise.
double kolmogorov_distance(const EcdfSampleSet& a, const EcdfSampleSet& b);

struct DeltaEstimate {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index k = 0;
  Eigen::Index grid_size = 0;
  double delta_hat = 0.0;
  Eigen::Index datasets = 0;    // M
  Eigen::Index replicates = 0;  // B
  Eigen::Index held_out = 0;    // R
  std::vector<double> per_held_out;
};

struct DeltaConfig {
  Eigen::Index n = 0;
  Eigen::Index k = 1;
  Eigen::Index datasets = 300;  // M
  Eigen::Index replicates = 300;  // B
  Eigen::Index held_out = 5;    // R
  unsigned workers = 1;
};

/// Distance between the law of sqrt(n)(lambda_k(Sigma_hat) - lambda_k(Sigma))
/// (M independent datasets) and the bootstrap law of
/// sqrt(n)(lambda_k(Sigma_hat*) - lambda_k(Sigma_hat)) (B replicates), for
/// each of R held-out datasets; delta_hat is the median over the R values.
DeltaEstimate estimate_delta_n(const PopulationModel& model, const DeltaConfig& config,
                               const StreamKey& key);

/// Least-squares slope of log(delta) on log(n). Non-positive deltas are
/// dropped (with a message in `warnings`); throws ArgumentError for duplicate
/// n or fewer than 3 usable points.
double rate_slope(const std::vector<std::pair<double, double>>& points,
                  std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Coverage experiments

struct CoverageConfig {
  GeneratorFamily generator;
  DecayProfile profile = PolynomialDecay{1.0};
  double parameter = 1.0;  // gamma, delta or g, for reporting
  Eigen::Index n = 100;
  Eigen::Index p = 10;
  Eigen::Index k = 5;
  IntervalRule rule;
  double alpha = 0.05;
  Eigen::Index trials = 100;
  Eigen::Index B = 500;
  std::uint64_t seed = 0;
  std::uint64_t cell = 0;  // stream label of this grid cell
  unsigned workers = 1;
  Statistic statistic = Statistic::Eigenvalues;
};

/// "i" for the elliptical model, "ii" for Gaussian, else the generator name.
std::string model_id(const GeneratorFamily& generator);

struct ExperimentRecord {
  std::string model;
  std::string decay;
  double parameter = 0.0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index k = 0;
  std::string transform;
  std::string tau_mode;
  double alpha = 0.0;
  Eigen::Index trials = 0;
  Eigen::Index B = 0;
  double coverage = 0.0;
  double avg_width = 0.0;
  double width_sd = 0.0;
  double coverage_se = 0.0;
  std::uint64_t seed = 0;
  Eigen::Index failures = 0;
};

/// Per-trial outcome, exposed for diagnostics and tests.
struct TrialOutcome {
  bool covered = false;
  bool failed = false;
  double mean_width = 0.0;
  double tau = 0.0;
};

/// Runs `trials` independent datasets through the full interval pipeline and
/// reports simultaneous coverage of the true eigenvalues (or proportions).
/// A trial whose pipeline throws counts as non-covering and is tallied in
/// `failures`. Output does not depend on config.workers.
ExperimentRecord coverage_experiment(const CoverageConfig& config,
                                     std::vector<TrialOutcome>* outcomes = nullptr);

/// CSV header and rows for records; floats use 6 significant digits.
std::string records_csv_header();
std::string to_csv_row(const ExperimentRecord& record);

/// printf("%.6g")
std::string format_g6(double value);

}  // namespace specboot
