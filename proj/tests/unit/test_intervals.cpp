#include <gtest/gtest.h>

#include <cmath>

#include "specboot/errors.hpp"
#include "specboot/intervals.hpp"
#include "specboot/metrics.hpp"

namespace specboot {
namespace {

BootstrapReplicates one_column(double point, const std::vector<double>& values,
                               Statistic statistic = Statistic::Eigenvalues) {
  BootstrapReplicates r;
  r.statistic = statistic;
  r.point = Vector::Constant(1, point);
  r.reps.resize(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t b = 0; b < values.size(); ++b) r.reps(static_cast<Eigen::Index>(b), 0) = values[b];
  return r;
}

Dataset gaussian_data(Eigen::Index n, Eigen::Index p, std::uint64_t seed, double decay = 0.7) {
  Rng rng = derive_stream(StreamKey(seed).child("data", 0));
  std::normal_distribution<double> z;
  Dataset ds;
  ds.x.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) ds.x(i, j) = std::pow(j + 1.0, -decay) * z(rng);
  return ds;
}

TEST(Band, LogExample) {
  // Differences on the log scale: the 1st order statistic is -1 and the 39th
  // (ceil(40 * 0.975)) is 1.
  std::vector<double> diffs(40, 0.0);
  diffs[0] = -1.0;
  diffs[38] = 1.0;
  diffs[39] = 2.0;
  std::vector<double> values;
  for (double d : diffs) values.push_back(std::exp(1.0 + d));
  const ConfidenceBand band = build_band(one_column(std::exp(1.0), values), Transformation::log(), 0.0, 0.05);
  EXPECT_NEAR(band.lower[0], 1.0, 1e-14);
  EXPECT_NEAR(band.upper[0], std::exp(2.0), 1e-13);
}

TEST(Band, ConstantReplicatesDegenerate) {
  const ConfidenceBand band =
      build_band(one_column(3.0, std::vector<double>(25, 3.0)), Transformation::identity(), 0.0, 0.1);
  EXPECT_EQ(band.lower[0], 3.0);
  EXPECT_EQ(band.upper[0], 3.0);
  EXPECT_TRUE(band.covers(Vector::Constant(1, 3.0)));
  EXPECT_FALSE(band.covers(Vector::Constant(1, 3.0001)));
}

TEST(Band, PowerLowerClampsToZero) {
  // sqrt scale: point 2, differences spanning [-3, 3] so q_M = 3.
  std::vector<double> values;
  for (int i = 0; i < 41; ++i) {
    const double d = -3.0 + 6.0 * i / 40.0;
    values.push_back((2.0 + d) < 0 ? 0.0 : (2.0 + d) * (2.0 + d));
  }
  const ConfidenceBand band = build_band(one_column(4.0, values), Transformation::sqrt(), 0.0, 0.05);
  EXPECT_EQ(band.lower[0], 0.0);
  EXPECT_GT(band.upper[0], 4.0);
}

TEST(Band, RejectsBadArguments) {
  const auto r = one_column(1.0, {1.0, 2.0, 0.5});
  EXPECT_THROW(build_band(r, Transformation::identity(), 0.0, 0.0), ArgumentError);
  EXPECT_THROW(build_band(r, Transformation::identity(), 1.2, 0.05), ArgumentError);
  EXPECT_THROW(build_band(one_column(1.0, {1.0, 1.0}), Transformation::identity(), 1.0, 0.05),
               DegenerateScaleError);
}

TEST(Band, OrderedOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dataset ds = gaussian_data(30 + seed, 6, seed);
    const ReplicateDraws d = draw_replicates(ds, 4, 99, StreamKey(seed));
    for (const auto& reps : {eigenvalue_replicates(d), proportion_replicates(d)}) {
      for (const auto& h : {Transformation::log(), Transformation::sqrt(), Transformation::identity()}) {
        for (double tau : {0.0, 0.3, 1.0}) {
          const ConfidenceBand band = build_band(reps, h, tau, 0.1);
          for (Eigen::Index j = 0; j < band.k(); ++j) {
            EXPECT_LE(band.lower[j], band.upper[j]);
            if (reps.statistic == Statistic::Proportions) {
              EXPECT_GE(band.lower[j], 0.0);
              EXPECT_LE(band.upper[j], 1.0);
            }
          }
        }
      }
    }
  }
}

TEST(Band, NestedInAlpha) {
  const Dataset ds = gaussian_data(60, 8, 77);
  const BootstrapReplicates reps = replicate_eigenvalues(ds, 5, 400, StreamKey(3));
  const ConfidenceBand wide = build_band(reps, Transformation::sqrt(), 0.5, 0.05);
  const ConfidenceBand narrow = build_band(reps, Transformation::sqrt(), 0.5, 0.10);
  for (Eigen::Index j = 0; j < 5; ++j) {
    EXPECT_LE(wide.lower[j], narrow.lower[j]);
    EXPECT_GE(wide.upper[j], narrow.upper[j]);
  }
}

TEST(Band, IdentityScalesBySquare) {
  const Dataset ds = gaussian_data(50, 6, 4);
  Dataset scaled = ds;
  scaled.x *= 2.0;
  const ConfidenceBand a =
      build_band(replicate_eigenvalues(ds, 3, 200, StreamKey(5)), Transformation::identity(), 0.0, 0.05);
  const ConfidenceBand b = build_band(replicate_eigenvalues(scaled, 3, 200, StreamKey(5)),
                                      Transformation::identity(), 0.0, 0.05);
  EXPECT_LE((b.lower - 4.0 * a.lower).cwiseAbs().maxCoeff(), 1e-12 * b.upper.maxCoeff());
  EXPECT_LE((b.upper - 4.0 * a.upper).cwiseAbs().maxCoeff(), 1e-12 * b.upper.maxCoeff());
}

TEST(TauSelection, GridAndArgmin) {
  const auto grid = tau_grid();
  ASSERT_EQ(grid.size(), 11u);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(grid[i], 0.1 * i, 1e-15);

  std::vector<std::optional<double>> scores{5, 4, 4.5, 6, 7, 8, 9, 10, 11, 12, 13};
  EXPECT_DOUBLE_EQ(argmin_tau(grid, scores), grid[1]);
  std::vector<std::optional<double>> equal(11, 2.0);
  EXPECT_EQ(argmin_tau(grid, equal), 0.0);
  std::vector<std::optional<double>> skipped(11);
  EXPECT_EQ(argmin_tau(grid, skipped), 0.0);
  skipped[7] = 1.0;
  skipped[9] = 1.0;
  EXPECT_DOUBLE_EQ(argmin_tau(grid, skipped), grid[7]);
}

TEST(TauSelection, SingleIntervalScoresAreWidths) {
  const Dataset ds = gaussian_data(80, 5, 6);
  const BootstrapReplicates reps = replicate_eigenvalues(ds, 1, 300, StreamKey(7));
  const TauSelection sel = select_tau(reps, Transformation::sqrt(), 0.05);
  double best = INFINITY, best_tau = -1;
  for (std::size_t i = 0; i < sel.grid.size(); ++i) {
    const double width = build_band(reps, Transformation::sqrt(), sel.grid[i], 0.05).widths()[0];
    ASSERT_TRUE(sel.scores[i].has_value());
    EXPECT_NEAR(*sel.scores[i], width, 1e-14 * width);
    if (width < best) {
      best = width;
      best_tau = sel.grid[i];
    }
  }
  EXPECT_EQ(sel.chosen, best_tau);
}

TEST(TauSelection, ScoreIsMeanPlusPopulationSd) {
  const Dataset ds = gaussian_data(80, 7, 8);
  const BootstrapReplicates reps = replicate_eigenvalues(ds, 4, 300, StreamKey(9));
  const TauSelection sel = select_tau(reps, Transformation::sqrt(), 0.05);
  for (std::size_t i = 0; i < sel.grid.size(); ++i) {
    const Vector w = build_band(reps, Transformation::sqrt(), sel.grid[i], 0.05).widths();
    const double mean = w.mean();
    const double sd = std::sqrt((w.array() - mean).square().sum() / 4.0);
    EXPECT_NEAR(*sel.scores[i], mean + sd, 1e-13 * (mean + sd));
  }
}

TEST(TauSelection, SkipsDegenerateCandidates) {
  BootstrapReplicates r;
  r.point = Vector(2);
  r.point << 2.0, 1.0;
  r.reps.resize(3, 2);
  r.reps << 2.5, 1.0, 1.5, 1.0, 2.0, 1.0;
  const TauSelection sel = select_tau(r, Transformation::identity(), 0.2);
  EXPECT_TRUE(sel.scores[0].has_value());
  for (std::size_t i = 1; i < sel.scores.size(); ++i) EXPECT_FALSE(sel.scores[i].has_value());
  EXPECT_EQ(sel.chosen, 0.0);

  std::vector<std::string> warnings;
  const ConfidenceBand band = make_band(r, IntervalRule::named("standardization"), 0.2, &warnings);
  EXPECT_EQ(band.tau, 0.0);
  ASSERT_EQ(warnings.size(), 1u);
}

TEST(TauSelection, ArgminInvariantUnderScaling) {
  const Dataset ds = gaussian_data(60, 8, 10);
  Dataset scaled = ds;
  scaled.x *= 3.0;
  const BootstrapReplicates a = replicate_eigenvalues(ds, 4, 300, StreamKey(11));
  const BootstrapReplicates b = replicate_eigenvalues(scaled, 4, 300, StreamKey(11));
  for (double pw : {0.5, 0.25}) {
    const TauSelection sa = select_tau(a, Transformation::power(pw), 0.05);
    const TauSelection sb = select_tau(b, Transformation::power(pw), 0.05);
    EXPECT_EQ(sa.chosen, sb.chosen);
  }
}

TEST(IntervalRule, Named) {
  EXPECT_EQ(IntervalRule::named("log").tau_label(), "0");
  EXPECT_EQ(IntervalRule::named("standardization").tau_label(), "1");
  EXPECT_EQ(IntervalRule::named("sqrt").tau_label(), "adaptive");
  EXPECT_THROW(IntervalRule::named("cube"), ArgumentError);
}

TEST(Proportions, FullDimensionIsOne) {
  const Dataset ds = gaussian_data(40, 3, 12);
  const ConfidenceBand band = proportion_band(ds, 3, 100, IntervalRule{Transformation::identity(), false, 0.0},
                                              0.05, StreamKey(13));
  EXPECT_EQ(band.lower[2], 1.0);
  EXPECT_EQ(band.upper[2], 1.0);
  EXPECT_EQ(band.statistic, Statistic::Proportions);
  EXPECT_LT(band.lower[0], band.point[0]);
  const ConfidenceBand standardized = proportion_band(ds, 3, 100, IntervalRule::named("standardization"),
                                                      0.05, StreamKey(13));
  EXPECT_EQ(standardized.lower[2], 1.0);
  EXPECT_EQ(standardized.upper[2], 1.0);
}

TEST(Proportions, SingleDirection) {
  Dataset ds;
  ds.x = Matrix::Zero(20, 3);
  ds.x.col(0).setLinSpaced(20, 1.0, 3.0);
  const ConfidenceBand band = proportion_band(ds, 1, 50, IntervalRule{Transformation::identity(), false, 0.0},
                                              0.05, StreamKey(14));
  EXPECT_DOUBLE_EQ(band.point[0], 1.0);
  EXPECT_DOUBLE_EQ(band.lower[0], 1.0);
  EXPECT_DOUBLE_EQ(band.upper[0], 1.0);
}

TEST(Proportions, SingletonDataset) {
  Dataset ds;
  ds.x.resize(1, 3);
  ds.x << 1.0, -2.0, 0.5;
  const ConfidenceBand band = proportion_band(ds, 1, 30, IntervalRule{Transformation::sqrt(), false, 0.0},
                                              0.05, StreamKey(15));
  EXPECT_DOUBLE_EQ(band.lower[0], band.point[0]);
  EXPECT_DOUBLE_EQ(band.upper[0], band.point[0]);
}

TEST(SelectComponents, Examples) {
  ConfidenceBand band;
  band.statistic = Statistic::Proportions;
  band.lower = Vector(3);
  band.lower << 0.2, 0.35, 0.42;
  band.upper = Vector::Ones(3);
  band.point = band.lower;
  EXPECT_EQ(select_components(band, 0.4), 3);
  band.lower << 0.5, 0.6, 0.7;
  EXPECT_EQ(select_components(band, 0.4), 1);
  band.lower << 0.1, 0.2, 0.4;
  EXPECT_FALSE(select_components(band, 0.4).has_value());
}

TEST(Coverage, ClassicalLogRegime) {
  CoverageConfig c;
  c.generator = parse_generator("gaussian");
  c.profile = PolynomialDecay{1.0};
  c.parameter = 1.0;
  c.n = 2000;
  c.p = 2;
  c.k = 1;
  c.rule = IntervalRule::named("log");
  c.alpha = 0.05;
  c.trials = 500;
  c.B = 500;
  c.seed = 2024;
  const ExperimentRecord rec = coverage_experiment(c);
  EXPECT_EQ(rec.failures, 0);
  EXPECT_GE(rec.coverage, 0.91);
  EXPECT_LE(rec.coverage, 0.98);
}

}  // namespace
}  // namespace specboot
