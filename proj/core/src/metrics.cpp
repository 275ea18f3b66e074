#include "specboot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "specboot/errors.hpp"
#include "specboot/parallel.hpp"

namespace specboot {

double EcdfSampleSet::cdf(const Eigen::Ref<const Eigen::RowVectorXd>& t) const {
  if (points.rows() == 0) throw DimensionError("empty sample set");
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    bool below = true;
    for (Eigen::Index c = 0; c < points.cols() && below; ++c) below = points(i, c) <= t[c];
    hits += below ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(points.rows());
}

Matrix pooled_grid(const EcdfSampleSet& a, const EcdfSampleSet& b) {
  if (a.dim() != b.dim()) throw DimensionError("sample sets differ in dimension");
  Matrix grid(a.size() + b.size() + 1, a.dim());
  grid.topRows(a.size()) = a.points;
  grid.middleRows(a.size(), b.size()) = b.points;
  grid.bottomRows(1).setConstant(std::numeric_limits<double>::infinity());
  return grid;
}

double kolmogorov_distance(const EcdfSampleSet& a, const EcdfSampleSet& b, const Matrix& grid) {
  if (grid.rows() == 0) throw DimensionError("kolmogorov_distance: empty grid");
  if (a.size() == 0 || b.size() == 0) throw DimensionError("kolmogorov_distance: empty sample set");
  if (a.dim() != b.dim() || grid.cols() != a.dim()) {
    throw DimensionError("kolmogorov_distance: dimension mismatch");
  }
  double best = 0.0;
  for (Eigen::Index g = 0; g < grid.rows(); ++g) {
    best = std::max(best, std::abs(a.cdf(grid.row(g)) - b.cdf(grid.row(g))));
  }
  return best;
}

double kolmogorov_distance(const EcdfSampleSet& a, const EcdfSampleSet& b) {
  return kolmogorov_distance(a, b, pooled_grid(a, b));
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

DeltaEstimate estimate_delta_n(const PopulationModel& model, const DeltaConfig& config,
                               const StreamKey& key) {
  const Eigen::Index n = config.n;
  const Eigen::Index k = config.k;
  if (n < 1) throw ArgumentError("estimate_delta_n: n must be >= 1");
  if (k < 1 || k > std::min(n, model.dim())) throw ArgumentError("estimate_delta_n: k out of range");
  if (config.datasets < 1 || config.replicates < 2 || config.held_out < 1) {
    throw ArgumentError("estimate_delta_n: need M >= 1, B >= 2 and R >= 1");
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  const Vector truth = model.spectrum().values().head(k);

  EcdfSampleSet sampling{Matrix(config.datasets, k)};
  parallel_for(static_cast<std::size_t>(config.datasets), config.workers,
               [&](std::size_t m, unsigned) {
                 Rng rng = derive_stream(key.child("unconditional", m));
                 const Dataset ds = sample_dataset(model, n, rng);
                 const Vector lam = top_eigenvalues(ds.x, k).values();
                 sampling.points.row(static_cast<Eigen::Index>(m)) =
                     (root_n * (lam - truth)).transpose();
               });

  DeltaEstimate est;
  est.n = n;
  est.p = model.dim();
  est.k = k;
  est.datasets = config.datasets;
  est.replicates = config.replicates;
  est.held_out = config.held_out;
  est.grid_size = config.datasets + config.replicates + 1;

  EngineOptions engine;
  engine.workers = config.workers;
  for (Eigen::Index r = 0; r < config.held_out; ++r) {
    const StreamKey held = key.child("heldout", static_cast<std::uint64_t>(r));
    Rng rng = derive_stream(held.child("dataset", 0));
    const Dataset ds = sample_dataset(model, n, rng);
    const ReplicateDraws draws = draw_replicates(ds, k, config.replicates, held, engine);
    EcdfSampleSet boot{(root_n * (draws.reps.rowwise() - draws.lam_hat.transpose())).eval()};
    est.per_held_out.push_back(kolmogorov_distance(sampling, boot));
  }
  est.delta_hat = median(est.per_held_out);
  return est;
}

double rate_slope(const std::vector<std::pair<double, double>>& points,
                  std::vector<std::string>* warnings) {
  std::set<double> seen;
  std::vector<std::pair<double, double>> usable;
  for (const auto& [n, delta] : points) {
    if (!seen.insert(n).second) {
      throw ArgumentError("rate_slope: duplicate n=" + format_g6(n));
    }
    if (!(n > 0.0)) throw ArgumentError("rate_slope: n must be positive");
    if (!(delta > 0.0)) {
      if (warnings) warnings->push_back("rate_slope: dropping n=" + format_g6(n) +
                                        " with non-positive delta " + format_g6(delta));
      continue;
    }
    usable.emplace_back(std::log(n), std::log(delta));
  }
  if (usable.size() < 3) {
    throw ArgumentError("rate_slope: need at least 3 usable points, have " +
                        std::to_string(usable.size()));
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : usable) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(usable.size());
  my /= static_cast<double>(usable.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : usable) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

std::string model_id(const GeneratorFamily& generator) {
  switch (generator.kind) {
    case GeneratorKind::EllipticalExp: return "i";
    case GeneratorKind::GaussianIid: return "ii";
    default: return generator.name();
  }
}

ExperimentRecord coverage_experiment(const CoverageConfig& config,
                                     std::vector<TrialOutcome>* outcomes) {
  if (config.trials < 1) throw ArgumentError("coverage_experiment: trials must be >= 1");
  if (config.B < 2) throw ArgumentError("coverage_experiment: B must be >= 2");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw ArgumentError("coverage_experiment: alpha must lie in (0, 1)");
  }
  if (config.k < 1 || config.k > config.p) throw ArgumentError("coverage_experiment: k out of range");

  const StreamKey cell = StreamKey(config.seed).child("cell", config.cell);
  Rng basis_rng = derive_stream(cell.child("basis", 0));
  const PopulationModel model =
      build_population(config.profile, config.p, config.generator, basis_rng);

  Vector truth = model.spectrum().values().head(config.k);
  if (config.statistic == Statistic::Proportions) {
    const double total = model.spectrum().sum();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < config.k; ++j) {
      acc += model.spectrum()[j];
      truth[j] = acc / total;
    }
    if (config.k == config.p) truth[config.k - 1] = 1.0;
  }

  std::vector<TrialOutcome> results(static_cast<std::size_t>(config.trials));
  parallel_for(results.size(), config.workers, [&](std::size_t t, unsigned) {
    const StreamKey trial = cell.child("trial", t);
    TrialOutcome& out = results[t];
    try {
      Rng rng = derive_stream(trial.child("dataset", 0));
      const Dataset ds = sample_dataset(model, config.n, rng);
      const ReplicateDraws draws = draw_replicates(ds, config.k, config.B, trial);
      const BootstrapReplicates reps = config.statistic == Statistic::Eigenvalues
                                           ? eigenvalue_replicates(draws)
                                           : proportion_replicates(draws);
      // A degenerate scale under a fixed tau is a failed trial here rather
      // than a silent fallback.
      ConfidenceBand band;
      if (config.rule.adaptive_tau) {
        band = build_band(reps, config.rule.h, select_tau(reps, config.rule.h, config.alpha).chosen,
                          config.alpha);
      } else {
        band = build_band(reps, config.rule.h, config.rule.tau, config.alpha);
      }
      out.covered = band.covers(truth);
      out.mean_width = band.widths().mean();
      out.tau = band.tau;
    } catch (const Error&) {
      out = TrialOutcome{};
      out.failed = true;
    }
  });

  ExperimentRecord rec;
  rec.model = model_id(config.generator);
  rec.decay = describe(config.profile);
  rec.parameter = config.parameter;
  rec.n = config.n;
  rec.p = config.p;
  rec.k = config.k;
  rec.transform = config.rule.h.name();
  rec.tau_mode = config.rule.tau_label();
  rec.alpha = config.alpha;
  rec.trials = config.trials;
  rec.B = config.B;
  rec.seed = config.seed;

  Eigen::Index covered = 0;
  double width_sum = 0.0;
  Eigen::Index widths = 0;
  for (const auto& r : results) {
    if (r.failed) {
      ++rec.failures;
      continue;
    }
    covered += r.covered ? 1 : 0;
    width_sum += r.mean_width;
    ++widths;
  }
  const double trials = static_cast<double>(config.trials);
  rec.coverage = static_cast<double>(covered) / trials;
  rec.coverage_se = std::sqrt(rec.coverage * (1.0 - rec.coverage) / trials);
  if (widths > 0) {
    rec.avg_width = width_sum / static_cast<double>(widths);
    double ss = 0.0;
    for (const auto& r : results)
      if (!r.failed) ss += (r.mean_width - rec.avg_width) * (r.mean_width - rec.avg_width);
    rec.width_sd = widths > 1 ? std::sqrt(ss / static_cast<double>(widths - 1)) : 0.0;
  }
  if (outcomes) *outcomes = std::move(results);
  return rec;
}

std::string format_g6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string records_csv_header() {
  return "model,decay,parameter,n,p,k,transform,tau_mode,alpha,trials,B,coverage,avg_width,"
         "width_sd,coverage_se,seed,failures";
}

std::string to_csv_row(const ExperimentRecord& r) {
  std::ostringstream os;
  os << r.model << ',' << r.decay << ',' << format_g6(r.parameter) << ',' << r.n << ',' << r.p
     << ',' << r.k << ',' << r.transform << ',' << r.tau_mode << ',' << format_g6(r.alpha) << ','
     << r.trials << ',' << r.B << ',' << format_g6(r.coverage) << ',' << format_g6(r.avg_width)
     << ',' << format_g6(r.width_sd) << ',' << format_g6(r.coverage_se) << ',' << r.seed << ','
     << r.failures;
  return os.str();
}

}  // namespace specboot
