#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>

#include "specboot/errors.hpp"
#include "specboot/gamma.hpp"
#include "specboot/ingest.hpp"
#include "specboot/metrics.hpp"

namespace specboot::cli {

namespace {

void warn_gap(const RunConfig& c, double parameter, std::ostream& log) {
  if (c.decay == "gap" && parameter == 0.0) {
    log << "warning: gap parameter 0 ties the three leading eigenvalues; "
           "the eigengap assumption does not hold\n";
  }
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& log) {
  validate_simulation(c);
  const GeneratorFamily generator = resolve_generator(c);
  const IntervalRule rule = resolve_rule(c);
  const Statistic statistic = resolve_statistic(c);

  out << kSchemaLine << '\n' << records_csv_header() << '\n';
  std::uint64_t cell = 0;
  for (double parameter : c.parameter) {
    warn_gap(c, parameter, log);
    for (auto p : c.p) {
      for (auto n : c.n) {
        CoverageConfig cc;
        cc.generator = generator;
        cc.profile = resolve_profile(c, parameter);
        cc.parameter = parameter;
        cc.n = n;
        cc.p = p;
        cc.k = c.k;
        cc.rule = rule;
        cc.alpha = c.alpha;
        cc.trials = c.trials;
        cc.B = c.B;
        cc.seed = c.seed;
        cc.cell = cell++;
        cc.workers = c.workers;
        cc.statistic = statistic;
        const auto start = std::chrono::steady_clock::now();
        const ExperimentRecord rec = coverage_experiment(cc);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        out << to_csv_row(rec) << '\n' << std::flush;
        log << "cell " << cc.cell << " param=" << format_g6(parameter) << " p=" << p << " n=" << n
            << " coverage=" << format_g6(rec.coverage) << " failures=" << rec.failures << " ("
            << format_g6(took.count()) << " s)\n";
      }
    }
  }
  return 0;
}

int cmd_ci(const CiOptions& o, std::ostream& out, std::ostream& report, std::ostream& log) {
  if (o.input.empty() == o.prices.empty()) {
    throw ConfigError("input", "give exactly one of --input and --prices");
  }
  if (o.k < 1) throw ConfigError("k", "must be >= 1");
  if (o.B < 2) throw ConfigError("B", "must be >= 2");
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
  if (o.workers < 1) throw ConfigError("workers", "must be >= 1");
  if (o.top < 0) throw ConfigError("top", "must be >= 0");
  if (o.threshold && !(*o.threshold > 0.0 && *o.threshold < 1.0)) {
    throw ConfigError("threshold", "must lie in (0, 1)");
  }
  RunConfig rc;
  rc.transform = o.transform;
  rc.tau = o.tau;
  const IntervalRule rule = resolve_rule(rc);

  ReturnMatrix returns;
  if (!o.prices.empty()) {
    PriceTable table = load_prices(o.prices);
    if (!table.dropped.empty()) {
      log << "warning: dropped " << table.dropped.size() << " ticker(s) with missing dates:";
      for (const auto& t : table.dropped) log << ' ' << t;
      log << '\n';
    }
    if (o.top > 0) table = select_tickers(table, rank_by_volume(table, static_cast<std::size_t>(o.top)));
    returns = to_log_returns(table, o.period);
  } else {
    returns = load_matrix_csv(o.input);
  }
  log << "data: n=" << returns.n() << " p=" << returns.p() << '\n';

  Dataset data{returns.values, o.prices.empty() ? o.input : o.prices};
  EngineOptions engine;
  engine.centered = !o.uncentered;
  engine.workers = o.workers;
  const ReplicateDraws draws = draw_replicates(data, o.k, o.B, StreamKey(o.seed), engine);

  std::vector<std::string> warnings;
  std::vector<ConfidenceBand> bands;
  bands.push_back(make_band(eigenvalue_replicates(draws), rule, o.alpha, &warnings));
  const bool want_proportions = o.proportions || o.threshold.has_value();
  if (want_proportions) {
    bands.push_back(make_band(proportion_replicates(draws), rule, o.alpha, &warnings));
  }
  for (const auto& w : warnings) log << "warning: " << w << '\n';

  out << kSchemaLine << '\n' << "j,point,lower,upper,transform,tau,alpha,statistic\n";
  for (const auto& band : bands) {
    for (Eigen::Index j = 0; j < band.k(); ++j) {
      out << j + 1 << ',' << format_g6(band.point[j]) << ',' << format_g6(band.lower[j]) << ','
          << format_g6(band.upper[j]) << ',' << band.h.name() << ',' << format_g6(band.tau) << ','
          << format_g6(band.alpha) << ',' << to_string(band.statistic) << '\n';
    }
  }

  for (const auto& band : bands) {
    report << to_string(band.statistic) << " (" << band.h.name() << ", tau=" << format_g6(band.tau)
           << ", level " << format_g6(1.0 - band.alpha) << ")\n";
    report << std::setw(4) << "j" << std::setw(14) << "lower" << std::setw(14) << "point"
           << std::setw(14) << "upper" << '\n';
    for (Eigen::Index j = 0; j < band.k(); ++j) {
      report << std::setw(4) << j + 1 << std::setw(14) << format_g6(band.lower[j]) << std::setw(14)
             << format_g6(band.point[j]) << std::setw(14) << format_g6(band.upper[j]) << '\n';
    }
  }
  if (o.threshold) {
    const ConfidenceBand& pb = bands.back();
    const auto chosen = select_components(pb, *o.threshold);
    report << "selected components (lower bound > " << format_g6(*o.threshold) << "): ";
    if (chosen) {
      report << *chosen << '\n';
    } else {
      report << "none within k=" << o.k << '\n';
    }
    std::optional<Eigen::Index> naive;
    for (Eigen::Index j = 0; j < pb.k() && !naive; ++j)
      if (pb.point[j] > *o.threshold) naive = j + 1;
    report << "point-estimate rule would select: ";
    if (naive) {
      report << *naive << '\n';
    } else {
      report << "none within k=" << o.k << '\n';
    }
  }
  return 0;
}

int cmd_rates(const RunConfig& c, std::ostream& out, std::ostream& log) {
  validate_simulation(c);
  if (c.p.size() != 1) throw ConfigError("p", "rates takes a single p");
  if (c.parameter.size() != 1) throw ConfigError("parameter", "rates takes a single parameter");
  {
    std::set<std::int64_t> seen;
    for (auto n : c.n)
      if (!seen.insert(n).second) throw ConfigError("n", "duplicate value " + std::to_string(n));
  }
  for (auto n : c.n)
    if (c.k > n) throw ConfigError("k", "k=" + std::to_string(c.k) + " exceeds n=" + std::to_string(n));
  warn_gap(c, c.parameter.front(), log);

  const StreamKey root(c.seed);
  Rng basis_rng = derive_stream(root.child("basis", 0));
  const PopulationModel model = build_population(resolve_profile(c, c.parameter.front()), c.p.front(),
                                                 resolve_generator(c), basis_rng);

  out << kSchemaLine << '\n' << "n,p,k,grid_size,delta_hat,M,B,R\n";
  std::vector<std::pair<double, double>> points;
  for (auto n : c.n) {
    DeltaConfig dc;
    dc.n = n;
    dc.k = c.k;
    dc.datasets = c.datasets;
    dc.replicates = c.B;
    dc.held_out = c.held_out;
    dc.workers = c.workers;
    const DeltaEstimate est = estimate_delta_n(model, dc, root.child("n", static_cast<std::uint64_t>(n)));
    out << est.n << ',' << est.p << ',' << est.k << ',' << est.grid_size << ','
        << format_g6(est.delta_hat) << ',' << est.datasets << ',' << est.replicates << ','
        << est.held_out << '\n'
        << std::flush;
    log << "n=" << n << " delta_hat=" << format_g6(est.delta_hat) << '\n';
    points.emplace_back(static_cast<double>(n), est.delta_hat);
  }
  if (points.size() >= 3) {
    std::vector<std::string> warnings;
    const double slope = rate_slope(points, &warnings);
    for (const auto& w : warnings) log << "warning: " << w << '\n';
    out << "# rate_slope=" << format_g6(slope) << '\n';
    log << "rate_slope=" << format_g6(slope) << '\n';
  } else if (points.size() == 2) {
    // Two points determine the slope directly.
    const double slope = std::log(points[1].second / points[0].second) /
                         std::log(points[1].first / points[0].first);
    out << "# rate_slope=" << format_g6(slope) << '\n';
    log << "rate_slope=" << format_g6(slope) << " (two points)\n";
  }
  return 0;
}

int cmd_gamma_check(const GammaCheckOptions& o, std::ostream& out, std::ostream& log) {
  RunConfig rc;
  rc.model = o.generator;
  const GeneratorFamily generator = resolve_generator(rc);
  if (o.p < 1) throw ConfigError("p", "must be >= 1");
  if (o.k < 1 || o.k > o.p) {
    throw ConfigError("k", "k=" + std::to_string(o.k) + " must lie in [1, p=" + std::to_string(o.p) + "]");
  }
  if (o.samples < 2) throw ConfigError("samples", "must be >= 2");
  if (o.basis != "haar" && o.basis != "identity") throw ConfigError("basis", "expected haar or identity");

  const StreamKey root(o.seed);
  Rng basis_rng = derive_stream(root.child("basis", 0));
  const OrthogonalBasis basis =
      o.basis == "haar" ? haar_orthogonal(o.p, basis_rng) : OrthogonalBasis::identity(o.p);

  const GammaMatrix analytic =
      generator.kind == GeneratorKind::EllipticalExp
          ? analytic_gamma_elliptical(o.p, 2.0 * static_cast<double>(o.p * o.p), o.k)
          : analytic_gamma_iid(Vector::Constant(o.p, generator.kurtosis()), basis, o.k);

  Matrix z(o.samples, o.p);
  Rng z_rng = derive_stream(root.child("z", 0));
  generate_z_rows(generator, z_rng, z);
  const GammaMatrix mc = empirical_gamma(z, basis, o.k);

  out << kSchemaLine << '\n' << "i,j,analytic,monte_carlo,abs_error\n";
  double worst = 0.0;
  for (Eigen::Index i = 0; i < o.k; ++i) {
    for (Eigen::Index j = 0; j < o.k; ++j) {
      const double a = analytic(i, j);
      const double m = mc(i, j);
      worst = std::max(worst, std::abs(a - m));
      out << i + 1 << ',' << j + 1 << ',' << format_g6(a) << ',' << format_g6(m) << ','
          << format_g6(std::abs(a - m)) << '\n';
    }
  }
  out << "# max_abs_error=" << format_g6(worst) << '\n';
  log << generator.name() << " p=" << o.p << " k=" << o.k << " samples=" << o.samples
      << " max_abs_error=" << format_g6(worst) << '\n';
  return 0;
}

namespace {

ReplicateRoute parse_route(const std::string& s) {
  if (s == "auto") return ReplicateRoute::Auto;
  if (s == "covariance") return ReplicateRoute::Covariance;
  if (s == "gram") return ReplicateRoute::Gram;
  if (s == "krylov") return ReplicateRoute::Krylov;
  throw ConfigError("route", "expected auto, covariance, gram or krylov, got '" + s + "'");
}

}  // namespace

std::vector<BenchCell> run_bench(const BenchOptions& o) {
  if (o.n.empty() || o.p.empty()) throw ConfigError("n", "grids must be non-empty");
  if (o.B < 200) throw ConfigError("B", "must be >= 200 for a stable mean");
  if (o.k < 1) throw ConfigError("k", "must be >= 1");
  RunConfig rc;
  rc.model = o.model;
  const GeneratorFamily generator = resolve_generator(rc);
  const ReplicateRoute route = parse_route(o.route);
  if (!(o.gamma > 0.0)) throw ConfigError("gamma", "must be positive");

  std::vector<BenchCell> cells;
  for (auto p : o.p) {
    for (auto n : o.n) {
      if (o.k > std::min(n, p)) {
        throw ConfigError("k", "k=" + std::to_string(o.k) + " exceeds min(n, p) for n=" +
                                   std::to_string(n) + ", p=" + std::to_string(p));
      }
      const StreamKey key = StreamKey(o.seed).child("bench", static_cast<std::uint64_t>(cells.size()));
      Rng rng = derive_stream(key.child("model", 0));
      const PopulationModel model = build_population(PolynomialDecay{o.gamma}, p, generator, rng);
      const Dataset ds = sample_dataset(model, n, rng);
      EngineOptions engine;
      engine.route = route;

      const auto start = std::chrono::steady_clock::now();
      const ReplicateDraws draws = draw_replicates(ds, o.k, o.B, key, engine);
      const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;

      BenchCell cell;
      cell.n = n;
      cell.p = p;
      cell.k = o.k;
      cell.B = o.B;
      // Route actually taken on a typical resample.
      ReplicateEngine probe(ds.x, o.k, false, route);
      Rng probe_rng = derive_stream(key.child("probe", 0));
      const ResampleIndices idx = resample_indices(static_cast<std::size_t>(n), probe_rng);
      std::vector<double> top(static_cast<std::size_t>(o.k));
      double trace = 0.0;
      probe.compute(idx.indices, top.data(), trace);
      cell.route = to_string(probe.last_route());
      cell.seconds_per_replicate = took.count() / static_cast<double>(o.B);
      cell.checksum = draws.reps.sum();
      cells.push_back(cell);
    }
  }
  return cells;
}

std::optional<std::pair<double, double>> fit_cost_model(const std::vector<BenchCell>& cells) {
  if (cells.size() < 2) return std::nullopt;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(cells.size()), 2);
  Eigen::VectorXd t(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double n = static_cast<double>(cells[i].n);
    a(r, 0) = n * std::log(n);
    a(r, 1) = n * static_cast<double>(cells[i].p) * static_cast<double>(cells[i].k);
    t[r] = cells[i].seconds_per_replicate;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 2) return std::nullopt;
  const Eigen::Vector2d coef = qr.solve(t);
  return std::make_pair(coef[0], coef[1]);
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& log) {
  const auto cells = run_bench(o);
  out << kSchemaLine << '\n' << "n,p,k,B,route,seconds_per_replicate\n";
  for (const auto& c : cells) {
    out << c.n << ',' << c.p << ',' << c.k << ',' << c.B << ',' << c.route << ','
        << format_g6(c.seconds_per_replicate) << '\n';
    log << "n=" << c.n << " p=" << c.p << " k=" << c.k << " route=" << c.route
        << " mean seconds per replicate=" << format_g6(c.seconds_per_replicate) << '\n';
  }
  if (const auto fit = fit_cost_model(cells)) {
    out << "# fit: seconds = a*n*log(n) + b*n*p*k, a=" << format_g6(fit->first)
        << ", b=" << format_g6(fit->second) << '\n';
    log << "fit: a=" << format_g6(fit->first) << " (n log n), b=" << format_g6(fit->second)
        << " (n p k)\n";
  } else {
    log << "fit: needs two cells with distinct (n log n, n p k)\n";
  }
  return 0;
}

}  // namespace specboot::cli
