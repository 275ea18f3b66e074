#include "specboot/bootstrap.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "specboot/errors.hpp"
#include "specboot/krylov.hpp"
#include "specboot/parallel.hpp"

namespace specboot {

// ---------------------------------------------------------------------------
// Transformation

Transformation Transformation::power(double a) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw ArgumentError("power transformation exponent must lie in (0, 1], got " +
                        std::to_string(a));
  }
  return Transformation(Kind::Power, a);
}

Transformation Transformation::parse(const std::string& text) {
  if (text == "log") return log();
  if (text == "identity" || text == "standardization") return identity();
  if (text == "sqrt") return sqrt();
  if (text.rfind("power:", 0) == 0) {
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(text.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 6) {
      throw ArgumentError("cannot parse power exponent in '" + text + "'");
    }
    return power(a);
  }
  throw ArgumentError("unknown transform '" + text +
                      "' (expected log, identity, sqrt or power:<a>)");
}

std::string Transformation::name() const {
  if (kind_ == Kind::Log) return "log";
  if (exponent_ == 1.0) return "identity";
  if (exponent_ == 0.5) return "sqrt";
  char buf[48];
  std::snprintf(buf, sizeof buf, "power:%g", exponent_);
  return buf;
}

double Transformation::operator()(double x) const {
  if (kind_ == Kind::Log) {
    if (!(x > 0.0)) throw DomainError("log transform of non-positive value " + std::to_string(x), 0);
    return std::log(x);
  }
  if (exponent_ == 1.0 && std::isfinite(x)) return x;
  if (!(x >= 0.0)) {
    throw DomainError("power transform of negative value " + std::to_string(x), 0);
  }
  if (exponent_ == 0.5) return std::sqrt(x);
  return std::pow(x, exponent_);
}

double Transformation::inverse(double y) const {
  if (kind_ == Kind::Log) return std::exp(y);
  if (y <= 0.0) return 0.0;
  if (exponent_ == 1.0) return y;
  if (exponent_ == 0.5) return y * y;
  return std::pow(y, 1.0 / exponent_);
}

Vector apply_transform(const Transformation& h, const Vector& values) {
  Vector out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    try {
      out[i] = h(values[i]);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at index " + std::to_string(i),
                        static_cast<std::size_t>(i));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Replicates

std::string to_string(Statistic s) {
  return s == Statistic::Eigenvalues ? "eigenvalues" : "proportions";
}

std::string to_string(ReplicateRoute r) {
  switch (r) {
    case ReplicateRoute::Auto: return "auto";
    case ReplicateRoute::Covariance: return "covariance";
    case ReplicateRoute::Gram: return "gram";
    case ReplicateRoute::Krylov: return "krylov";
  }
  return "unknown";
}

void BootstrapReplicates::validate() const {
  if (point.size() == 0) throw DimensionError("bootstrap replicates: k must be >= 1");
  if (reps.cols() != point.size()) {
    throw DimensionError("bootstrap replicates: reps has " + std::to_string(reps.cols()) +
                         " columns, expected " + std::to_string(point.size()));
  }
  for (Eigen::Index b = 0; b < reps.rows(); ++b) {
    for (Eigen::Index j = 0; j < reps.cols(); ++j) {
      const double v = reps(b, j);
      if (!(v >= 0.0)) throw ArgumentError("bootstrap replicates: negative or NaN entry");
      if (j + 1 < reps.cols()) {
        const double next = reps(b, j + 1);
        const bool ordered = statistic == Statistic::Eigenvalues ? v >= next : v <= next;
        if (!ordered) throw ArgumentError("bootstrap replicates: row " + std::to_string(b) +
                                          " violates the ordering invariant");
      }
    }
  }
}

ReplicateEngine::ReplicateEngine(const Matrix& data, Eigen::Index k, bool centered,
                                 ReplicateRoute route)
    : x_(data), k_(k), centered_(centered), route_(route) {
  if (data.rows() == 0 || data.cols() == 0) throw DimensionError("replicate engine: empty data");
  if (k < 1 || k > data.cols()) throw ArgumentError("replicate engine: k out of range");
  counts_.assign(static_cast<std::size_t>(data.rows()), 0);
}

ReplicateRoute ReplicateEngine::choose_route(Eigen::Index distinct) const {
  if (route_ != ReplicateRoute::Auto) return route_;
  // Rough flop counts; the dense eigensolver constant reflects Householder
  // tridiagonalization plus implicit QR sweeps.
  const double m = static_cast<double>(distinct);
  const double p = static_cast<double>(x_.cols());
  const double d = std::min(m, p);
  const double steps = std::min(d, 3.0 * static_cast<double>(k_) + 25.0);
  const double cov = m * p * p + 6.0 * p * p * p;
  const double gram = m * m * p + 6.0 * m * m * m;
  const double krylov = steps * (4.0 * m * p + 4.0 * steps * d) + 6.0 * steps * steps * steps;
  if (krylov < cov && krylov < gram) return ReplicateRoute::Krylov;
  return cov <= gram ? ReplicateRoute::Covariance : ReplicateRoute::Gram;
}

void ReplicateEngine::compute(std::span<const std::size_t> indices, double* top_k,
                              double& trace) {
  const Eigen::Index n = x_.rows();
  const Eigen::Index p = x_.cols();
  if (static_cast<Eigen::Index>(indices.size()) != n) {
    throw DimensionError("replicate engine: expected " + std::to_string(n) + " indices");
  }
  std::fill(counts_.begin(), counts_.end(), 0);
  for (std::size_t idx : indices) ++counts_[idx];
  distinct_.clear();
  for (std::size_t i = 0; i < counts_.size(); ++i)
    if (counts_[i] > 0) distinct_.push_back(i);

  const auto m = static_cast<Eigen::Index>(distinct_.size());
  y_.resize(m, p);
  scale_.resize(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    const auto i = static_cast<Eigen::Index>(distinct_[static_cast<std::size_t>(t)]);
    const int c = counts_[static_cast<std::size_t>(i)];
    scale_[t] = c == 1 ? 1.0 : std::sqrt(static_cast<double>(c));
    y_.row(t) = scale_[t] * x_.row(i);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (centered_) {
    mean_.noalias() = y_.transpose() * scale_;
    mean_ *= inv_n;
    y_.noalias() -= scale_ * mean_.transpose();
  }
  trace = y_.squaredNorm() * inv_n;

  const ReplicateRoute route = choose_route(m);
  last_route_ = route;
  std::fill(top_k, top_k + k_, 0.0);

  auto take_dense = [&](const Matrix& lower_filled) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(lower_filled, Eigen::EigenvaluesOnly);
    const Vector& ev = solver.eigenvalues();
    const Eigen::Index have = std::min<Eigen::Index>(k_, ev.size());
    for (Eigen::Index j = 0; j < have; ++j) top_k[j] = std::max(ev[ev.size() - 1 - j], 0.0);
  };

  switch (route) {
    case ReplicateRoute::Auto:
    case ReplicateRoute::Covariance: {
      Matrix c = Matrix::Zero(p, p);
      c.selfadjointView<Eigen::Lower>().rankUpdate(y_.transpose(), inv_n);
      take_dense(c);
      break;
    }
    case ReplicateRoute::Gram: {
      Matrix g = Matrix::Zero(m, m);
      g.selfadjointView<Eigen::Lower>().rankUpdate(y_, inv_n);
      take_dense(g);
      break;
    }
    case ReplicateRoute::Krylov: {
      Vector tmp;
      SymmetricOperator op;
      Eigen::Index dim = 0;
      if (p <= m) {
        dim = p;
        op = [&](const Vector& in, Vector& out) {
          tmp.noalias() = y_ * in;
          out.noalias() = y_.transpose() * tmp;
          out *= inv_n;
        };
      } else {
        dim = m;
        op = [&](const Vector& in, Vector& out) {
          tmp.noalias() = y_.transpose() * in;
          out.noalias() = y_ * tmp;
          out *= inv_n;
        };
      }
      const LanczosResult r = lanczos_top_eigenvalues(op, dim, k_);
      for (Eigen::Index j = 0; j < k_; ++j) top_k[j] = r.values[j];
      break;
    }
  }
}

ReplicateDraws draw_replicates(const Dataset& data, Eigen::Index k, Eigen::Index B,
                               const StreamKey& key, const EngineOptions& options) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n < 1 || p < 1) throw DimensionError("draw_replicates: data matrix is empty");
  if (B < 2) throw ArgumentError("draw_replicates: B must be >= 2, got " + std::to_string(B));
  if (k < 1 || k > std::min(n, p)) {
    throw ArgumentError("k=" + std::to_string(k) + " exceeds min(n, p)=" +
                        std::to_string(std::min(n, p)));
  }

  ReplicateDraws out;
  out.lam_hat.resize(k);
  {
    ReplicateEngine engine(data.x, k, options.centered, options.route);
    std::vector<std::size_t> identity(static_cast<std::size_t>(n));
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    engine.compute(identity, out.lam_hat.data(), out.trace_hat);
  }
  const double lead = out.lam_hat[0];
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(out.lam_hat[j] > kNegativeEigenTolerance * lead) || !(lead > 0.0)) {
      throw ArgumentError("k=" + std::to_string(k) + " exceeds the number of nonzero sample "
                          "eigenvalues (" + std::to_string(j) + ")");
    }
  }

  out.reps.resize(B, k);
  out.traces.resize(B);
  const unsigned workers = std::max(1u, options.workers);
  std::vector<ReplicateEngine> engines;
  std::vector<std::vector<std::size_t>> indices(workers);
  std::vector<Vector> rows(workers, Vector(k));
  engines.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    engines.emplace_back(data.x, k, options.centered, options.route);

  parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t b, unsigned w) {
    Rng rng = derive_stream(key.child("replicate", b));
    resample_indices_into(static_cast<std::size_t>(n), rng, indices[w]);
    double tr = 0.0;
    engines[w].compute(indices[w], rows[w].data(), tr);
    out.reps.row(static_cast<Eigen::Index>(b)) = rows[w].transpose();
    out.traces[static_cast<Eigen::Index>(b)] = tr;
  });
  return out;
}

BootstrapReplicates eigenvalue_replicates(const ReplicateDraws& draws) {
  BootstrapReplicates r;
  r.statistic = Statistic::Eigenvalues;
  r.point = draws.lam_hat;
  r.reps = draws.reps;
  return r;
}

namespace {

void cumulative_proportions(const double* top_k, Eigen::Index k, double trace, bool full,
                            double* out) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    acc += top_k[j];
    out[j] = std::clamp(acc / trace, 0.0, 1.0);
    if (j > 0) out[j] = std::max(out[j], out[j - 1]);
  }
  // pi_p is 1 by definition; avoid reporting 1 - ulp.
  if (full) out[k - 1] = 1.0;
}

}  // namespace

BootstrapReplicates proportion_replicates(const ReplicateDraws& draws) {
  if (!(draws.trace_hat > 0.0)) {
    throw DegenerateInputError("proportions need a positive covariance trace");
  }
  const Eigen::Index k = draws.lam_hat.size();
  BootstrapReplicates r;
  r.statistic = Statistic::Proportions;
  r.point.resize(k);
  r.reps.resize(draws.reps.rows(), k);

  // The replicate engine cannot see p, but a trace equal to the top-k sum
  // (up to rounding) means the k eigenvalues exhaust the spectrum.
  auto exhausts = [](const double* v, Eigen::Index kk, double tr) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < kk; ++j) s += v[j];
    return std::abs(s - tr) <= 1e-12 * tr;
  };
  cumulative_proportions(draws.lam_hat.data(), k, draws.trace_hat,
                         exhausts(draws.lam_hat.data(), k, draws.trace_hat), r.point.data());
  Vector row(k), pi(k);
  for (Eigen::Index b = 0; b < draws.reps.rows(); ++b) {
    const double tr = draws.traces[b];
    if (!(tr > 0.0)) {
      throw DegenerateInputError("replicate " + std::to_string(b) + " has zero trace");
    }
    row = draws.reps.row(b).transpose();
    cumulative_proportions(row.data(), k, tr, exhausts(row.data(), k, tr), pi.data());
    r.reps.row(b) = pi.transpose();
  }
  return r;
}

BootstrapReplicates replicate_eigenvalues(const Dataset& data, Eigen::Index k, Eigen::Index B,
                                          const StreamKey& key, const EngineOptions& options) {
  return eigenvalue_replicates(draw_replicates(data, k, B, key, options));
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

Matrix transform_reps(const BootstrapReplicates& reps, const Transformation& h) {
  Matrix t(reps.reps.rows(), reps.reps.cols());
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index b = 0; b < t.rows(); ++b) {
      try {
        t(b, j) = h(reps.reps(b, j));
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " (replicate " + std::to_string(b) +
                              ", index " + std::to_string(j) + ")",
                          static_cast<std::size_t>(j));
      }
    }
  }
  return t;
}

}  // namespace

Vector sigma_hat(const BootstrapReplicates& reps, const Transformation& h) {
  if (reps.b() < 2) throw ArgumentError("sigma_hat: need at least 2 replicates");
  const Matrix t = transform_reps(reps, h);
  Vector sd(t.cols());
  const double denom = static_cast<double>(t.rows() - 1);
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    const double mean = t.col(j).mean();
    sd[j] = std::sqrt((t.col(j).array() - mean).square().sum() / denom);
  }
  return sd;
}

MaxMinSamples max_min_stats(const BootstrapReplicates& reps, const Transformation& h,
                            const Vector& sigma, double tau) {
  const Eigen::Index k = reps.k();
  if (sigma.size() != k) throw DimensionError("max_min_stats: sigma length differs from k");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ArgumentError("tau must lie in [0, 1]");

  Vector denom = Vector::Ones(k);
  if (tau > 0.0) {
    std::vector<std::size_t> zero;
    for (Eigen::Index j = 0; j < k; ++j)
      if (!(sigma[j] > 0.0)) zero.push_back(static_cast<std::size_t>(j));
    if (!zero.empty()) {
      std::string list;
      for (auto z : zero) list += (list.empty() ? "" : ",") + std::to_string(z);
      throw DegenerateScaleError("zero bootstrap scale with tau > 0 at indices {" + list + "}",
                                 std::move(zero));
    }
    for (Eigen::Index j = 0; j < k; ++j) denom[j] = tau == 1.0 ? sigma[j] : std::pow(sigma[j], tau);
  }

  const Vector h_point = apply_transform(h, reps.point);
  const Matrix t = transform_reps(reps, h);
  MaxMinSamples out;
  out.max.resize(t.rows());
  out.min.resize(t.rows());
  for (Eigen::Index b = 0; b < t.rows(); ++b) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < k; ++j) {
      const double z = (t(b, j) - h_point[j]) / denom[j];
      hi = std::max(hi, z);
      lo = std::min(lo, z);
    }
    out.max[b] = hi;
    out.min[b] = lo;
  }
  return out;
}

double empirical_quantile(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw ArgumentError("empirical_quantile: no samples");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("empirical_quantile: alpha must lie in (0, 1), got " +
                        std::to_string(alpha));
  }
  const double count = static_cast<double>(samples.size());
  const double target = count * alpha;
  // Snap B*alpha to an integer when it is one up to rounding (0.95 * 1000).
  const double nearest = std::round(target);
  double rank = std::abs(target - nearest) <= 1e-9 * std::max(1.0, target) ? nearest
                                                                             : std::ceil(target);
  rank = std::clamp(rank, 1.0, count);
  std::vector<double> copy(samples.begin(), samples.end());
  const auto pos = copy.begin() + static_cast<std::ptrdiff_t>(rank) - 1;
  std::nth_element(copy.begin(), pos, copy.end());
  return *pos;
}

}  // namespace specboot
