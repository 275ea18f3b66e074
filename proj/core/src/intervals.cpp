#include "specboot/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "specboot/errors.hpp"

namespace specboot {

bool ConfidenceBand::covers(const Vector& truth) const {
  if (truth.size() != k()) throw DimensionError("covers: truth length differs from k");
  for (Eigen::Index j = 0; j < k(); ++j)
    if (!(lower[j] <= truth[j] && truth[j] <= upper[j])) return false;
  return true;
}

namespace {

ConfidenceBand band_from_stats(const BootstrapReplicates& reps, const Transformation& h, double tau,
                               double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const Vector sigma = sigma_hat(reps, h);
  const MaxMinSamples mm = max_min_stats(reps, h, sigma, tau);
  const double q_max = empirical_quantile({mm.max.data(), static_cast<std::size_t>(mm.max.size())},
                                          1.0 - alpha / 2.0);
  const double q_min = empirical_quantile({mm.min.data(), static_cast<std::size_t>(mm.min.size())},
                                          alpha / 2.0);
  const Vector h_point = apply_transform(h, reps.point);

  ConfidenceBand band;
  band.statistic = reps.statistic;
  band.h = h;
  band.tau = tau;
  band.alpha = alpha;
  band.point = reps.point;
  band.lower.resize(reps.k());
  band.upper.resize(reps.k());
  for (Eigen::Index j = 0; j < reps.k(); ++j) {
    const double scale = tau == 0.0 ? 1.0 : (tau == 1.0 ? sigma[j] : std::pow(sigma[j], tau));
    band.lower[j] = h.inverse(h_point[j] - scale * q_max);
    band.upper[j] = h.inverse(h_point[j] - scale * q_min);
    if (reps.statistic == Statistic::Proportions) {
      band.lower[j] = std::clamp(band.lower[j], 0.0, 1.0);
      band.upper[j] = std::clamp(band.upper[j], 0.0, 1.0);
    }
  }
  return band;
}

// A proportion that equals 1 in the point estimate and in every replicate is
// pi_p with k = p, which is exactly 1. Such columns are left out of the
// max/min statistics and reported as [1, 1].
std::vector<Eigen::Index> pinned_columns(const BootstrapReplicates& reps) {
  std::vector<Eigen::Index> pinned;
  if (reps.statistic != Statistic::Proportions) return pinned;
  for (Eigen::Index j = 0; j < reps.k(); ++j) {
    if (reps.point[j] == 1.0 && (reps.reps.col(j).array() == 1.0).all()) pinned.push_back(j);
  }
  return pinned;
}

}  // namespace

ConfidenceBand build_band(const BootstrapReplicates& reps, const Transformation& h, double tau,
                          double alpha) {
  const std::vector<Eigen::Index> pinned = pinned_columns(reps);
  if (pinned.empty()) return band_from_stats(reps, h, tau, alpha);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }

  std::vector<Eigen::Index> free;
  for (Eigen::Index j = 0; j < reps.k(); ++j)
    if (std::find(pinned.begin(), pinned.end(), j) == pinned.end()) free.push_back(j);

  ConfidenceBand band;
  band.statistic = reps.statistic;
  band.h = h;
  band.tau = tau;
  band.alpha = alpha;
  band.point = reps.point;
  band.lower = Vector::Ones(reps.k());
  band.upper = Vector::Ones(reps.k());
  if (free.empty()) return band;

  BootstrapReplicates sub;
  sub.statistic = reps.statistic;
  sub.point = reps.point(free);
  sub.reps = reps.reps(Eigen::all, free);
  ConfidenceBand part;
  try {
    part = band_from_stats(sub, h, tau, alpha);
  } catch (const DegenerateScaleError& e) {
    std::vector<std::size_t> idx;
    std::string list;
    for (std::size_t i : e.indices()) {
      idx.push_back(static_cast<std::size_t>(free[i]));
      list += (list.empty() ? "" : ",") + std::to_string(idx.back());
    }
    throw DegenerateScaleError("zero bootstrap scale with tau > 0 at indices {" + list + "}", idx);
  }
  band.lower(free) = part.lower;
  band.upper(free) = part.upper;
  return band;
}

std::vector<double> tau_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

double argmin_tau(const std::vector<double>& grid,
                  const std::vector<std::optional<double>>& scores) {
  if (grid.size() != scores.size()) throw DimensionError("argmin_tau: grid/score size mismatch");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!scores[i]) continue;
    if (!best || *scores[i] < *scores[*best]) best = i;
  }
  return best ? grid[*best] : 0.0;
}

TauSelection select_tau(const BootstrapReplicates& reps, const Transformation& h, double alpha) {
  TauSelection sel;
  sel.grid = tau_grid();
  for (double tau : sel.grid) {
    try {
      const Vector w = build_band(reps, h, tau, alpha).widths();
      const double mean = w.mean();
      const double sd = std::sqrt((w.array() - mean).square().mean());
      sel.scores.emplace_back(mean + sd);
    } catch (const DegenerateScaleError&) {
      sel.scores.emplace_back(std::nullopt);
    }
  }
  sel.chosen = argmin_tau(sel.grid, sel.scores);
  return sel;
}

IntervalRule IntervalRule::named(const std::string& name) {
  if (name == "log") return {Transformation::log(), false, 0.0};
  if (name == "standardization" || name == "identity") {
    return {Transformation::identity(), false, 1.0};
  }
  if (name == "sqrt") return {Transformation::sqrt(), true, 0.0};
  throw ArgumentError("unknown interval rule '" + name +
                      "' (expected log, standardization or sqrt)");
}

std::string IntervalRule::tau_label() const {
  if (adaptive_tau) return "adaptive";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

ConfidenceBand make_band(const BootstrapReplicates& reps, const IntervalRule& rule, double alpha,
                         std::vector<std::string>* warnings) {
  if (rule.adaptive_tau) {
    const TauSelection sel = select_tau(reps, rule.h, alpha);
    return build_band(reps, rule.h, sel.chosen, alpha);
  }
  try {
    return build_band(reps, rule.h, rule.tau, alpha);
  } catch (const DegenerateScaleError& e) {
    if (warnings) warnings->push_back(std::string(e.what()) + "; falling back to tau=0");
    return build_band(reps, rule.h, 0.0, alpha);
  }
}

ConfidenceBand proportion_band(const Dataset& data, Eigen::Index k, Eigen::Index B,
                               const IntervalRule& rule, double alpha, const StreamKey& key,
                               const EngineOptions& options, std::vector<std::string>* warnings) {
  const ReplicateDraws draws = draw_replicates(data, k, B, key, options);
  return make_band(proportion_replicates(draws), rule, alpha, warnings);
}

std::optional<Eigen::Index> select_components(const ConfidenceBand& band, double threshold) {
  for (Eigen::Index j = 0; j < band.k(); ++j)
    if (band.lower[j] > threshold) return j + 1;
  return std::nullopt;
}

}  // namespace specboot
