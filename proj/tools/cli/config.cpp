#include "cli/config.hpp"

#include "specboot/errors.hpp"

namespace specboot::cli {

GeneratorFamily resolve_generator(const RunConfig& c) {
  try {
    return parse_generator(c.model);
  } catch (const Error& e) {
    throw ConfigError("model", e.what());
  }
}

DecayProfile resolve_profile(const RunConfig& c, double parameter) {
  if (c.decay == "polynomial") return PolynomialDecay{parameter};
  if (c.decay == "exponential") return ExponentialDecay{parameter};
  if (c.decay == "gap") {
    try {
      return gap_profile(parameter);
    } catch (const Error& e) {
      throw ConfigError("parameter", e.what());
    }
  }
  throw ConfigError("decay", "unknown decay '" + c.decay +
                                 "' (expected polynomial, exponential or gap)");
}

IntervalRule resolve_rule(const RunConfig& c) {
  IntervalRule rule;
  try {
    rule.h = Transformation::parse(c.transform);
  } catch (const Error& e) {
    throw ConfigError("transform", e.what());
  }
  if (rule.h.kind() == Transformation::Kind::Log) {
    rule.adaptive_tau = false;
    rule.tau = 0.0;
  } else if (rule.h.is_identity()) {
    rule.adaptive_tau = false;
    rule.tau = 1.0;
  } else {
    rule.adaptive_tau = true;
  }
  if (c.tau) {
    if (*c.tau == "adaptive") {
      rule.adaptive_tau = true;
    } else {
      std::size_t used = 0;
      double t = -1.0;
      try {
        t = std::stod(*c.tau, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.tau->size() || !(t >= 0.0 && t <= 1.0)) {
        throw ConfigError("tau", "expected 'adaptive' or a number in [0, 1], got '" + *c.tau + "'");
      }
      rule.adaptive_tau = false;
      rule.tau = t;
    }
  }
  return rule;
}

Statistic resolve_statistic(const RunConfig& c) {
  if (c.statistic == "eigenvalues") return Statistic::Eigenvalues;
  if (c.statistic == "proportions") return Statistic::Proportions;
  throw ConfigError("statistic", "expected eigenvalues or proportions, got '" + c.statistic + "'");
}

void validate_simulation(const RunConfig& c) {
  resolve_generator(c);
  resolve_rule(c);
  resolve_statistic(c);
  if (c.parameter.empty()) throw ConfigError("parameter", "grid must be non-empty");
  if (c.n.empty()) throw ConfigError("n", "grid must be non-empty");
  if (c.p.empty()) throw ConfigError("p", "grid must be non-empty");
  for (auto n : c.n)
    if (n < 1) throw ConfigError("n", "values must be >= 1");
  for (auto p : c.p)
    if (p < 1) throw ConfigError("p", "values must be >= 1");
  if (c.k < 1) throw ConfigError("k", "must be >= 1");
  for (auto p : c.p)
    if (c.k > p) throw ConfigError("k", "k=" + std::to_string(c.k) + " exceeds p=" + std::to_string(p));
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
  if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
  if (c.B < 2) throw ConfigError("B", "must be >= 2");
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  if (c.datasets < 1) throw ConfigError("datasets", "must be >= 1");
  if (c.held_out < 1) throw ConfigError("held_out", "must be >= 1");
  for (double param : c.parameter) {
    const DecayProfile profile = resolve_profile(c, param);
    for (auto p : c.p) {
      try {
        profile_spectrum(profile, p);
      } catch (const Error& e) {
        throw ConfigError("parameter", e.what());
      }
    }
  }
}

}  // namespace specboot::cli
