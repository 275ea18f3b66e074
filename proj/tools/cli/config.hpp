#pragma once

// Run configuration shared by the simulation subcommands.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "specboot/bootstrap.hpp"
#include "specboot/intervals.hpp"
#include "specboot/models.hpp"

namespace specboot::cli {

/// Invalid configuration; field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  std::string model = "ii";  // i (elliptical), ii (gaussian), twopoint, uniform
  std::string decay = "polynomial";  // polynomial, exponential, gap
  std::vector<double> parameter{1.0};
  std::vector<std::int64_t> n{100};
  std::vector<std::int64_t> p{10};
  std::int64_t k = 5;
  std::string transform = "sqrt";
  std::optional<std::string> tau;  // "adaptive" or a number; default by transform
  double alpha = 0.05;
  std::int64_t trials = 100;
  std::int64_t B = 500;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
  std::string statistic = "eigenvalues";
  // rates
  std::int64_t datasets = 300;
  std::int64_t held_out = 5;
};

GeneratorFamily resolve_generator(const RunConfig& config);
DecayProfile resolve_profile(const RunConfig& config, double parameter);
IntervalRule resolve_rule(const RunConfig& config);
Statistic resolve_statistic(const RunConfig& config);

/// Checks every field the simulate/rates commands read; throws ConfigError.
void validate_simulation(const RunConfig& config);

}  // namespace specboot::cli
