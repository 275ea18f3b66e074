#pragma once

// Subcommand implementations. Each returns a process exit code and writes
// its primary output (CSV) to `out` and diagnostics to `log`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace specboot::cli {

inline constexpr const char* kSchemaLine = "# schema_version=1";

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& log);

struct CiOptions {
  std::string input;   // return matrix CSV
  std::string prices;  // price table CSV (long or wide)
  std::int64_t period = 10;
  std::int64_t top = 0;  // 0 keeps every ticker
  std::int64_t k = 10;
  std::string transform = "sqrt";
  std::optional<std::string> tau;
  std::int64_t B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool proportions = false;
  std::optional<double> threshold;
  bool uncentered = false;
};

/// Writes the interval CSV to `out` and the human-readable table to `report`.
int cmd_ci(const CiOptions& options, std::ostream& out, std::ostream& report, std::ostream& log);

int cmd_rates(const RunConfig& config, std::ostream& out, std::ostream& log);

struct GammaCheckOptions {
  std::string generator = "gaussian";
  std::int64_t p = 5;
  std::int64_t k = 3;
  std::int64_t samples = 200000;
  std::string basis = "haar";  // haar or identity
  std::uint64_t seed = 1;
};

int cmd_gamma_check(const GammaCheckOptions& options, std::ostream& out, std::ostream& log);

struct BenchOptions {
  std::vector<std::int64_t> n{500};
  std::vector<std::int64_t> p{200};
  std::int64_t k = 5;
  std::int64_t B = 200;
  std::string model = "i";
  double gamma = 1.0;
  std::string route = "auto";
  std::uint64_t seed = 1;
};

struct BenchCell {
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::int64_t k = 0;
  std::int64_t B = 0;
  std::string route;
  double seconds_per_replicate = 0.0;
  double checksum = 0.0;  // sum of replicate values; timing never changes it
};

std::vector<BenchCell> run_bench(const BenchOptions& options);

/// Least-squares fit t = a n log n + b n p k (no intercept). Needs two cells
/// with linearly independent regressors.
std::optional<std::pair<double, double>> fit_cost_model(const std::vector<BenchCell>& cells);

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& log);

}  // namespace specboot::cli
