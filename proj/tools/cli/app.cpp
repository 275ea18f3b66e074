#include "cli/app.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "specboot/errors.hpp"

namespace specboot::cli {

namespace {

// Config keys map onto flags: a one-letter key k becomes -k, anything else
// --key with underscores turned into dashes.
std::string flag_for(const std::string& key) {
  if (key.size() == 1) return "-" + key;
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

std::string flag_name(const std::string& token) {
  if (token.size() < 2 || token[0] != '-') return {};
  if (token[1] != '-') return token.substr(0, 2);
  return token.substr(0, token.find('='));
}

std::string scalar_token(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ConfigError(key, "expected a string, number, boolean or list, got " + v.dump());
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("config", "--config needs a path");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

// Splices the config file's values in front of the user's own flags; a flag
// given on the command line wins over the same key in the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  if (args.empty()) return args;
  const std::string path = find_config_path(args);
  if (path.empty()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[0]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }

  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON in ") + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");

  std::vector<std::string> given;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string name = flag_name(args[i]);
    if (!name.empty()) given.push_back(name);
  }

  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = flag_for(key);
    if (key == "config" || sub->get_option_no_throw(flag) == nullptr) {
      throw ConfigError(key, "unknown key for '" + args[0] + "'");
    }
    if (std::find(given.begin(), given.end(), flag) != given.end()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      if (value.empty()) throw ConfigError(key, "list must be non-empty");
      tokens.push_back(flag);
      for (const auto& item : value) tokens.push_back(scalar_token(item, key));
      continue;
    }
    tokens.push_back(flag);
    tokens.push_back(scalar_token(value, key));
  }

  std::vector<std::string> out{args[0]};
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

void add_shared(CLI::App* sub, std::uint64_t& seed, unsigned& workers, std::string& out,
                std::string& config) {
  sub->add_option("--seed", seed, "Master seed (u64)")->capture_default_str();
  sub->add_option("--workers", workers, "Worker threads; output does not depend on it")
      ->capture_default_str();
  sub->add_option("--out", out, "Write the CSV here instead of stdout");
  sub->add_option("--config", config, "Flat JSON config; flags override its values");
}

void add_grid_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--model", c.model, "i|elliptical, ii|gaussian, twopoint, uniform")
      ->capture_default_str();
  sub->add_option("--decay", c.decay, "polynomial, exponential or gap")->capture_default_str();
  sub->add_option("--parameter", c.parameter, "Decay parameter(s): gamma, delta or gap g")
      ->capture_default_str();
  sub->add_option("-n", c.n, "Sample size(s)")->capture_default_str();
  sub->add_option("-p", c.p, "Dimension(s)")->capture_default_str();
  sub->add_option("-k", c.k, "Number of leading eigenvalues")->capture_default_str();
  sub->add_option("-B", c.B, "Bootstrap replicates")->capture_default_str();
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bootstrap confidence intervals for leading covariance eigenvalues", "specboot"};
  app.require_subcommand(1);
  std::string config_path;

  RunConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Coverage experiment over a parameter grid");
  add_shared(simulate, sim.seed, sim.workers, sim.out, config_path);
  add_grid_options(simulate, sim);
  simulate->add_option("--transform", sim.transform, "log, standardization, identity, sqrt or power:a")
      ->capture_default_str();
  simulate->add_option("--tau", sim.tau, "adaptive or a fixed value in [0,1] (default by transform)");
  simulate->add_option("--alpha", sim.alpha, "Nominal level is 1 - alpha")->capture_default_str();
  simulate->add_option("--trials", sim.trials, "Datasets per grid cell")->capture_default_str();
  simulate->add_option("--statistic", sim.statistic, "eigenvalues or proportions")
      ->capture_default_str();

  RunConfig rates_cfg;
  rates_cfg.n = {250, 1000, 4000};
  rates_cfg.p = {100};
  rates_cfg.parameter = {1.3};
  rates_cfg.k = 2;
  rates_cfg.B = 300;
  auto* rates = app.add_subcommand("rates", "Bootstrap approximation error versus n");
  add_shared(rates, rates_cfg.seed, rates_cfg.workers, rates_cfg.out, config_path);
  add_grid_options(rates, rates_cfg);
  rates->add_option("--datasets", rates_cfg.datasets, "Datasets for the sampling distribution (M)")
      ->capture_default_str();
  rates->add_option("--held-out", rates_cfg.held_out, "Held-out datasets (R)")->capture_default_str();

  CiOptions ci_opts;
  std::string ci_out;
  auto* ci = app.add_subcommand("ci", "Intervals for a return matrix or price table");
  add_shared(ci, ci_opts.seed, ci_opts.workers, ci_out, config_path);
  ci->add_option("--input", ci_opts.input, "Return matrix CSV (header row, one row per period)");
  ci->add_option("--prices", ci_opts.prices, "Price CSV: date,ticker,close[,volume] or date,T1,T2,...");
  ci->add_option("--period", ci_opts.period, "Trading days per return")->capture_default_str();
  ci->add_option("--top", ci_opts.top, "Keep the top tickers by mean volume (0 keeps all)")
      ->capture_default_str();
  ci->add_option("-k", ci_opts.k, "Number of leading eigenvalues")->capture_default_str();
  ci->add_option("-B", ci_opts.B, "Bootstrap replicates")->capture_default_str();
  ci->add_option("--transform", ci_opts.transform, "log, standardization, identity, sqrt or power:a")
      ->capture_default_str();
  ci->add_option("--tau", ci_opts.tau, "adaptive or a fixed value in [0,1] (default by transform)");
  ci->add_option("--alpha", ci_opts.alpha, "Nominal level is 1 - alpha")->capture_default_str();
  ci->add_flag("--proportions", ci_opts.proportions, "Also bound explained-variance proportions");
  ci->add_option("--threshold", ci_opts.threshold, "Report components whose proportion bound clears it");
  ci->add_flag("--uncentered", ci_opts.uncentered, "Do not subtract column means");

  GammaCheckOptions gc;
  unsigned gc_workers = 1;
  std::string gc_out;
  auto* gamma = app.add_subcommand("gamma-check", "Analytic Gamma versus Monte Carlo");
  add_shared(gamma, gc.seed, gc_workers, gc_out, config_path);
  gamma->add_option("--generator", gc.generator, "gaussian, elliptical, twopoint or uniform")
      ->capture_default_str();
  gamma->add_option("-p", gc.p, "Dimension")->capture_default_str();
  gamma->add_option("-k", gc.k, "Size of Gamma")->capture_default_str();
  gamma->add_option("--samples", gc.samples, "Monte Carlo draws of Z")->capture_default_str();
  gamma->add_option("--basis", gc.basis, "haar or identity")->capture_default_str();

  BenchOptions bo;
  unsigned bench_workers = 1;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Seconds per bootstrap replicate (single thread)");
  add_shared(bench, bo.seed, bench_workers, bench_out, config_path);
  bench->add_option("-n", bo.n, "Sample size(s)")->capture_default_str();
  bench->add_option("-p", bo.p, "Dimension(s)")->capture_default_str();
  bench->add_option("-k", bo.k, "Number of leading eigenvalues")->capture_default_str();
  bench->add_option("-B", bo.B, "Replicates to time (>= 200)")->capture_default_str();
  bench->add_option("--model", bo.model, "Generator for the synthetic data")->capture_default_str();
  bench->add_option("--gamma", bo.gamma, "Polynomial decay exponent")->capture_default_str();
  bench->add_option("--route", bo.route, "auto, covariance, gram or krylov")->capture_default_str();

  try {
    std::vector<std::string> expanded = expand_config(args, app);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const auto with_output = [&](const std::string& path, auto&& body) {
    if (path.empty()) return body(out);
    std::ofstream file(path);
    if (!file) throw ConfigError("out", "cannot write " + path);
    const int code = body(file);
    file.close();
    if (!file) throw Error("failed writing " + path);
    return code;
  };

  try {
    if (*simulate) return with_output(sim.out, [&](std::ostream& o) { return cmd_simulate(sim, o, err); });
    if (*rates) {
      return with_output(rates_cfg.out, [&](std::ostream& o) { return cmd_rates(rates_cfg, o, err); });
    }
    if (*ci) {
      return with_output(ci_out, [&](std::ostream& o) {
        return cmd_ci(ci_opts, o, ci_out.empty() ? err : out, err);
      });
    }
    if (*gamma) return with_output(gc_out, [&](std::ostream& o) { return cmd_gamma_check(gc, o, err); });
    if (*bench) return with_output(bench_out, [&](std::ostream& o) { return cmd_bench(bo, o, err); });
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace specboot::cli
