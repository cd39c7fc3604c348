// algosim run --config paper-grid --scale desk --out out/
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "algosim/errors.hpp"
#include "algosim/scenario.hpp"

namespace {

enum Exit : int { Ok = 0, Failure = 1, NoConfig = 2, BadConfig = 3, Invariant = 4 };

int run(const std::string& config_path, const algosim::RunOptions& opts, bool quiet) {
  try {
    auto cfg = algosim::load_scenario_config(config_path);
    algosim::apply_overrides(cfg, opts);
    auto results = algosim::run_grid(cfg, quiet ? nullptr : &std::cerr);
    algosim::write_outputs(opts.out_dir, cfg, results, opts.compare);
    std::cout << algosim::summary_table(results);
    if (opts.compare) std::cout << '\n' << algosim::compare_table(results);
    return Ok;
  } catch (const algosim::MissingConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return NoConfig;
  } catch (const algosim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return BadConfig;
  } catch (const algosim::InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return Invariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Failure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"algosim: consensus simulator under message flooding"};
  app.require_subcommand(1);

  auto* cmd = app.add_subcommand("run", "run a scenario or grid");
  std::string config_path;
  algosim::RunOptions opts;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string scale;
  double duration = 0;
  bool quiet = false;

  cmd->add_option("--config", config_path, "config file or preset (paper-grid, no-attack)")->required();
  cmd->add_option("--out", out_dir, "output directory");
  auto* seed_opt = cmd->add_option("--seed", seed, "rng seed");
  auto* jobs_opt = cmd->add_option("--jobs", jobs, "concurrent cells")->check(CLI::PositiveNumber);
  auto* scale_opt = cmd->add_option("--scale", scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  auto* dur_opt = cmd->add_option("--duration", duration, "simulated seconds")->check(CLI::PositiveNumber);
  cmd->add_flag("--compare", opts.compare, "print deltas against reference tables");
  cmd->add_flag("-q,--quiet", quiet, "no progress lines");

  CLI11_PARSE(app, argc, argv);

  opts.out_dir = out_dir;
  if (*seed_opt) opts.seed = seed;
  if (*jobs_opt) opts.jobs = jobs;
  if (*scale_opt) opts.scale = algosim::parse_scale(scale);
  if (*dur_opt) opts.duration_s = duration;
  return run(config_path, opts, quiet);
}
