#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "algosim/metrics.hpp"
#include "algosim/simulation.hpp"

namespace algosim {

enum class Scale : std::uint8_t { Desk, Paper };

Scale parse_scale(std::string_view s);
const char* to_string(Scale s);

struct ScenarioConfig {
  std::string name;
  SimulationConfig base;  // attack sizes are overridden per cell
  std::vector<double> block_sizes_mb{1.0};
  std::vector<std::uint32_t> n_malicious{0};
  std::vector<std::uint32_t> keys_per_node{0};
  bool include_baseline = false;  // one no-attack cell per block size
  bool write_round_records = true;
  std::uint32_t desk_nodes = 64;
  std::uint32_t paper_nodes = 500;
  Scale scale = Scale::Desk;
  unsigned jobs = 0;  // 0: hardware concurrency
};

/// Thrown when a config path neither exists nor names a built-in preset.
struct MissingConfig : std::runtime_error {
  explicit MissingConfig(const std::string& path) : std::runtime_error{"config not found: " + path}, path{path} {}
  std::string path;
};

/// Parses JSON text. Unknown keys and bad values raise ConfigError naming the field.
ScenarioConfig parse_scenario_config(std::string_view json_text, std::string name = "custom");
/// A file path, or one of the built-in presets "paper-grid" / "no-attack".
ScenarioConfig load_scenario_config(const std::string& path_or_preset);
/// JSON text of a built-in preset, or empty if unknown.
std::string_view preset_text(std::string_view name);

struct Cell {
  std::string label;
  double block_size_mb = 0;
  std::uint32_t n_malicious = 0;
  std::uint32_t keys_per_node = 0;
  SimulationConfig sim;

  bool attacked() const { return n_malicious > 0 && keys_per_node > 0; }
};

std::vector<Cell> expand_grid(const ScenarioConfig& cfg);

struct CellResult {
  Cell cell;
  std::vector<ScenarioSummary> summaries;  // "targeted" + "honest", or "all"
  std::vector<RoundRecord> records;
  SimulationStats stats;
  std::size_t honest_forks = 0;
  std::uint64_t attack_bytes = 0;
  std::vector<AttackLaunch> launches;
  std::size_t edges = 0;
};

CellResult run_cell(const Cell& cell);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<Scale> scale;
  std::optional<double> duration_s;
  bool compare = false;
};

/// Applies command-line overrides to a loaded config.
void apply_overrides(ScenarioConfig& cfg, const RunOptions& opts);

/// Runs every cell (in parallel up to cfg.jobs) and returns results in grid order.
std::vector<CellResult> run_grid(const ScenarioConfig& cfg, std::ostream* progress = nullptr);

/// Writes cells/*.csv, summary.csv and summary.txt under out_dir.
void write_outputs(const std::filesystem::path& out_dir, const ScenarioConfig& cfg,
                   const std::vector<CellResult>& results, bool compare);

std::string summary_table(const std::vector<CellResult>& results);
/// Side-by-side with the published reference values; no assertion.
std::string compare_table(const std::vector<CellResult>& results);

struct ReferenceCell {
  double block_size_mb;
  std::uint32_t n_malicious;  // 0 = no attack
  std::uint32_t keys_per_node;
  double round_time_s;
  double pct_received;
  double pct_validated;
};
const std::vector<ReferenceCell>& reference_values();

}  // namespace algosim
