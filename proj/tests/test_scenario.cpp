#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "algosim/errors.hpp"
#include "algosim/scenario.hpp"

using namespace algosim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in{path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string field_of(const std::string& text) {
  try {
    parse_scenario_config(text);
  } catch (const ConfigError& e) {
    return e.field;
  }
  return "<accepted>";
}

}  // namespace

TEST(Scenario, ShippedConfigsMatchPresets) {
  for (std::string name : {"paper-grid", "no-attack"}) {
    auto file = nlohmann::json::parse(slurp(std::string{ALGOSIM_CONFIG_DIR} + "/" + name + ".json"));
    auto preset = nlohmann::json::parse(preset_text(name));
    EXPECT_EQ(file, preset) << name;
  }
}

TEST(Scenario, GridPresetShape) {
  auto cfg = load_scenario_config("paper-grid");
  auto cells = expand_grid(cfg);
  ASSERT_EQ(cells.size(), 40U);  // 36 attack cells + one baseline per block size
  int attacked = 0;
  for (const auto& c : cells) attacked += c.attacked() ? 1 : 0;
  EXPECT_EQ(attacked, 36);
  EXPECT_EQ(cells[0].label, "bs0.50_baseline");
  EXPECT_EQ(cells[1].label, "bs0.50_m5_k25");
  for (const auto& c : cells) {
    EXPECT_EQ(c.sim.network.n_honest, 64U);
    EXPECT_EQ(c.sim.block_size, c.sim.attack.payload_block_size);
  }
}

TEST(Scenario, PresetDefaultsAreExplicit) {
  auto j = nlohmann::json::parse(preset_text("paper-grid"));
  EXPECT_EQ(j["consensus"]["proposal_window_s"], 150.0);
  EXPECT_EQ(j["consensus"]["step_timeout_s"], 60.0);
  EXPECT_EQ(j["consensus"]["committee_threshold_fraction"], 0.685);
  EXPECT_EQ(j["consensus"]["committee_votes"], 2000.0);
  EXPECT_EQ(j["consensus"]["proposer_votes"], 26.0);
  EXPECT_EQ(j["network"]["upload_mbps"], 30.0);
  EXPECT_EQ(j["run"]["duration_s"], 2700.0);
}

TEST(Scenario, NoAttackIsOneCell) {
  auto cfg = load_scenario_config("no-attack");
  auto cells = expand_grid(cfg);
  ASSERT_EQ(cells.size(), 1U);
  EXPECT_FALSE(cells[0].attacked());
  EXPECT_EQ(cells[0].sim.block_size, 1'000'000U);
}

TEST(Scenario, OverridesApply) {
  auto cfg = load_scenario_config("no-attack");
  RunOptions o;
  o.scale = Scale::Paper;
  o.seed = 99;
  o.duration_s = 100;
  apply_overrides(cfg, o);
  auto cells = expand_grid(cfg);
  EXPECT_EQ(cells[0].sim.network.n_honest, 500U);
  EXPECT_EQ(cells[0].sim.seed, 99U);
  EXPECT_EQ(cells[0].sim.duration_s, 100.0);
  o.duration_s = -1;
  EXPECT_THROW(apply_overrides(cfg, o), ConfigError);
}

TEST(Scenario, MissingConfigNamesPath) {
  try {
    load_scenario_config("/nonexistent/grid.json");
    FAIL();
  } catch (const MissingConfig& e) {
    EXPECT_EQ(e.path, "/nonexistent/grid.json");
  }
}

TEST(Scenario, FieldLevelDiagnostics) {
  EXPECT_EQ(field_of(R"({"network": {"degre": 8}})"), "network.degre");
  EXPECT_EQ(field_of(R"({"netwrk": {}})"), "netwrk");
  EXPECT_EQ(field_of(R"({"consensus": {"step_timeout_s": -5}})"), "consensus.step_timeout_s");
  EXPECT_EQ(field_of(R"({"consensus": {"proposal_window_s": "long"}})"), "consensus.proposal_window_s");
  EXPECT_EQ(field_of(R"({"network": {"degree": -1}})"), "network.degree");
  EXPECT_EQ(field_of(R"({"attack": {"block_size_mb": []}})"), "attack.block_size_mb");
  EXPECT_EQ(field_of(R"({"attack": {"block_size_mb": 5.0}})"), "attack.block_size_mb");
  EXPECT_EQ(field_of(R"({"attack": {"trigger": "whenever"}})"), "attack.trigger");
  EXPECT_EQ(field_of(R"({"validation": {"ban_action": "shrug"}})"), "validation.ban_action");
  EXPECT_EQ(field_of(R"({"run": {"scale": "huge"}})"), "run.scale");
  EXPECT_EQ(field_of(R"({"run": {"duration_s": 0}})"), "run.duration_s");
  EXPECT_EQ(field_of("[1,2]"), "<document>");
  EXPECT_EQ(field_of("{not json"), "<document>");
  EXPECT_EQ(field_of("{}"), "<accepted>");
}

TEST(Scenario, ReferenceTablesComplete) {
  const auto& ref = reference_values();
  EXPECT_EQ(ref.size(), 40U);
  bool found = false;
  for (const auto& r : ref) {
    if (r.block_size_mb == 1.0 && r.n_malicious == 15 && r.keys_per_node == 70) {
      EXPECT_DOUBLE_EQ(r.round_time_s, 391.45);
      EXPECT_DOUBLE_EQ(r.pct_received, 10.66);
      EXPECT_DOUBLE_EQ(r.pct_validated, 10.55);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Scenario, EmptyRunGivesMarkerNotCrash) {
  auto cfg = load_scenario_config("no-attack");
  RunOptions o;
  o.duration_s = 50;  // shorter than one proposal window
  apply_overrides(cfg, o);
  cfg.desk_nodes = 12;
  auto res = run_cell(expand_grid(cfg)[0]);
  ASSERT_EQ(res.summaries.size(), 1U);
  EXPECT_TRUE(res.summaries[0].empty);
  EXPECT_NE(summary_csv_row(res.summaries[0]).find("NA"), std::string::npos);
}
