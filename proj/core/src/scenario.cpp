#include "algosim/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "algosim/errors.hpp"

namespace algosim {

using nlohmann::json;

namespace {

constexpr std::string_view kPaperGrid = R"({
  "network": {
    "desk_nodes": 64,
    "paper_nodes": 500,
    "degree": 8,
    "max_connections": 0,
    "upload_mbps": 30.0,
    "download_mbps": 30.0,
    "total_stake": 1000000
  },
  "consensus": {
    "proposal_window_s": 150.0,
    "step_timeout_s": 60.0,
    "committee_threshold_fraction": 0.685,
    "max_steps": 4,
    "max_block_size": 2000000,
    "proposer_votes": 26.0,
    "committee_votes": 2000.0,
    "lookback": 2,
    "block_header_bytes": 200,
    "tx_stub_bytes": 250,
    "credential_bytes": 200,
    "vote_bytes": 300,
    "proposal_overhead_bytes": 300
  },
  "validation": {
    "sig_verify_cost_ms": 0.5,
    "block_verify_cost_ms_per_mb": 2.0,
    "tx_verify_cost_ms": 0.05,
    "vote_verify_cost_ms_per_vote": 7.5,
    "pending_cap_bytes": 4096000000,
    "ban_threshold": 1,
    "ban_action": "discard"
  },
  "attack": {
    "block_size_mb": [0.5, 1.0, 1.5, 2.0],
    "n_malicious_nodes": [5, 10, 15],
    "keys_per_node": [25, 50, 70],
    "targets": [0],
    "trigger": "credential"
  },
  "metrics": {
    "include_baseline": true,
    "round_records": true
  },
  "run": {
    "duration_s": 2700.0,
    "seed": 1,
    "scale": "desk",
    "jobs": 0
  }
}
)";

constexpr std::string_view kNoAttack = R"({
  "network": {
    "desk_nodes": 64,
    "paper_nodes": 500,
    "degree": 8,
    "max_connections": 0,
    "upload_mbps": 30.0,
    "download_mbps": 30.0,
    "total_stake": 1000000
  },
  "consensus": {
    "proposal_window_s": 150.0,
    "step_timeout_s": 60.0,
    "committee_threshold_fraction": 0.685,
    "max_steps": 4,
    "max_block_size": 1000000,
    "proposer_votes": 26.0,
    "committee_votes": 2000.0,
    "lookback": 2,
    "block_header_bytes": 200,
    "tx_stub_bytes": 250,
    "credential_bytes": 200,
    "vote_bytes": 300,
    "proposal_overhead_bytes": 300
  },
  "validation": {
    "sig_verify_cost_ms": 0.5,
    "block_verify_cost_ms_per_mb": 2.0,
    "tx_verify_cost_ms": 0.05,
    "vote_verify_cost_ms_per_vote": 7.5,
    "pending_cap_bytes": 4096000000,
    "ban_threshold": 1,
    "ban_action": "discard"
  },
  "attack": {
    "block_size_mb": 1.0,
    "n_malicious_nodes": 0,
    "keys_per_node": 0,
    "targets": [],
    "trigger": "credential"
  },
  "metrics": {
    "include_baseline": false,
    "round_records": true
  },
  "run": {
    "duration_s": 2700.0,
    "seed": 1,
    "scale": "desk",
    "jobs": 0
  }
}
)";

template <class T>
T convert(const json& v, const std::string& field) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(field, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(field, "expected a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(field, "expected a number");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(field, "expected a non-negative integer");
      }
    } else {
      if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

// Reads one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_{name} {
    if (!root.contains(name)) return;
    obj_ = &root.at(name);
    if (!obj_->is_object()) throw ConfigError(name, "must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    if (obj_ == nullptr || !obj_->contains(key)) return;
    used_.insert(key);
    out = convert<T>(obj_->at(key), name_ + "." + key);
  }

  // number or array of numbers
  template <class T>
  void get_list(const char* key, std::vector<T>& out) {
    if (obj_ == nullptr || !obj_->contains(key)) return;
    used_.insert(key);
    const auto& v = obj_->at(key);
    const auto field = name_ + "." + key;
    out.clear();
    if (!v.is_array()) {
      out.push_back(convert<T>(v, field));
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<T>(v[i], field + "[" + std::to_string(i) + "]"));
  }

  void finish() const {
    if (obj_ == nullptr) return;
    for (const auto& [k, _] : obj_->items()) {
      if (!used_.count(k)) throw ConfigError(name_ + "." + k, "unknown key");
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> used_;
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string cell_label(double bs, std::uint32_t n, std::uint32_t k) {
  char buf[64];
  if (n == 0 || k == 0) {
    std::snprintf(buf, sizeof buf, "bs%.2f_baseline", bs);
  } else {
    std::snprintf(buf, sizeof buf, "bs%.2f_m%u_k%u", bs, n, k);
  }
  return buf;
}

}  // namespace

Scale parse_scale(std::string_view s) {
  if (s == "desk") return Scale::Desk;
  if (s == "paper") return Scale::Paper;
  throw ConfigError("run.scale", "expected desk or paper");
}

const char* to_string(Scale s) { return s == Scale::Desk ? "desk" : "paper"; }

std::string_view preset_text(std::string_view name) {
  if (name == "paper-grid") return kPaperGrid;
  if (name == "no-attack") return kNoAttack;
  return {};
}

ScenarioConfig parse_scenario_config(std::string_view json_text, std::string name) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "top level must be an object");
  static const std::set<std::string> sections{"network", "consensus", "validation", "attack", "metrics", "run"};
  for (const auto& [k, _] : root.items()) {
    if (!sections.count(k)) throw ConfigError(k, "unknown section");
  }

  ScenarioConfig cfg;
  cfg.name = std::move(name);
  auto& sim = cfg.base;

  Section net{root, "network"};
  net.get("desk_nodes", cfg.desk_nodes);
  net.get("paper_nodes", cfg.paper_nodes);
  net.get("degree", sim.network.degree);
  net.get("max_connections", sim.network.max_connections);
  net.get("upload_mbps", sim.network.bandwidth.upload_mbps);
  net.get("download_mbps", sim.network.bandwidth.download_mbps);
  net.get("total_stake", sim.network.total_stake);
  net.finish();

  Section con{root, "consensus"};
  con.get("proposal_window_s", sim.consensus.proposal_window_s);
  con.get("step_timeout_s", sim.consensus.step_timeout_s);
  con.get("committee_threshold_fraction", sim.consensus.committee_threshold_fraction);
  con.get("max_steps", sim.consensus.max_steps);
  con.get("max_block_size", sim.consensus.max_block_size);
  con.get("proposer_votes", sim.sortition.proposer_votes);
  con.get("committee_votes", sim.sortition.committee_votes);
  con.get("lookback", sim.sortition.lookback);
  con.get("block_header_bytes", sim.sizes.block_header_bytes);
  con.get("tx_stub_bytes", sim.sizes.tx_stub_bytes);
  con.get("credential_bytes", sim.sizes.credential_bytes);
  con.get("vote_bytes", sim.sizes.vote_bytes);
  con.get("proposal_overhead_bytes", sim.sizes.proposal_overhead_bytes);
  con.finish();

  Section val{root, "validation"};
  val.get("sig_verify_cost_ms", sim.validation.sig_verify_cost_ms);
  val.get("block_verify_cost_ms_per_mb", sim.validation.block_verify_cost_ms_per_mb);
  val.get("tx_verify_cost_ms", sim.validation.tx_verify_cost_ms);
  val.get("vote_verify_cost_ms_per_vote", sim.validation.vote_verify_cost_ms_per_vote);
  val.get("pending_cap_bytes", sim.validation.pending_cap_bytes);
  val.get("ban_threshold", sim.validation.ban_threshold);
  std::string ban_action = "discard";
  val.get("ban_action", ban_action);
  if (ban_action == "discard") {
    sim.validation.ban_action = BanAction::Discard;
  } else if (ban_action == "disconnect") {
    sim.validation.ban_action = BanAction::Disconnect;
  } else {
    throw ConfigError("validation.ban_action", "expected discard or disconnect");
  }
  val.finish();

  Section atk{root, "attack"};
  atk.get_list("block_size_mb", cfg.block_sizes_mb);
  atk.get_list("n_malicious_nodes", cfg.n_malicious);
  atk.get_list("keys_per_node", cfg.keys_per_node);
  std::vector<std::uint32_t> targets;
  atk.get_list("targets", targets);
  sim.attack.targets.clear();
  for (auto t : targets) sim.attack.targets.push_back(NodeId{t});
  std::string trigger = "credential";
  atk.get("trigger", trigger);
  if (trigger == "credential") {
    sim.attack.trigger = AttackTrigger::OnCredential;
  } else if (trigger == "proposal") {
    sim.attack.trigger = AttackTrigger::OnBlockProposal;
  } else {
    throw ConfigError("attack.trigger", "expected credential or proposal");
  }
  atk.finish();

  Section met{root, "metrics"};
  met.get("include_baseline", cfg.include_baseline);
  met.get("round_records", cfg.write_round_records);
  met.finish();

  Section run{root, "run"};
  run.get("duration_s", sim.duration_s);
  run.get("seed", sim.seed);
  std::string scale = "desk";
  run.get("scale", scale);
  cfg.scale = parse_scale(scale);
  run.get("jobs", cfg.jobs);
  run.finish();

  if (cfg.block_sizes_mb.empty()) throw ConfigError("attack.block_size_mb", "grid axis is empty");
  if (cfg.n_malicious.empty()) throw ConfigError("attack.n_malicious_nodes", "grid axis is empty");
  if (cfg.keys_per_node.empty()) throw ConfigError("attack.keys_per_node", "grid axis is empty");
  for (double bs : cfg.block_sizes_mb) {
    if (!(bs > 0)) throw ConfigError("attack.block_size_mb", "must be > 0");
    if (bs * 1e6 > static_cast<double>(sim.consensus.max_block_size) + 0.5) {
      throw ConfigError("attack.block_size_mb", "exceeds consensus.max_block_size");
    }
  }
  if (cfg.desk_nodes < 2) throw ConfigError("network.desk_nodes", "must be >= 2");
  if (cfg.paper_nodes < 2) throw ConfigError("network.paper_nodes", "must be >= 2");
  // every cell must validate on its own
  for (const auto& cell : expand_grid(cfg)) cell.sim.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path_or_preset) {
  std::ifstream in{path_or_preset};
  if (in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_config(ss.str(), std::filesystem::path{path_or_preset}.stem().string());
  }
  auto preset = preset_text(path_or_preset);
  if (preset.empty()) throw MissingConfig(path_or_preset);
  return parse_scenario_config(preset, path_or_preset);
}

void apply_overrides(ScenarioConfig& cfg, const RunOptions& opts) {
  if (opts.seed) cfg.base.seed = *opts.seed;
  if (opts.jobs) cfg.jobs = *opts.jobs;
  if (opts.scale) cfg.scale = *opts.scale;
  if (opts.duration_s) {
    if (!(*opts.duration_s > 0)) throw ConfigError("run.duration_s", "must be > 0");
    cfg.base.duration_s = *opts.duration_s;
  }
}

std::vector<Cell> expand_grid(const ScenarioConfig& cfg) {
  std::vector<Cell> cells;
  auto make = [&](double bs, std::uint32_t n, std::uint32_t k) {
    Cell c;
    c.block_size_mb = bs;
    c.label = cell_label(bs, n, k);
    c.sim = cfg.base;
    c.sim.network.n_honest = cfg.scale == Scale::Desk ? cfg.desk_nodes : cfg.paper_nodes;
    c.sim.block_size = static_cast<std::uint64_t>(std::llround(bs * 1e6));
    c.sim.attack.payload_block_size = c.sim.block_size;
    if (n > 0 && k > 0) {
      c.n_malicious = n;
      c.keys_per_node = k;
    }
    c.sim.attack.n_malicious_nodes = c.n_malicious;
    c.sim.attack.keys_per_node = c.keys_per_node;
    return c;
  };
  for (double bs : cfg.block_sizes_mb) {
    bool baseline = false;
    if (cfg.include_baseline) {
      cells.push_back(make(bs, 0, 0));
      baseline = true;
    }
    for (auto n : cfg.n_malicious) {
      for (auto k : cfg.keys_per_node) {
        if (n == 0 || k == 0 || cfg.base.attack.targets.empty()) {
          if (baseline) continue;
          baseline = true;
          cells.push_back(make(bs, 0, 0));
          continue;
        }
        cells.push_back(make(bs, n, k));
      }
    }
  }
  return cells;
}

CellResult run_cell(const Cell& cell) {
  Simulation sim{cell.sim};
  sim.run();
  CellResult r;
  r.cell = cell;
  const double window = cell.sim.consensus.proposal_window_s;
  auto fill = [&](ScenarioSummary s, const char* cls) {
    s.node_class = cls;
    s.block_size_mb = cell.block_size_mb;
    s.n_malicious = cell.n_malicious;
    s.keys_per_node = cell.keys_per_node;
    return s;
  };
  if (cell.attacked()) {
    r.summaries.push_back(fill(summarize(sim.metrics(), sim.targeted_nodes(), window), "targeted"));
    r.summaries.push_back(fill(summarize(sim.metrics(), sim.untargeted_honest_nodes(), window), "honest"));
  } else {
    r.summaries.push_back(fill(summarize(sim.metrics(), sim.untargeted_honest_nodes(), window), "all"));
  }
  r.records = sim.metrics().records();
  r.stats = sim.stats();
  r.honest_forks = sim.fork_count(sim.untargeted_honest_nodes());
  if (sim.attacker()) {
    for (const auto& l : sim.attacker()->launches()) r.attack_bytes += l.bytes;
    r.launches = sim.attacker()->launches();
  }
  r.edges = sim.edge_count();
  return r;
}

std::vector<CellResult> run_grid(const ScenarioConfig& cfg, std::ostream* progress) {
  auto cells = expand_grid(cfg);
  std::vector<CellResult> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  unsigned jobs = cfg.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.jobs;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto t0 = std::chrono::steady_clock::now();
      try {
        results[i] = run_cell(cells[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      if (progress != nullptr) {
        std::lock_guard lock{log_mu};
        auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *progress << "[" << (i + 1) << "/" << cells.size() << "] " << cells[i].label << " " << fmt2(wall)
                  << " s wall\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

const std::vector<ReferenceCell>& reference_values() {
  static const std::vector<ReferenceCell> table = [] {
    struct Row {
      double bs;
      std::uint32_t k;
      double t[3];
      double rv[6];
    };
    const Row rows[] = {
        {0.5, 25, {178.65, 180.55, 182.36}, {96.98, 91.61, 97.26, 92.49, 97.08, 90.16}},
        {0.5, 50, {180.73, 181.36, 181.72}, {97.37, 92.87, 96.07, 90.90, 94.96, 90.43}},
        {0.5, 70, {178.98, 180.45, 237.27}, {97.85, 91.25, 96.04, 90.21, 75.03, 64.99}},
        {1.0, 25, {182.21, 182.87, 183.24}, {97.70, 91.02, 97.98, 92.41, 92.46, 87.77}},
        {1.0, 50, {182.49, 232.15, 391.16}, {96.81, 89.75, 80.52, 72.72, 45.47, 44.06}},
        {1.0, 70, {181.69, 391.12, 391.45}, {94.24, 88.41, 42.31, 41.46, 10.66, 10.55}},
        {1.5, 25, {180.16, 180.97, 241.52}, {99.32, 94.85, 93.62, 89.97, 65.62, 63.32}},
        {1.5, 50, {181.22, 391.58, 391.66}, {93.25, 86.65, 44.63, 43.10, 8.75, 8.02}},
        {1.5, 70, {235.76, 391.28, 391.54}, {73.57, 67.28, 25.93, 24.32, 6.79, 5.82}},
        {2.0, 25, {178.97, 226.63, 391.31}, {97.83, 92.01, 80.03, 73.21, 42.96, 41.59}},
        {2.0, 50, {226.59, 390.88, 391.57}, {79.99, 75.12, 26.66, 25.21, 1.05, 1.00}},
        {2.0, 70, {391.39, 391.83, 391.93}, {55.37, 49.71, 4.96, 4.83, 0.95, 0.91}},
    };
    std::vector<ReferenceCell> out;
    for (const auto& r : rows) {
      for (int i = 0; i < 3; ++i) {
        out.push_back({r.bs, static_cast<std::uint32_t>(5 * (i + 1)), r.k, r.t[i], r.rv[2 * i], r.rv[2 * i + 1]});
      }
    }
    out.push_back({0.5, 0, 0, 181.42, 97.51, 90.53});
    out.push_back({1.0, 0, 0, 181.16, 96.32, 89.70});
    out.push_back({1.5, 0, 0, 181.54, 97.43, 90.77});
    out.push_back({2.0, 0, 0, 182.31, 96.80, 90.09});
    return out;
  }();
  return table;
}

std::string summary_table(const std::vector<CellResult>& results) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-22s %-9s %9s %8s %8s %7s %9s %7s %7s\n", "cell", "class", "round_s", "recv%",
                "valid%", "rounds", "timeouts", "window", "empty");
  out << buf;
  for (const auto& r : results) {
    for (const auto& s : r.summaries) {
      if (s.empty) {
        std::snprintf(buf, sizeof buf, "%-22s %-9s %9s %8.2f %8.2f %7.2f %9s %7s %7s\n", r.cell.label.c_str(),
                      s.node_class.c_str(), "empty", s.pct_received, s.pct_validated, s.rounds_completed, "-", "-",
                      "-");
      } else {
        std::snprintf(buf, sizeof buf, "%-22s %-9s %9.2f %8.2f %8.2f %7.2f %9.2f %7.3f %7.2f\n",
                      r.cell.label.c_str(), s.node_class.c_str(), s.avg_round_time_s, s.pct_received,
                      s.pct_validated, s.rounds_completed, s.mean_step_timeouts, s.window_share,
                      s.empty_decision_share);
      }
      out << buf;
    }
  }
  return out.str();
}

std::string compare_table(const std::vector<CellResult>& results) {
  std::ostringstream out;
  char buf[256];
  out << "reference comparison (reference numbers come from 500-node runs; deltas are informative only)\n";
  std::snprintf(buf, sizeof buf, "%-22s %9s %9s %8s | %7s %7s | %7s %7s\n", "cell", "round_s", "ref", "delta",
                "recv%", "ref", "valid%", "ref");
  out << buf;
  for (const auto& r : results) {
    const ScenarioSummary& s = r.summaries.front();  // targeted, or all for baselines
    const ReferenceCell* ref = nullptr;
    for (const auto& c : reference_values()) {
      if (std::abs(c.block_size_mb - r.cell.block_size_mb) < 1e-9 && c.n_malicious == r.cell.n_malicious &&
          c.keys_per_node == r.cell.keys_per_node) {
        ref = &c;
      }
    }
    if (ref == nullptr) {
      std::snprintf(buf, sizeof buf, "%-22s %9.2f %9s %8s | %7.2f %7s | %7.2f %7s\n", r.cell.label.c_str(),
                    s.avg_round_time_s, "-", "-", s.pct_received, "-", s.pct_validated, "-");
    } else {
      std::snprintf(buf, sizeof buf, "%-22s %9.2f %9.2f %+8.2f | %7.2f %7.2f | %7.2f %7.2f\n", r.cell.label.c_str(),
                    s.avg_round_time_s, ref->round_time_s, s.avg_round_time_s - ref->round_time_s, s.pct_received,
                    ref->pct_received, s.pct_validated, ref->pct_validated);
    }
    out << buf;
  }
  return out.str();
}

void write_outputs(const std::filesystem::path& out_dir, const ScenarioConfig& cfg,
                   const std::vector<CellResult>& results, bool compare) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "cells");
  if (cfg.write_round_records) {
    for (const auto& r : results) {
      std::ofstream f{out_dir / "cells" / (r.cell.label + ".csv")};
      write_round_records_csv(f, r.records);
    }
  }
  {
    std::ofstream f{out_dir / "summary.csv"};
    f << summary_csv_header() << "\n";
    for (const auto& r : results) {
      for (const auto& s : r.summaries) f << summary_csv_row(s) << "\n";
    }
  }
  std::ofstream f{out_dir / "summary.txt"};
  f << "scenario " << cfg.name << ", scale " << to_string(cfg.scale) << ", seed " << cfg.base.seed << ", "
    << fmt2(cfg.base.duration_s) << " s simulated\n\n";
  f << summary_table(results);
  if (compare) f << "\n" << compare_table(results);
}

}  // namespace algosim
