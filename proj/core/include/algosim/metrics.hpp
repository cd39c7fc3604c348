#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "algosim/time.hpp"
#include "algosim/types.hpp"

namespace algosim {

struct RoundRecord {
  NodeId node;
  std::int64_t round = 0;
  double started_s = 0;
  double duration_s = 0;
  std::int32_t step_timeouts = 0;
  std::int32_t decided_step = 0;
  bool decided_empty = false;
  std::uint64_t legit_sent_to_node = 0;
  std::uint64_t legit_received_in_time = 0;
  std::uint64_t legit_validated_in_time = 0;
};

enum class MessageFate : std::uint8_t { Received, Validated };

/// Per-instance collector. Messages are classified per (receiving node, message round).
class MetricsCollector {
 public:
  explicit MetricsCollector(std::uint32_t n_nodes) : per_node_(n_nodes), authored_(n_nodes) {}

  /// An honest node authored a message for `round`.
  void note_honest_message(NodeId author, std::int64_t round);
  /// First receipt or acceptance of an honest message at `node`. Late fates are ignored.
  void record_message_fate(NodeId node, std::int64_t round, MessageFate fate, bool in_time);
  void record_round(RoundRecord r);

  /// Completed rounds with message counts filled in (sent counts use every
  /// honest message authored by other nodes for that round).
  std::vector<RoundRecord> records() const;
  /// Message totals for a node over every round seen in the run, completed or not.
  RoundRecord message_totals(NodeId node) const;

 private:
  struct Counts {
    std::uint64_t received = 0;
    std::uint64_t validated = 0;
  };
  std::map<std::int64_t, std::uint64_t> honest_per_round_;
  std::vector<std::map<std::int64_t, Counts>> per_node_;
  std::vector<std::map<std::int64_t, std::uint64_t>> authored_;
  std::vector<RoundRecord> rounds_;
};

struct ScenarioSummary {
  std::string node_class;  // "targeted", "honest" or "all"
  double block_size_mb = 0;
  std::uint32_t n_malicious = 0;
  std::uint32_t keys_per_node = 0;
  bool empty = true;  // no completed rounds
  double avg_round_time_s = 0;
  double pct_received = 0;
  double pct_validated = 0;
  double rounds_completed = 0;  // mean per node
  double mean_step_timeouts = 0;
  double window_share = 0;  // proposal window / avg round time
  double empty_decision_share = 0;
  std::uint32_t nodes = 0;
};

/// Averages over `nodes`: round time and timeouts over their completed
/// rounds, message percentages as whole-run ratios.
ScenarioSummary summarize(const MetricsCollector& m, const std::vector<NodeId>& nodes, double proposal_window_s);

const char* summary_csv_header();
/// One CSV line (no newline), fixed two-decimal formatting.
std::string summary_csv_row(const ScenarioSummary& s);

void write_round_records_csv(std::ostream& out, const std::vector<RoundRecord>& records);

}  // namespace algosim
