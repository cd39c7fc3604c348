#include "algosim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace algosim {

void MetricsCollector::note_honest_message(NodeId author, std::int64_t round) {
  ++honest_per_round_[round];
  ++authored_[author.value][round];
}

void MetricsCollector::record_message_fate(NodeId node, std::int64_t round, MessageFate fate, bool in_time) {
  if (!in_time) return;
  auto& c = per_node_[node.value][round];
  if (fate == MessageFate::Received) {
    ++c.received;
  } else {
    ++c.validated;
  }
}

void MetricsCollector::record_round(RoundRecord r) { rounds_.push_back(r); }

std::vector<RoundRecord> MetricsCollector::records() const {
  std::vector<RoundRecord> out = rounds_;
  for (auto& r : out) {
    auto hp = honest_per_round_.find(r.round);
    std::uint64_t total = hp == honest_per_round_.end() ? 0 : hp->second;
    const auto& mine = authored_[r.node.value];
    auto a = mine.find(r.round);
    r.legit_sent_to_node = total - (a == mine.end() ? 0 : a->second);
    const auto& counts = per_node_[r.node.value];
    auto c = counts.find(r.round);
    if (c != counts.end()) {
      r.legit_received_in_time = c->second.received;
      r.legit_validated_in_time = c->second.validated;
    }
  }
  return out;
}

RoundRecord MetricsCollector::message_totals(NodeId node) const {
  RoundRecord t;
  t.node = node;
  const auto& mine = authored_[node.value];
  for (const auto& [round, total] : honest_per_round_) {
    auto a = mine.find(round);
    t.legit_sent_to_node += total - (a == mine.end() ? 0 : a->second);
  }
  for (const auto& [round, c] : per_node_[node.value]) {
    t.legit_received_in_time += c.received;
    t.legit_validated_in_time += c.validated;
  }
  return t;
}

ScenarioSummary summarize(const MetricsCollector& m, const std::vector<NodeId>& nodes, double proposal_window_s) {
  ScenarioSummary s;
  s.nodes = static_cast<std::uint32_t>(nodes.size());
  if (nodes.empty()) return s;
  std::set<std::uint32_t> members;
  for (auto n : nodes) members.insert(n.value);

  double dur = 0;
  double timeouts = 0;
  double empties = 0;
  std::size_t count = 0;
  for (const auto& r : m.records()) {
    if (!members.count(r.node.value)) continue;
    dur += r.duration_s;
    timeouts += r.step_timeouts;
    empties += r.decided_empty ? 1 : 0;
    ++count;
  }
  std::uint64_t sent = 0, received = 0, validated = 0;
  for (auto n : nodes) {
    auto t = m.message_totals(n);
    sent += t.legit_sent_to_node;
    received += t.legit_received_in_time;
    validated += t.legit_validated_in_time;
  }
  if (sent > 0) {
    s.pct_received = 100.0 * static_cast<double>(received) / static_cast<double>(sent);
    s.pct_validated = 100.0 * static_cast<double>(validated) / static_cast<double>(sent);
  }
  s.rounds_completed = static_cast<double>(count) / static_cast<double>(nodes.size());
  if (count == 0) return s;
  s.empty = false;
  s.avg_round_time_s = dur / static_cast<double>(count);
  s.mean_step_timeouts = timeouts / static_cast<double>(count);
  s.empty_decision_share = empties / static_cast<double>(count);
  s.window_share = proposal_window_s / s.avg_round_time_s;
  return s;
}

const char* summary_csv_header() {
  return "block_size_mb,n_malicious,keys_per_node,avg_round_time_s,pct_received,pct_validated,rounds_completed,"
         "mean_step_timeouts,node_class";
}

std::string summary_csv_row(const ScenarioSummary& s) {
  char buf[256];
  if (s.empty) {
    std::snprintf(buf, sizeof buf, "%.2f,%u,%u,NA,%.2f,%.2f,%.2f,NA,%s", s.block_size_mb, s.n_malicious,
                  s.keys_per_node, s.pct_received, s.pct_validated, s.rounds_completed, s.node_class.c_str());
  } else {
    std::snprintf(buf, sizeof buf, "%.2f,%u,%u,%.2f,%.2f,%.2f,%.2f,%.2f,%s", s.block_size_mb, s.n_malicious,
                  s.keys_per_node, s.avg_round_time_s, s.pct_received, s.pct_validated, s.rounds_completed,
                  s.mean_step_timeouts, s.node_class.c_str());
  }
  return buf;
}

void write_round_records_csv(std::ostream& out, const std::vector<RoundRecord>& records) {
  out << "node,round,started_s,duration_s,step_timeouts,decided_step,decided_empty,legit_sent_to_node,"
         "legit_received_in_time,legit_validated_in_time\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%u,%lld,%.6f,%.6f,%d,%d,%d,%llu,%llu,%llu\n", r.node.value,
                  static_cast<long long>(r.round), r.started_s, r.duration_s, r.step_timeouts, r.decided_step,
                  r.decided_empty ? 1 : 0, static_cast<unsigned long long>(r.legit_sent_to_node),
                  static_cast<unsigned long long>(r.legit_received_in_time),
                  static_cast<unsigned long long>(r.legit_validated_in_time));
    out << buf;
  }
}

}  // namespace algosim
