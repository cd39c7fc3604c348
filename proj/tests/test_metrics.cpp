#include <sstream>

#include <gtest/gtest.h>

#include "algosim/metrics.hpp"

using namespace algosim;

TEST(Metrics, SingleRoundWindowPlusOneStep) {
  MetricsCollector m{2};
  RoundRecord r;
  r.node = NodeId{0};
  r.round = 1;
  r.duration_s = 150 + 10;
  m.record_round(r);
  auto s = summarize(m, {NodeId{0}}, 150);
  EXPECT_FALSE(s.empty);
  EXPECT_DOUBLE_EQ(s.avg_round_time_s, 160.0);
  EXPECT_DOUBLE_EQ(s.window_share, 150.0 / 160.0);
  EXPECT_DOUBLE_EQ(s.rounds_completed, 1.0);
}

TEST(Metrics, WholeRunRatiosExcludeOwnMessages) {
  MetricsCollector m{3};
  // round 1: each node authors 2, round 2: node 1 authors 4
  for (std::uint32_t n = 0; n < 3; ++n) {
    m.note_honest_message(NodeId{n}, 1);
    m.note_honest_message(NodeId{n}, 1);
  }
  for (int i = 0; i < 4; ++i) m.note_honest_message(NodeId{1}, 2);
  // node 0 should see 4 + 4 = 8
  for (int i = 0; i < 6; ++i) m.record_message_fate(NodeId{0}, i < 3 ? 1 : 2, MessageFate::Received, true);
  for (int i = 0; i < 2; ++i) m.record_message_fate(NodeId{0}, 1, MessageFate::Validated, true);
  m.record_message_fate(NodeId{0}, 2, MessageFate::Validated, false);  // late, not counted
  auto t = m.message_totals(NodeId{0});
  EXPECT_EQ(t.legit_sent_to_node, 8U);
  EXPECT_EQ(t.legit_received_in_time, 6U);
  EXPECT_EQ(t.legit_validated_in_time, 2U);
  auto s = summarize(m, {NodeId{0}}, 150);
  EXPECT_TRUE(s.empty);  // no completed rounds
  EXPECT_DOUBLE_EQ(s.pct_received, 75.0);
  EXPECT_DOUBLE_EQ(s.pct_validated, 25.0);
}

TEST(Metrics, AveragesOverClassOnly) {
  MetricsCollector m{3};
  auto rec = [&](std::uint32_t n, std::int64_t round, double d, int to, bool empty) {
    RoundRecord r;
    r.node = NodeId{n};
    r.round = round;
    r.duration_s = d;
    r.step_timeouts = to;
    r.decided_empty = empty;
    m.record_round(r);
  };
  rec(0, 1, 390, 4, true);
  rec(0, 2, 390, 4, true);
  rec(1, 1, 180, 0, false);
  rec(1, 2, 182, 0, false);
  rec(1, 3, 181, 0, false);
  auto tgt = summarize(m, {NodeId{0}}, 150);
  auto hon = summarize(m, {NodeId{1}, NodeId{2}}, 150);
  EXPECT_DOUBLE_EQ(tgt.avg_round_time_s, 390);
  EXPECT_DOUBLE_EQ(tgt.mean_step_timeouts, 4);
  EXPECT_DOUBLE_EQ(tgt.empty_decision_share, 1);
  EXPECT_DOUBLE_EQ(hon.avg_round_time_s, 181);
  EXPECT_DOUBLE_EQ(hon.rounds_completed, 1.5);
  // timeout arithmetic: avg - window within one step timeout of 60 x timeouts
  EXPECT_LE(std::abs((tgt.avg_round_time_s - 150) - 60 * tgt.mean_step_timeouts), 60.0);
}

TEST(Metrics, CsvRowFormatting) {
  ScenarioSummary s;
  s.node_class = "targeted";
  s.block_size_mb = 1;
  s.n_malicious = 15;
  s.keys_per_node = 70;
  s.empty = false;
  s.avg_round_time_s = 391.449;
  s.pct_received = 10.655;
  s.pct_validated = 10.5;
  s.rounds_completed = 6;
  s.mean_step_timeouts = 4;
  EXPECT_EQ(summary_csv_row(s), "1.00,15,70,391.45,10.65,10.50,6.00,4.00,targeted");
  s.empty = true;
  s.rounds_completed = 0;
  EXPECT_EQ(summary_csv_row(s), "1.00,15,70,NA,10.65,10.50,0.00,NA,targeted");
  EXPECT_EQ(std::string{summary_csv_header()}.rfind("block_size_mb,n_malicious,keys_per_node,avg_round_time_s,"
                                                    "pct_received,pct_validated,rounds_completed,mean_step_timeouts",
                                                    0),
            0U);
}

TEST(Metrics, RoundRecordsCsv) {
  MetricsCollector m{2};
  m.note_honest_message(NodeId{1}, 1);
  m.record_message_fate(NodeId{0}, 1, MessageFate::Received, true);
  RoundRecord r;
  r.node = NodeId{0};
  r.round = 1;
  r.duration_s = 181.5;
  r.decided_step = 3;
  m.record_round(r);
  std::ostringstream out;
  write_round_records_csv(out, m.records());
  EXPECT_NE(out.str().find("\n0,1,0.000000,181.500000,0,3,0,1,1,0\n"), std::string::npos);
}
