#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "algosim/events.hpp"
#include "algosim/types.hpp"

namespace algosim {

struct TransportConfig {
  double upload_mbps = 30.0;
  double download_mbps = 30.0;

  void validate() const;
};

struct Delivery {
  NodeId from;
  NodeId to;
  std::uint64_t payload = 0;
  std::uint64_t bytes = 0;
  SimTime sent_at;
  SimTime at;
};

/// Fair-share fluid model. Each active transfer moves at
/// min(U / uploads(sender), D / downloads(receiver)); rates are recomputed
/// whenever either count changes. Zero latency.
///
/// A directed link is FIFO with one active transfer by default. A parallel
/// link starts every message as its own transfer at once.
class Transport {
 public:
  Transport(std::uint32_t n_nodes, TransportConfig config);

  void set_parallel(NodeId from, NodeId to, bool parallel);

  // Announce-then-fetch: a message is not transferred if this returns true
  // when it reaches the head of its link (the receiver already holds it).
  using SkipFilter = std::function<bool(NodeId from, NodeId to, std::uint64_t payload)>;
  void set_skip_filter(SkipFilter f) { skip_ = std::move(f); }

  void send(NodeId from, NodeId to, std::uint64_t payload, std::uint64_t bytes, EventQueue& q);

  /// Handles a DeliveryComplete event. Empty if the event was superseded.
  std::optional<Delivery> complete(const SimEvent& e, EventQueue& q);

  /// Cancels queued and in-flight traffic both ways between a and b and
  /// refuses further sends. Returns the number of messages dropped.
  std::size_t drop_link(NodeId a, NodeId b, EventQueue& q);
  bool dropped(NodeId a, NodeId b) const;

  double inbound_rate_bps(NodeId n) const;
  double outbound_rate_bps(NodeId n) const;
  std::size_t active_downloads(NodeId n) const { return down_[n.value].size(); }
  std::size_t active_uploads(NodeId n) const { return up_[n.value].size(); }
  std::size_t queued_on(NodeId from, NodeId to) const;

  std::uint64_t transmissions() const { return transmissions_; }
  std::uint64_t bytes_delivered() const { return bytes_delivered_; }
  std::uint64_t skipped() const { return skipped_; }

 private:
  struct Pending {
    std::uint64_t payload;
    std::uint64_t bytes;
    SimTime sent_at;
  };
  struct Link {
    std::deque<Pending> queue;
    std::vector<std::uint32_t> active;
    bool parallel = false;
    bool dropped = false;
  };
  struct Transfer {
    NodeId from, to;
    Pending msg{};
    double remaining_bits = 0;
    double rate_bps = 0;
    SimTime last;
    SimTime due;
    std::uint64_t version = 0;
    std::uint32_t pos_up = 0, pos_down = 0;
    bool live = false;
  };

  static std::uint64_t key(NodeId from, NodeId to) { return (std::uint64_t{from.value} << 32) | to.value; }
  std::uint32_t start(NodeId from, NodeId to, Pending p, EventQueue& q);
  void settle(Transfer& t, SimTime now);
  void reschedule(std::uint32_t tid, EventQueue& q);
  void refresh(NodeId n, EventQueue& q);
  void detach(std::uint32_t tid);
  double fair_rate(const Transfer& t) const;

  TransportConfig config_;
  double up_bps_, down_bps_;
  std::vector<std::vector<std::uint32_t>> up_, down_;
  std::unordered_map<std::uint64_t, Link> links_;
  std::vector<Transfer> transfers_;
  std::vector<std::uint32_t> free_;
  std::uint64_t transmissions_ = 0;
  std::uint64_t bytes_delivered_ = 0;
  std::uint64_t skipped_ = 0;
  SkipFilter skip_;
};

}  // namespace algosim
