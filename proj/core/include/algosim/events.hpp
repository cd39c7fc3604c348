#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "algosim/errors.hpp"
#include "algosim/time.hpp"

namespace algosim {

enum class EventKind : std::uint8_t { DeliveryComplete, TimerExpired, AttackTrigger, ValidationDone };

struct SimEvent {
  SimTime at;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::TimerExpired;
  std::uint32_t target = 0;    // node or transfer slot
  std::uint64_t payload = 0;
  std::uint64_t version = 0;   // stale events are skipped by their handler
};

/// Min-heap on (at, seq). Scheduling into the past is a simulator bug.
class EventQueue {
 public:
  void push(SimTime at, EventKind kind, std::uint32_t target, std::uint64_t payload = 0, std::uint64_t version = 0) {
    if (at < now_) throw InvariantViolation("event-causality", "event scheduled before the current clock");
    heap_.push(SimEvent{at, next_seq_++, kind, target, payload, version});
  }

  bool empty() const { return heap_.empty(); }
  const SimEvent& top() const { return heap_.top(); }

  SimEvent pop() {
    SimEvent e = heap_.top();
    heap_.pop();
    now_ = e.at;
    return e;
  }

  SimTime now() const { return now_; }
  std::uint64_t scheduled() const { return next_seq_; }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  SimTime now_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace algosim
