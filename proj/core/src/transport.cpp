#include "algosim/transport.hpp"

#include <algorithm>
#include <cmath>

#include "algosim/errors.hpp"

namespace algosim {

void TransportConfig::validate() const {
  if (!(upload_mbps > 0)) throw ConfigError("network.upload_mbps", "must be > 0");
  if (!(download_mbps > 0)) throw ConfigError("network.download_mbps", "must be > 0");
}

Transport::Transport(std::uint32_t n_nodes, TransportConfig config)
    : config_{config}, up_bps_{config.upload_mbps * 1e6}, down_bps_{config.download_mbps * 1e6} {
  config_.validate();
  up_.resize(n_nodes);
  down_.resize(n_nodes);
}

void Transport::set_parallel(NodeId from, NodeId to, bool parallel) { links_[key(from, to)].parallel = parallel; }

double Transport::fair_rate(const Transfer& t) const {
  return std::min(up_bps_ / static_cast<double>(up_[t.from.value].size()),
                  down_bps_ / static_cast<double>(down_[t.to.value].size()));
}

void Transport::settle(Transfer& t, SimTime now) {
  if (now > t.last) {
    t.remaining_bits = std::max(0.0, t.remaining_bits - t.rate_bps * (now - t.last).seconds());
    t.last = now;
  }
}

void Transport::reschedule(std::uint32_t tid, EventQueue& q) {
  auto& t = transfers_[tid];
  t.rate_bps = fair_rate(t);
  auto ns = static_cast<std::int64_t>(std::ceil(t.remaining_bits / t.rate_bps * 1e9));
  t.due = t.last + SimTime::from_nanos(ns);
  ++t.version;
  q.push(t.due, EventKind::DeliveryComplete, tid, 0, t.version);
}

void Transport::refresh(NodeId n, EventQueue& q) {
  const auto now = q.now();
  auto touch = [&](std::uint32_t tid) {
    auto& t = transfers_[tid];
    double rate = fair_rate(t);
    if (rate == t.rate_bps) return;
    settle(t, now);
    reschedule(tid, q);
  };
  for (auto tid : up_[n.value]) touch(tid);
  for (auto tid : down_[n.value]) touch(tid);
}

std::uint32_t Transport::start(NodeId from, NodeId to, Pending p, EventQueue& q) {
  std::uint32_t tid;
  if (!free_.empty()) {
    tid = free_.back();
    free_.pop_back();
  } else {
    tid = static_cast<std::uint32_t>(transfers_.size());
    transfers_.emplace_back();
  }
  auto& t = transfers_[tid];
  t.from = from;
  t.to = to;
  t.msg = p;
  t.remaining_bits = static_cast<double>(p.bytes) * 8.0;
  t.rate_bps = 0;
  t.last = q.now();
  t.live = true;
  t.pos_up = static_cast<std::uint32_t>(up_[from.value].size());
  up_[from.value].push_back(tid);
  t.pos_down = static_cast<std::uint32_t>(down_[to.value].size());
  down_[to.value].push_back(tid);
  links_[key(from, to)].active.push_back(tid);
  // new transfer has rate 0 so refresh always schedules it
  refresh(from, q);
  refresh(to, q);
  return tid;
}

void Transport::detach(std::uint32_t tid) {
  auto& t = transfers_[tid];
  auto& ups = up_[t.from.value];
  transfers_[ups.back()].pos_up = t.pos_up;
  ups[t.pos_up] = ups.back();
  ups.pop_back();
  auto& downs = down_[t.to.value];
  transfers_[downs.back()].pos_down = t.pos_down;
  downs[t.pos_down] = downs.back();
  downs.pop_back();
  t.live = false;
  ++t.version;
  free_.push_back(tid);
}

void Transport::send(NodeId from, NodeId to, std::uint64_t payload, std::uint64_t bytes, EventQueue& q) {
  auto& l = links_[key(from, to)];
  if (l.dropped) return;
  Pending p{payload, bytes, q.now()};
  if (l.active.empty() && skip_ && skip_(from, to, payload)) {
    ++skipped_;
    return;
  }
  if (l.parallel || l.active.empty()) {
    start(from, to, p, q);
  } else {
    l.queue.push_back(p);
  }
}

std::optional<Delivery> Transport::complete(const SimEvent& e, EventQueue& q) {
  if (e.target >= transfers_.size()) return std::nullopt;
  auto& t = transfers_[e.target];
  if (!t.live || t.version != e.version) return std::nullopt;
  const auto now = q.now();
  Delivery d{t.from, t.to, t.msg.payload, t.msg.bytes, t.msg.sent_at, now};
  ++transmissions_;
  bytes_delivered_ += t.msg.bytes;

  auto& l = links_[key(t.from, t.to)];
  while (!l.parallel && !l.queue.empty() && skip_ && skip_(t.from, t.to, l.queue.front().payload)) {
    l.queue.pop_front();
    ++skipped_;
  }
  if (!l.parallel && !l.queue.empty()) {
    // next message inherits the slot; counts and rates are unchanged
    t.msg = l.queue.front();
    l.queue.pop_front();
    t.remaining_bits = static_cast<double>(t.msg.bytes) * 8.0;
    t.last = now;
    reschedule(e.target, q);
    return d;
  }
  auto it = std::find(l.active.begin(), l.active.end(), e.target);
  if (it != l.active.end()) l.active.erase(it);
  const auto from = t.from;
  const auto to = t.to;
  detach(e.target);
  refresh(from, q);
  refresh(to, q);
  return d;
}

std::size_t Transport::drop_link(NodeId a, NodeId b, EventQueue& q) {
  std::size_t dropped = 0;
  for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
    auto& l = links_[key(from, to)];
    l.dropped = true;
    dropped += l.queue.size() + l.active.size();
    l.queue.clear();
    for (auto tid : l.active) detach(tid);
    l.active.clear();
  }
  refresh(a, q);
  refresh(b, q);
  return dropped;
}

bool Transport::dropped(NodeId a, NodeId b) const {
  auto it = links_.find(key(a, b));
  return it != links_.end() && it->second.dropped;
}

double Transport::inbound_rate_bps(NodeId n) const {
  double sum = 0;
  for (auto tid : down_[n.value]) sum += transfers_[tid].rate_bps;
  return sum;
}

double Transport::outbound_rate_bps(NodeId n) const {
  double sum = 0;
  for (auto tid : up_[n.value]) sum += transfers_[tid].rate_bps;
  return sum;
}

std::size_t Transport::queued_on(NodeId from, NodeId to) const {
  auto it = links_.find(key(from, to));
  return it == links_.end() ? 0 : it->second.queue.size() + it->second.active.size();
}

}  // namespace algosim
