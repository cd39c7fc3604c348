#pragma once
// Brute-force fair-share fluid solver for tiny transport scenarios, and a
// driver that replays the same scenario through algosim::Transport.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "algosim/events.hpp"
#include "algosim/transport.hpp"

namespace fluid {

struct Msg {
  std::uint32_t from, to;
  double bytes;
  double send_s;
};

struct Scenario {
  std::uint32_t nodes = 3;
  double up_mbps = 30, down_mbps = 30;
  std::vector<Msg> msgs;
  std::set<std::pair<std::uint32_t, std::uint32_t>> parallel;  // directed links
};

// Steps from breakpoint to breakpoint; between them every rate is constant.
inline std::vector<double> solve(const Scenario& s) {
  const std::size_t n = s.msgs.size();
  std::vector<double> left(n), done(n, -1.0);
  for (std::size_t i = 0; i < n; ++i) left[i] = s.msgs[i].bytes * 8.0;
  double t = 0;
  for (;;) {
    // who is moving right now
    std::vector<std::size_t> active;
    std::map<std::pair<std::uint32_t, std::uint32_t>, bool> link_busy;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& m = s.msgs[i];
      if (done[i] >= 0 || m.send_s > t + 1e-12) continue;
      auto link = std::make_pair(m.from, m.to);
      if (s.parallel.count(link)) {
        active.push_back(i);
      } else if (!link_busy[link]) {
        link_busy[link] = true;  // earliest sent, still unfinished
        active.push_back(i);
      }
    }
    std::vector<int> ups(s.nodes), downs(s.nodes);
    for (auto i : active) {
      ++ups[s.msgs[i].from];
      ++downs[s.msgs[i].to];
    }
    std::vector<double> rate(n, 0);
    double step = std::numeric_limits<double>::infinity();
    for (auto i : active) {
      rate[i] = std::min(s.up_mbps * 1e6 / ups[s.msgs[i].from], s.down_mbps * 1e6 / downs[s.msgs[i].to]);
      step = std::min(step, left[i] / rate[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] < 0 && s.msgs[i].send_s > t + 1e-12) step = std::min(step, s.msgs[i].send_s - t);
    }
    if (step == std::numeric_limits<double>::infinity()) break;
    t += step;
    for (auto i : active) {
      left[i] -= rate[i] * step;
      if (left[i] <= 1e-6) done[i] = t;
    }
  }
  return done;
}

// Same scenario through the simulator's transport. Sends in index order at equal times.
inline std::vector<double> replay(const Scenario& s) {
  using namespace algosim;
  TransportConfig cfg;
  cfg.upload_mbps = s.up_mbps;
  cfg.download_mbps = s.down_mbps;
  Transport tr{s.nodes, cfg};
  for (auto [a, b] : s.parallel) tr.set_parallel(NodeId{a}, NodeId{b}, true);
  EventQueue q;
  for (std::size_t i = 0; i < s.msgs.size(); ++i) {
    q.push(SimTime::from_seconds(s.msgs[i].send_s), EventKind::TimerExpired, 0, i);
  }
  std::vector<double> out(s.msgs.size(), -1.0);
  while (!q.empty()) {
    auto e = q.pop();
    if (e.kind == EventKind::TimerExpired) {
      const auto& m = s.msgs[e.payload];
      tr.send(NodeId{m.from}, NodeId{m.to}, e.payload, static_cast<std::uint64_t>(m.bytes), q);
    } else if (auto d = tr.complete(e, q)) {
      out[d->payload] = d->at.seconds();
    }
  }
  return out;
}

}  // namespace fluid
