// Shared helpers for the unit tests: a small hand-built network and a BFS
// oracle over the unit-disk graph.
#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "comonet/engine.hpp"
#include "comonet/random.hpp"
#include "comonet/router.hpp"
#include "comonet/topology.hpp"

namespace testkit {

using comonet::CommunityAddress;

inline CommunityAddress addr(int i) {
  return CommunityAddress{{static_cast<std::uint8_t>(128 + i / 100), 0, 0,
                           static_cast<std::uint8_t>(i % 100)}};
}

// Fixed 5 ms per link, no spread, no loss.
inline comonet::LinkModel exact_links() {
  comonet::LinkModel m;
  m.adhoc.latency_jitter = comonet::SimTime::zero();
  return m;
}

// Engine + topology + one router per node, all wired together.
struct Bench {
  comonet::Engine engine;
  std::unique_ptr<comonet::Topology> topo;
  std::map<CommunityAddress, std::unique_ptr<comonet::Router>> routers;
  std::vector<std::pair<CommunityAddress, std::optional<comonet::PathReply>>> resolved;
  struct Loss {
    CommunityAddress at;
    comonet::PathId path;
    CommunityAddress broken_at;
    comonet::SimTime when;
  };
  std::vector<Loss> lost;
  std::vector<std::pair<CommunityAddress, comonet::MediaPacket>> media;
  comonet::RoutingConfig config;

  explicit Bench(comonet::LinkModel model = {}, std::uint64_t seed = 1,
                 comonet::RoutingConfig cfg = {})
      : config(cfg) {
    topo = std::make_unique<comonet::Topology>(engine, model,
                                               comonet::RandomStream::derive(seed, "link"),
                                               comonet::RandomStream::derive(seed, "gsm"));
    topo->set_deliver([this](CommunityAddress to, CommunityAddress from, const comonet::Message& m) {
      routers.at(to)->receive(from, m);
    });
  }

  comonet::Router& add(int i, comonet::NodeKinematics motion, bool busy = false) {
    const auto a = addr(i);
    topo->add_node(a, std::move(motion));
    auto r = std::make_unique<comonet::Router>(engine, *topo, a, config, busy,
                                               comonet::RandomStream::derive(i, "busy"));
    r->set_hooks({
        [this, a](CommunityAddress, const std::optional<comonet::PathReply>& rep) {
          resolved.emplace_back(a, rep);
        },
        [this, a](const comonet::PathId& p, CommunityAddress b) {
          lost.push_back({a, p, b, engine.now()});
        },
        [this, a](const comonet::MediaPacket& m, CommunityAddress) { media.emplace_back(a, m); },
        {},
    });
    auto& ref = *r;
    routers.emplace(a, std::move(r));
    return ref;
  }

  comonet::Router& add(int i, comonet::Vec2 p, bool busy = false) {
    return add(i, comonet::NodeKinematics::stationary(p), busy);
  }

  comonet::Router& at(int i) { return *routers.at(addr(i)); }
};

// Hop distance from src to every node reachable in the unit-disk graph at t.
inline std::map<CommunityAddress, int> bfs(const comonet::Topology& topo, CommunityAddress src,
                                           comonet::SimTime t) {
  const auto& nodes = topo.nodes();
  const double range = topo.model().radio_range();
  std::map<CommunityAddress, int> dist{{src, 0}};
  std::deque<CommunityAddress> q{src};
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    const auto pu = topo.position_of(u, t);
    for (const auto& v : nodes) {
      if (v == u || dist.contains(v)) continue;
      const auto pv = topo.position_of(v, t);
      const double dx = pu.x - pv.x;
      const double dy = pu.y - pv.y;
      if (dx * dx + dy * dy <= range * range) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace testkit
