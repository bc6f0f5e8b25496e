#include "comonet/router.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <set>
#include <stdexcept>

namespace comonet {

namespace {

bool contains(const AddressPath& p, CommunityAddress a) {
  return std::find(p.begin(), p.end(), a) != p.end();
}

bool duplicate_free(const AddressPath& p) {
  std::set<CommunityAddress> s(p.begin(), p.end());
  return s.size() == p.size();
}

}  // namespace

Router::Router(Engine& engine, Topology& topology, CommunityAddress self, RoutingConfig config,
               bool busy, RandomStream busy_rng)
    : engine_(engine),
      topo_(topology),
      self_(self),
      config_(config),
      busy_(busy),
      busy_rng_(busy_rng) {
  if (config_.miss_threshold < 1) throw ScenarioError("miss_threshold must be >= 1");
  if (config_.heartbeat_interval <= SimTime::zero()) {
    throw ScenarioError("heartbeat_interval_ms must be > 0");
  }
  if (config_.discovery_timeout <= SimTime::zero()) {
    throw ScenarioError("discovery_timeout_ms must be > 0");
  }
}

void Router::trace(std::string_view what) const {
  if (engine_.trace().enabled()) engine_.trace().line(engine_.now(), self_.str(), what);
}

void Router::send(CommunityAddress to, const Message& msg, bool forwarded) {
  if (busy_ && forwarded) {
    const auto hold = SimTime::micros(busy_rng_.uniform_int(0, 2 * config_.busy_forwarding_delay.us()));
    engine_.schedule_in(hold, [this, to, msg] { topo_.unicast(self_, to, msg); }, "busy-hold");
    return;
  }
  topo_.unicast(self_, to, msg);
}

void Router::flood(const Message& msg, bool forwarded) {
  if (busy_ && forwarded) {
    const auto hold = SimTime::micros(busy_rng_.uniform_int(0, 2 * config_.busy_forwarding_delay.us()));
    engine_.schedule_in(hold, [this, msg] { topo_.broadcast(self_, msg); }, "busy-hold");
    return;
  }
  topo_.broadcast(self_, msg);
}

void Router::purge_expired() {
  const SimTime now = engine_.now();
  std::erase_if(seen_, [now](const auto& kv) { return kv.second <= now; });
  std::erase_if(reverse_, [now](const auto& kv) { return kv.second.expires <= now; });
}

const RouteEntry* Router::route(const PathId& path) const {
  auto it = routes_.find(path);
  return it == routes_.end() ? nullptr : &it->second;
}

void Router::install(const RouteEntry& e) {
  auto it = routes_.find(e.path);
  // First reply through a node wins for a given path id.
  if (it != routes_.end() && !it->second.broken) return;
  routes_[e.path] = e;
  trace(fmt::format("route path={} next={} prev={} hops={}", describe(e.path),
                    e.next_hop ? e.next_hop->str() : "-", e.predecessor ? e.predecessor->str() : "-",
                    e.hop_count));
}

// ---------------------------------------------------------------------------
// Discovery

RequestId Router::initiate_discovery(CommunityAddress target) {
  if (target == self_) throw std::logic_error("cannot discover a path to self");
  if (pending_.contains(target)) {
    throw std::logic_error(fmt::format("discovery for {} already pending", target.str()));
  }
  purge_expired();
  const RequestId id{self_, next_request_seq_++};
  seen_[id] = engine_.now() + config_.seen_lifetime();
  PathRequest req{id, target, static_cast<std::uint8_t>(kMaxHopBudget), {self_}};
  const EventHandle timeout = engine_.schedule_in(
      config_.discovery_timeout,
      [this, target, id] {
        auto it = pending_.find(target);
        if (it == pending_.end() || it->second.id != id) return;
        pending_.erase(it);
        trace(fmt::format("discovery timeout target={} id={}", target.str(), id.local_seq));
        if (hooks_.discovery_done) hooks_.discovery_done(target, std::nullopt);
      },
      "discovery-timeout");
  pending_[target] = Pending{id, timeout};
  trace(fmt::format("discover target={} id={}", target.str(), id.local_seq));
  flood(req, false);
  return id;
}

const RouteEntry* Router::relay_candidate(const PathRequest& req) const {
  const SimTime now = engine_.now();
  const RouteEntry* best = nullptr;
  for (const auto& [id, e] : routes_) {
    if (id.target != req.target || e.broken || !e.next_hop || !e.carried_data) continue;
    if (now - e.last_data > config_.route_freshness()) continue;
    if (e.full_path.empty() || contains(e.full_path, req.id.origin)) continue;
    if (!best || e.last_data > best->last_data) best = &e;
  }
  return best;
}

RequestAction Router::handle_path_request(CommunityAddress from, const PathRequest& req) {
  purge_expired();
  if (contains(req.traversed, self_) || seen_.contains(req.id)) {
    trace(fmt::format("drop dup {}", describe(Message{req})));
    return RequestAction::kDrop;
  }
  const SimTime now = engine_.now();
  const PathId path{req.id.origin, req.target, req.id.local_seq};

  auto remember = [&] {
    seen_[req.id] = now + config_.seen_lifetime();
    reverse_[req.id] = Expiring{from, now + config_.seen_lifetime()};
  };

  if (req.target == self_) {
    remember();
    PathReply rep{req.id, self_, self_, req.traversed, false};
    rep.full_path.push_back(self_);
    RouteEntry e;
    e.path = path;
    e.predecessor = from;
    e.hop_count = 0;
    e.full_path = rep.full_path;
    e.last_refreshed = now;
    install(e);
    ++stats_.replies_sent;
    trace(fmt::format("reply {}", describe(Message{rep})));
    send(from, rep, false);
    return RequestAction::kReply;
  }

  if (const RouteEntry* known = relay_candidate(req)) {
    AddressPath spliced = req.traversed;
    auto self_at = std::find(known->full_path.begin(), known->full_path.end(), self_);
    spliced.insert(spliced.end(), self_at, known->full_path.end());
    if (duplicate_free(spliced) && spliced.size() <= kMaxPathNodes) {
      remember();
      RouteEntry e;
      e.path = path;
      e.next_hop = known->next_hop;
      e.predecessor = from;
      e.hop_count = known->hop_count;
      e.full_path = spliced;
      e.last_refreshed = now;
      install(e);
      PathReply rep{req.id, self_, req.target, std::move(spliced), true};
      ++stats_.relay_replies_sent;
      trace(fmt::format("relay-reply {}", describe(Message{rep})));
      send(from, rep, false);
      return RequestAction::kRelayReply;
    }
  }

  if (req.hop_budget > 0) {
    remember();
    PathRequest next = req;
    next.traversed.push_back(self_);
    next.hop_budget = static_cast<std::uint8_t>(req.hop_budget - 1);
    ++stats_.rebroadcasts[req.id];
    trace(fmt::format("rebroadcast {}", describe(Message{next})));
    flood(next, true);
    return RequestAction::kRebroadcast;
  }

  trace(fmt::format("drop exhausted {}", describe(Message{req})));
  return RequestAction::kDrop;
}

void Router::handle_path_reply(CommunityAddress from, const PathReply& rep) {
  const SimTime now = engine_.now();
  const PathId path{rep.id.origin, rep.target, rep.id.local_seq};
  auto self_at = std::find(rep.full_path.begin(), rep.full_path.end(), self_);
  if (self_at == rep.full_path.end() || !duplicate_free(rep.full_path) ||
      rep.full_path.size() > kMaxPathNodes) {
    trace(fmt::format("drop malformed {}", describe(Message{rep})));
    return;
  }
  const int hops_to_target = static_cast<int>(rep.full_path.end() - self_at) - 1;

  if (rep.id.origin == self_) {
    auto it = pending_.find(rep.target);
    if (it == pending_.end() || it->second.id != rep.id) {
      ++stats_.late_replies_dropped;
      trace(fmt::format("drop late {}", describe(Message{rep})));
      return;
    }
    engine_.cancel(it->second.timeout);
    pending_.erase(it);
    RouteEntry e;
    e.path = path;
    e.next_hop = from;
    e.hop_count = hops_to_target;
    e.full_path = rep.full_path;
    e.last_refreshed = now;
    install(e);
    trace(fmt::format("resolved {}", describe(Message{rep})));
    if (hooks_.discovery_done) hooks_.discovery_done(rep.target, rep);
    return;
  }

  purge_expired();
  auto rev = reverse_.find(rep.id);
  if (rev == reverse_.end()) {
    trace(fmt::format("drop no-reverse {}", describe(Message{rep})));
    return;
  }
  RouteEntry e;
  e.path = path;
  e.next_hop = from;
  e.predecessor = rev->second.via;
  e.hop_count = hops_to_target;
  e.full_path = rep.full_path;
  e.last_refreshed = now;
  install(e);
  send(rev->second.via, rep, true);
}

// ---------------------------------------------------------------------------
// Heartbeats and path loss

void Router::start_heartbeat(const PathId& path) {
  auto next = downstream_hop(path);
  if (!next) throw std::logic_error(fmt::format("no route for path {}", describe(path)));
  begin_monitor(path, *next, std::nullopt);
}

void Router::stop_heartbeat(const PathId& path) { end_monitor(path); }

void Router::begin_monitor(const PathId& path, CommunityAddress next_hop,
                           std::optional<CommunityAddress> upstream) {
  end_monitor(path);
  Monitor& m = monitors_[path];
  m.next_hop = next_hop;
  m.upstream = upstream;
  m.last_upstream = engine_.now();
  trace(fmt::format("monitor path={} next={}", describe(path), next_hop.str()));
  arm_deadline(path, m, engine_.now());
  monitor_tick(path);
}

void Router::arm_deadline(const PathId& path, Monitor& m, SimTime from) {
  engine_.cancel(m.deadline);
  m.deadline = engine_.schedule(
      from + config_.loss_timeout(), [this, path] { detect_path_loss(path); }, "hb-deadline");
}

void Router::monitor_tick(const PathId& path) {
  auto it = monitors_.find(path);
  if (it == monitors_.end()) return;
  Monitor& m = it->second;
  if (m.upstream && engine_.now() - m.last_upstream > config_.loss_timeout()) {
    trace(fmt::format("monitor retired path={}", describe(path)));
    end_monitor(path);
    return;
  }
  send(m.next_hop, Heartbeat{path, ++m.seq}, false);
  m.tick = engine_.schedule_in(config_.heartbeat_interval, [this, path] { monitor_tick(path); },
                               "hb-tick");
}

void Router::end_monitor(const PathId& path) {
  auto it = monitors_.find(path);
  if (it == monitors_.end()) return;
  engine_.cancel(it->second.tick);
  engine_.cancel(it->second.deadline);
  monitors_.erase(it);
}

void Router::handle_heartbeat(CommunityAddress from, const Heartbeat& hb) {
  send(from, HeartbeatAck{hb.path, hb.seq}, false);
  if (auto r = routes_.find(hb.path); r != routes_.end()) r->second.last_refreshed = engine_.now();
  if (hb.path.target == self_) return;
  auto it = monitors_.find(hb.path);
  if (it != monitors_.end()) {
    it->second.last_upstream = engine_.now();
    return;
  }
  if (auto r = routes_.find(hb.path); r != routes_.end() && r->second.broken) return;
  if (auto next = downstream_hop(hb.path)) begin_monitor(hb.path, *next, from);
}

void Router::handle_ack(CommunityAddress from, const HeartbeatAck& ack) {
  auto it = monitors_.find(ack.path);
  if (it == monitors_.end() || it->second.next_hop != from) return;
  ++stats_.acks_received[ack.path];
  if (auto r = routes_.find(ack.path); r != routes_.end()) r->second.last_refreshed = engine_.now();
  arm_deadline(ack.path, it->second, engine_.now());
}

void Router::detect_path_loss(const PathId& path) {
  auto mon = monitors_.find(path);
  if (mon == monitors_.end()) return;
  const CommunityAddress lost_hop = mon->second.next_hop;
  end_monitor(path);
  stats_.losses_detected.emplace_back(path, engine_.now());
  trace(fmt::format("path-loss path={} next={}", describe(path), lost_hop.str()));

  std::optional<CommunityAddress> predecessor;
  if (auto r = routes_.find(path); r != routes_.end()) {
    r->second.broken = true;
    predecessor = r->second.predecessor;
  }
  if (path.origin == self_) {
    if (hooks_.path_lost) hooks_.path_lost(path, self_);
    return;
  }
  if (predecessor) send(*predecessor, PathError{path, self_}, false);
  if (!pending_.contains(path.target)) initiate_discovery(path.target);
}

void Router::handle_path_error(CommunityAddress, const PathError& err) {
  end_monitor(err.path);
  std::optional<CommunityAddress> predecessor;
  if (auto r = routes_.find(err.path); r != routes_.end()) {
    r->second.broken = true;
    predecessor = r->second.predecessor;
  }
  trace(fmt::format("path-error path={} at={}", describe(err.path), err.broken_at.str()));
  if (err.path.origin == self_) {
    if (hooks_.path_lost) hooks_.path_lost(err.path, err.broken_at);
    return;
  }
  if (predecessor) send(*predecessor, err, true);
}

// ---------------------------------------------------------------------------
// Media

const RouteEntry* Router::fallback_toward_target(CommunityAddress target) const {
  const RouteEntry* best = nullptr;
  for (const auto& [id, e] : routes_) {
    if (id.target != target || e.broken || !e.next_hop) continue;
    if (!best || e.last_refreshed > best->last_refreshed) best = &e;
  }
  return best;
}

const RouteEntry* Router::fallback_toward_origin(CommunityAddress origin) const {
  const RouteEntry* best = nullptr;
  for (const auto& [id, e] : routes_) {
    if (id.origin != origin || !e.predecessor) continue;
    if (!best || e.last_refreshed > best->last_refreshed) best = &e;
  }
  return best;
}

std::optional<CommunityAddress> Router::downstream_hop(const PathId& path) const {
  if (auto it = routes_.find(path); it != routes_.end() && !it->second.broken && it->second.next_hop) {
    return it->second.next_hop;
  }
  if (const RouteEntry* f = fallback_toward_target(path.target)) return f->next_hop;
  return std::nullopt;
}

void Router::send_media(const MediaPacket& pkt) { route_media(std::nullopt, pkt); }

void Router::route_media(std::optional<CommunityAddress> from, MediaPacket pkt) {
  const SimTime now = engine_.now();
  const PathId path = pkt.path();
  auto own = routes_.find(path);

  if (pkt.destination() == self_) {
    if (own == routes_.end() && pkt.to_callee && from) {
      RouteEntry e;
      e.path = path;
      e.predecessor = from;
      e.hop_count = 0;
      e.last_refreshed = now;
      install(e);
    }
    if (hooks_.media_arrived) hooks_.media_arrived(pkt, from.value_or(self_));
    return;
  }

  RouteEntry* used = nullptr;
  std::optional<CommunityAddress> next;
  if (pkt.to_callee) {
    if (own != routes_.end() && !own->second.broken && own->second.next_hop) {
      used = &own->second;
      next = own->second.next_hop;
    } else if (const RouteEntry* f = fallback_toward_target(path.target)) {
      next = f->next_hop;
      used = &routes_.at(f->path);
      if (own == routes_.end() && from) {
        RouteEntry e;
        e.path = path;
        e.next_hop = next;
        e.predecessor = from;
        e.hop_count = f->hop_count;
        e.last_refreshed = now;
        install(e);
        used = &routes_.at(path);
      }
    }
  } else {
    if (own != routes_.end() && own->second.predecessor) {
      used = &own->second;
      next = own->second.predecessor;
    } else if (const RouteEntry* f = fallback_toward_origin(path.origin)) {
      next = f->predecessor;
      used = &routes_.at(f->path);
    }
  }

  if (!next) {
    ++stats_.routing_drops;
    trace(fmt::format("drop no-route {}", describe(Message{pkt})));
    if (hooks_.media_dropped) hooks_.media_dropped(pkt, DropReason::kNoRoute);
    return;
  }
  used->last_data = now;
  used->carried_data = true;
  const bool forwarded = from.has_value();
  if (forwarded) {
    ++stats_.forwarded[path];
    pkt.hops = static_cast<std::uint8_t>(pkt.hops + 1);
  }
  send(*next, pkt, forwarded);
}

// ---------------------------------------------------------------------------

void Router::receive(CommunityAddress from, const Message& msg) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PathRequest>) {
          handle_path_request(from, m);
        } else if constexpr (std::is_same_v<T, PathReply>) {
          handle_path_reply(from, m);
        } else if constexpr (std::is_same_v<T, Heartbeat>) {
          handle_heartbeat(from, m);
        } else if constexpr (std::is_same_v<T, HeartbeatAck>) {
          handle_ack(from, m);
        } else if constexpr (std::is_same_v<T, PathError>) {
          handle_path_error(from, m);
        } else {
          route_media(from, m);
        }
      },
      msg);
}

}  // namespace comonet
