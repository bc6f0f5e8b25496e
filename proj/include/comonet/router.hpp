#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "comonet/engine.hpp"
#include "comonet/messages.hpp"
#include "comonet/random.hpp"
#include "comonet/topology.hpp"

namespace comonet {

struct RoutingConfig {
  SimTime heartbeat_interval = SimTime::seconds(1);
  int miss_threshold = 3;
  SimTime discovery_timeout = SimTime::seconds(2);
  /// Mean extra forwarding delay at a busy relay. The actual delay is drawn
  /// uniformly from [0, 2 * mean].
  SimTime busy_forwarding_delay = SimTime::millis(1);

  /// No ack for this long means the next hop is gone.
  SimTime loss_timeout() const { return heartbeat_interval * miss_threshold; }
  /// A route that carried no data for this long is not offered to others.
  SimTime route_freshness() const { return heartbeat_interval * (2 * miss_threshold); }
  SimTime seen_lifetime() const { return discovery_timeout * 2; }
};

/// Per-path routing state held by every node on a discovered path.
struct RouteEntry {
  PathId path;                                 // destination = path.target
  std::optional<CommunityAddress> next_hop;    // toward path.target; empty at the target
  std::optional<CommunityAddress> predecessor; // toward path.origin; empty at the origin
  int hop_count = 0;                           // hops from this node to path.target
  AddressPath full_path;                       // as carried by the reply; empty if learned
  SimTime last_refreshed;
  SimTime last_data;
  bool carried_data = false;
  bool broken = false;

  CommunityAddress destination() const { return path.target; }
};

/// Outcome of processing one path request.
enum class RequestAction { kReply, kRelayReply, kRebroadcast, kDrop };

/// One node's instance of the path discovery / path switching protocol.
///
/// Discovery is an on-demand flood: the originator broadcasts a request with
/// a hop budget of 7; every other node either answers (it is the target, or
/// it already carries live traffic toward the target) or rebroadcasts once
/// with the budget decremented. Replies travel back hop by hop along the
/// reverse pointers left by the request, installing a RouteEntry for the new
/// path at every node they cross.
///
/// Active paths are watched hop by hop with heartbeats. A node whose next hop
/// stops acknowledging for miss_threshold intervals marks the path broken,
/// tells its predecessors with a PathError and starts a new discovery.
class Router {
 public:
  struct Hooks {
    /// A discovery this node started resolved; nullopt means timeout.
    std::function<void(CommunityAddress target, const std::optional<PathReply>&)> discovery_done;
    /// Path loss at (or reported to) the origin of `path`.
    std::function<void(const PathId& path, CommunityAddress broken_at)> path_lost;
    std::function<void(const MediaPacket&, CommunityAddress from)> media_arrived;
    std::function<void(const MediaPacket&, DropReason)> media_dropped;
  };

  struct Stats {
    std::map<RequestId, int> rebroadcasts;
    std::map<PathId, std::uint64_t> forwarded;
    std::map<PathId, std::uint64_t> acks_received;
    std::vector<std::pair<PathId, SimTime>> losses_detected;
    std::uint64_t routing_drops = 0;
    std::uint64_t replies_sent = 0;
    std::uint64_t relay_replies_sent = 0;
    std::uint64_t late_replies_dropped = 0;
  };

  Router(Engine& engine, Topology& topology, CommunityAddress self, RoutingConfig config,
         bool busy = false, RandomStream busy_rng = RandomStream(0));
  Router(const Router&) = delete;
  Router& operator=(const Router&) = delete;

  CommunityAddress self() const { return self_; }
  bool busy() const { return busy_; }
  const RoutingConfig& config() const { return config_; }
  void set_hooks(Hooks h) { hooks_ = std::move(h); }

  /// Broadcasts a fresh request for `target`. Throws std::logic_error if
  /// target is this node or a discovery for it is already pending.
  RequestId initiate_discovery(CommunityAddress target);
  bool discovery_pending(CommunityAddress target) const { return pending_.contains(target); }

  /// Entry point for every message the medium delivers to this node.
  void receive(CommunityAddress from, const Message& msg);

  RequestAction handle_path_request(CommunityAddress from, const PathRequest& req);
  void handle_path_reply(CommunityAddress from, const PathReply& rep);

  /// Origin side: begin / end heartbeat monitoring of an adopted path.
  void start_heartbeat(const PathId& path);
  void stop_heartbeat(const PathId& path);
  bool monitoring(const PathId& path) const { return monitors_.contains(path); }

  /// Sends a media packet originated by this node along its path.
  void send_media(const MediaPacket& pkt);

  const RouteEntry* route(const PathId& path) const;
  const std::map<PathId, RouteEntry>& routes() const { return routes_; }
  const Stats& stats() const { return stats_; }

 private:
  struct Pending {
    RequestId id;
    EventHandle timeout;
  };
  struct Expiring {
    CommunityAddress via;
    SimTime expires;
  };
  struct Monitor {
    CommunityAddress next_hop;
    std::optional<CommunityAddress> upstream;  // empty at the origin
    std::uint32_t seq = 0;
    SimTime last_upstream;
    EventHandle tick;
    EventHandle deadline;
  };

  void handle_heartbeat(CommunityAddress from, const Heartbeat& hb);
  void handle_ack(CommunityAddress from, const HeartbeatAck& ack);
  void handle_path_error(CommunityAddress from, const PathError& err);
  void route_media(std::optional<CommunityAddress> from, MediaPacket pkt);

  void begin_monitor(const PathId& path, CommunityAddress next_hop,
                     std::optional<CommunityAddress> upstream);
  void monitor_tick(const PathId& path);
  void arm_deadline(const PathId& path, Monitor& m, SimTime from);
  void end_monitor(const PathId& path);
  void detect_path_loss(const PathId& path);

  std::optional<CommunityAddress> downstream_hop(const PathId& path) const;
  const RouteEntry* fallback_toward_target(CommunityAddress target) const;
  const RouteEntry* fallback_toward_origin(CommunityAddress origin) const;
  const RouteEntry* relay_candidate(const PathRequest& req) const;
  void install(const RouteEntry& e);

  void send(CommunityAddress to, const Message& msg, bool forwarded);
  void flood(const Message& msg, bool forwarded);
  void purge_expired();
  void trace(std::string_view what) const;

  Engine& engine_;
  Topology& topo_;
  CommunityAddress self_;
  RoutingConfig config_;
  bool busy_;
  RandomStream busy_rng_;
  Hooks hooks_;

  std::uint32_t next_request_seq_ = 1;
  std::map<CommunityAddress, Pending> pending_;
  std::map<RequestId, SimTime> seen_;
  std::map<RequestId, Expiring> reverse_;
  std::map<PathId, RouteEntry> routes_;
  std::map<PathId, Monitor> monitors_;
  Stats stats_;
};

}  // namespace comonet
