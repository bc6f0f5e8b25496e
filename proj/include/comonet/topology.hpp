#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "comonet/address.hpp"
#include "comonet/engine.hpp"
#include "comonet/messages.hpp"
#include "comonet/random.hpp"

namespace comonet {

struct Vec2 {
  double x = 0;
  double y = 0;
  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

struct Waypoint {
  SimTime at;
  Vec2 pos;
};

/// Piecewise-linear trajectory. Before the first waypoint a node sits at the
/// first position; after the last one it parks at the last position.
class NodeKinematics {
 public:
  /// Throws ScenarioError if empty or if times are not strictly increasing.
  explicit NodeKinematics(std::vector<Waypoint> waypoints);
  static NodeKinematics stationary(Vec2 p) { return NodeKinematics({Waypoint{SimTime::zero(), p}}); }

  Vec2 position_at(SimTime t) const;
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }

 private:
  std::vector<Waypoint> waypoints_;
};

enum class AdHocMode { kWlan, kBluetooth };

std::string_view to_string(AdHocMode m);

struct AdHocLinkParams {
  double wlan_range_m = 100.0;
  double bluetooth_range_m = 10.0;
  SimTime latency_mean = SimTime::millis(5);
  SimTime latency_jitter = SimTime::millis(2);  // half-width of the uniform spread
  double loss_probability = 0.0;
};

struct GsmLinkParams {
  SimTime setup_time = SimTime::seconds(10);
  SimTime one_way_delay = SimTime::millis(110);
  double loss_probability = 0.0;
};

struct LinkModel {
  AdHocMode mode = AdHocMode::kWlan;
  AdHocLinkParams adhoc;
  GsmLinkParams gsm;

  double radio_range() const {
    return mode == AdHocMode::kWlan ? adhoc.wlan_range_m : adhoc.bluetooth_range_m;
  }
  /// Throws ScenarioError naming the offending field.
  void validate() const;
};

enum class DropReason { kOutOfRange, kRadioLoss, kNoRoute, kGsmNotReady, kGsmClosed, kGsmLoss };

std::string_view to_string(DropReason r);

/// Handle to an open GSM pipe between two nodes.
struct GsmChannel {
  std::uint32_t id = 0;
  CommunityAddress a;
  CommunityAddress b;
  SimTime requested_at;
  SimTime usable_at;
};

/// Node placement, mobility and the radio medium.
///
/// The ad hoc medium is a unit disk: two nodes hear each other iff their
/// distance at send time is within the active mode's range. A delivered
/// message arrives after a latency drawn uniformly from
/// [mean - jitter, mean + jitter]. Losses are silent to the sender; an
/// optional drop observer sees them for accounting.
class Topology {
 public:
  using DeliverFn = std::function<void(CommunityAddress to, CommunityAddress from, const Message&)>;
  using DropFn =
      std::function<void(CommunityAddress from, CommunityAddress to, const Message&, DropReason)>;

  Topology(Engine& engine, LinkModel model, RandomStream link_rng, RandomStream gsm_rng);

  void add_node(CommunityAddress addr, NodeKinematics motion, bool gsm_coverage = true);
  bool has_node(CommunityAddress addr) const { return index_.contains(addr); }
  const std::vector<CommunityAddress>& nodes() const { return order_; }
  const LinkModel& model() const { return model_; }

  void set_deliver(DeliverFn fn) { deliver_ = std::move(fn); }
  void set_drop_observer(DropFn fn) { on_drop_ = std::move(fn); }

  /// Throws ScenarioError for an undeclared node.
  Vec2 position_of(CommunityAddress node, SimTime t) const;
  bool gsm_coverage(CommunityAddress node) const;

  bool in_range(CommunityAddress a, CommunityAddress b, SimTime t) const;
  /// Nodes within radio range at t, in declaration order.
  std::vector<CommunityAddress> neighbors(CommunityAddress node, SimTime t) const;
  /// Unordered in-range pairs (first declared first) at t.
  std::vector<std::pair<CommunityAddress, CommunityAddress>> adjacency(SimTime t) const;

  /// Sends at the engine's current time. Returns true iff a delivery event
  /// was scheduled.
  bool unicast(CommunityAddress src, CommunityAddress dst, const Message& msg);
  /// One independent delivery attempt per current neighbor; returns the
  /// number of deliveries scheduled.
  std::size_t broadcast(CommunityAddress src, const Message& msg);

  /// nullopt when either endpoint has no cellular coverage.
  std::optional<GsmChannel> open_gsm(CommunityAddress a, CommunityAddress b);
  /// Sends over an open channel. Messages sent before usable_at or after
  /// close are dropped.
  bool gsm_send(std::uint32_t channel, CommunityAddress from, const Message& msg);
  void close_gsm(std::uint32_t channel);
  bool gsm_usable(std::uint32_t channel) const;

 private:
  struct NodeInfo {
    NodeKinematics motion;
    bool gsm_coverage;
  };
  struct OpenChannel {
    GsmChannel info;
    bool closed = false;
  };

  const NodeInfo& info(CommunityAddress a) const;
  void drop(CommunityAddress from, CommunityAddress to, const Message& m, DropReason r);
  void deliver_at(SimTime at, CommunityAddress to, CommunityAddress from, const Message& m);

  Engine& engine_;
  LinkModel model_;
  RandomStream link_rng_;
  RandomStream gsm_rng_;
  std::vector<CommunityAddress> order_;
  std::unordered_map<CommunityAddress, NodeInfo> index_;
  std::unordered_map<std::uint32_t, OpenChannel> channels_;
  std::uint32_t next_channel_ = 1;
  DeliverFn deliver_;
  DropFn on_drop_;
};

}  // namespace comonet
