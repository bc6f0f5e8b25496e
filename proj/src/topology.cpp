#include "comonet/topology.hpp"

#include <cmath>
#include <fmt/format.h>

namespace comonet {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

NodeKinematics::NodeKinematics(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.empty()) throw ScenarioError("a node needs at least one waypoint");
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    if (waypoints_[i].at <= waypoints_[i - 1].at) {
      throw ScenarioError(fmt::format("waypoint times must be strictly increasing ({} s after {} s)",
                                      to_string(waypoints_[i].at),
                                      to_string(waypoints_[i - 1].at)));
    }
  }
}

Vec2 NodeKinematics::position_at(SimTime t) const {
  if (t <= waypoints_.front().at) return waypoints_.front().pos;
  if (t >= waypoints_.back().at) return waypoints_.back().pos;
  std::size_t hi = 1;
  while (waypoints_[hi].at < t) ++hi;
  const Waypoint& a = waypoints_[hi - 1];
  const Waypoint& b = waypoints_[hi];
  const double f = static_cast<double>((t - a.at).us()) / static_cast<double>((b.at - a.at).us());
  return Vec2{a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
}

std::string_view to_string(AdHocMode m) { return m == AdHocMode::kWlan ? "wlan" : "bluetooth"; }

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::kOutOfRange: return "out_of_range";
    case DropReason::kRadioLoss: return "radio_loss";
    case DropReason::kNoRoute: return "no_route";
    case DropReason::kGsmNotReady: return "gsm_not_ready";
    case DropReason::kGsmClosed: return "gsm_closed";
    case DropReason::kGsmLoss: return "gsm_loss";
  }
  return "?";
}

void LinkModel::validate() const {
  auto fraction = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!(adhoc.wlan_range_m > 0)) throw ScenarioError("wlan_range_m must be > 0");
  if (!(adhoc.bluetooth_range_m > 0)) throw ScenarioError("bluetooth_range_m must be > 0");
  if (adhoc.latency_mean < SimTime::zero()) throw ScenarioError("latency_ms must be >= 0");
  if (adhoc.latency_jitter < SimTime::zero()) throw ScenarioError("jitter_ms must be >= 0");
  if (adhoc.latency_jitter > adhoc.latency_mean) {
    throw ScenarioError("jitter_ms must not exceed latency_ms (latency would go negative)");
  }
  if (!fraction(adhoc.loss_probability)) throw ScenarioError("loss must be in [0, 1]");
  if (gsm.setup_time < SimTime::zero()) throw ScenarioError("gsm_setup_s must be >= 0");
  if (gsm.one_way_delay < SimTime::zero()) throw ScenarioError("gsm_delay_ms must be >= 0");
  if (!fraction(gsm.loss_probability)) throw ScenarioError("gsm_loss must be in [0, 1]");
}

Topology::Topology(Engine& engine, LinkModel model, RandomStream link_rng, RandomStream gsm_rng)
    : engine_(engine), model_(model), link_rng_(link_rng), gsm_rng_(gsm_rng) {
  model_.validate();
}

void Topology::add_node(CommunityAddress addr, NodeKinematics motion, bool gsm_coverage) {
  if (index_.contains(addr)) throw ScenarioError(fmt::format("node {} declared twice", addr.str()));
  index_.emplace(addr, NodeInfo{std::move(motion), gsm_coverage});
  order_.push_back(addr);
}

const Topology::NodeInfo& Topology::info(CommunityAddress a) const {
  auto it = index_.find(a);
  if (it == index_.end()) throw ScenarioError(fmt::format("unknown node {}", a.str()));
  return it->second;
}

Vec2 Topology::position_of(CommunityAddress node, SimTime t) const {
  return info(node).motion.position_at(t);
}

bool Topology::gsm_coverage(CommunityAddress node) const { return info(node).gsm_coverage; }

bool Topology::in_range(CommunityAddress a, CommunityAddress b, SimTime t) const {
  if (a == b) return false;
  return distance(position_of(a, t), position_of(b, t)) <= model_.radio_range();
}

std::vector<CommunityAddress> Topology::neighbors(CommunityAddress node, SimTime t) const {
  const Vec2 p = position_of(node, t);
  const double range = model_.radio_range();
  std::vector<CommunityAddress> out;
  for (const auto& other : order_) {
    if (other == node) continue;
    if (distance(p, index_.at(other).motion.position_at(t)) <= range) out.push_back(other);
  }
  return out;
}

std::vector<std::pair<CommunityAddress, CommunityAddress>> Topology::adjacency(SimTime t) const {
  std::vector<std::pair<CommunityAddress, CommunityAddress>> out;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    for (std::size_t j = i + 1; j < order_.size(); ++j) {
      if (in_range(order_[i], order_[j], t)) out.emplace_back(order_[i], order_[j]);
    }
  }
  return out;
}

void Topology::drop(CommunityAddress from, CommunityAddress to, const Message& m, DropReason r) {
  if (on_drop_) on_drop_(from, to, m, r);
}

void Topology::deliver_at(SimTime at, CommunityAddress to, CommunityAddress from, const Message& m) {
  engine_.schedule(
      at,
      [this, to, from, m] {
        if (deliver_) deliver_(to, from, m);
      },
      "deliver");
}

bool Topology::unicast(CommunityAddress src, CommunityAddress dst, const Message& msg) {
  const SimTime now = engine_.now();
  info(dst);
  if (!in_range(src, dst, now)) {
    drop(src, dst, msg, DropReason::kOutOfRange);
    return false;
  }
  // Both draws are always taken so one message's fate never shifts the
  // latency of the next.
  const bool lost = link_rng_.bernoulli(model_.adhoc.loss_probability);
  const auto& a = model_.adhoc;
  const SimTime latency = SimTime::micros(link_rng_.uniform_int(
      (a.latency_mean - a.latency_jitter).us(), (a.latency_mean + a.latency_jitter).us()));
  if (lost) {
    drop(src, dst, msg, DropReason::kRadioLoss);
    return false;
  }
  deliver_at(now + latency, dst, src, msg);
  return true;
}

std::size_t Topology::broadcast(CommunityAddress src, const Message& msg) {
  std::size_t n = 0;
  for (const auto& nb : neighbors(src, engine_.now())) {
    if (unicast(src, nb, msg)) ++n;
  }
  return n;
}

std::optional<GsmChannel> Topology::open_gsm(CommunityAddress a, CommunityAddress b) {
  if (!gsm_coverage(a) || !gsm_coverage(b)) return std::nullopt;
  const SimTime now = engine_.now();
  GsmChannel ch{next_channel_++, a, b, now, now + model_.gsm.setup_time};
  channels_.emplace(ch.id, OpenChannel{ch});
  return ch;
}

bool Topology::gsm_usable(std::uint32_t channel) const {
  auto it = channels_.find(channel);
  return it != channels_.end() && !it->second.closed && engine_.now() >= it->second.info.usable_at;
}

bool Topology::gsm_send(std::uint32_t channel, CommunityAddress from, const Message& msg) {
  auto it = channels_.find(channel);
  if (it == channels_.end()) throw ScenarioError(fmt::format("unknown GSM channel {}", channel));
  const GsmChannel& ch = it->second.info;
  const CommunityAddress to = from == ch.a ? ch.b : ch.a;
  if (it->second.closed) {
    drop(from, to, msg, DropReason::kGsmClosed);
    return false;
  }
  if (engine_.now() < ch.usable_at) {
    drop(from, to, msg, DropReason::kGsmNotReady);
    return false;
  }
  if (gsm_rng_.bernoulli(model_.gsm.loss_probability)) {
    drop(from, to, msg, DropReason::kGsmLoss);
    return false;
  }
  deliver_at(engine_.now() + model_.gsm.one_way_delay, to, from, msg);
  return true;
}

void Topology::close_gsm(std::uint32_t channel) {
  auto it = channels_.find(channel);
  if (it != channels_.end()) it->second.closed = true;
}

}  // namespace comonet
