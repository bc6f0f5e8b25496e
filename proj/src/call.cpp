#include "comonet/call.hpp"

#include <fmt/format.h>
#include <stdexcept>

namespace comonet {

std::string_view to_string(CallPhase p) {
  switch (p) {
    case CallPhase::kIdle: return "IDLE";
    case CallPhase::kDiscovering: return "DISCOVERING";
    case CallPhase::kActiveCommunity: return "ACTIVE_COMMUNITY";
    case CallPhase::kActiveGsm: return "ACTIVE_GSM";
    case CallPhase::kSwitching: return "SWITCHING";
  }
  return "?";
}

bool legal_transition(CallPhase from, CallPhase to) {
  using P = CallPhase;
  if (to == P::kIdle) return true;
  switch (from) {
    case P::kIdle: return to == P::kDiscovering;
    case P::kDiscovering: return to == P::kActiveCommunity || to == P::kActiveGsm;
    case P::kActiveCommunity:
    case P::kActiveGsm: return to == P::kSwitching;
    case P::kSwitching: return to == P::kActiveCommunity || to == P::kActiveGsm;
  }
  return false;
}

void SessionConfig::validate() const {
  if (frame_interval <= SimTime::zero()) throw ScenarioError("frame_interval_ms must be > 0");
  if (playout_depth <= SimTime::zero()) throw ScenarioError("playout_depth_ms must be > 0");
  if (monitor_interval <= SimTime::zero()) throw ScenarioError("monitor_interval_ms must be > 0");
  if (payload_size == 0) throw ScenarioError("payload_bytes must be > 0");
}

Call::Call(std::string label, Engine& engine, Topology& topology, Router& caller, Router& callee,
           SessionConfig config)
    : label_(std::move(label)),
      engine_(engine),
      topo_(topology),
      caller_(caller),
      callee_(callee),
      config_(config),
      at_callee_(config.playout_depth),
      at_caller_(config.playout_depth) {
  config_.validate();
  if (caller.self() == callee.self()) throw ScenarioError("a call needs two distinct nodes");
}

void Call::trace(std::string_view what) const {
  if (engine_.trace().enabled()) engine_.trace().line(engine_.now(), "call:" + label_, what);
}

std::optional<SimTime> Call::setup_time() const {
  if (!established_at_) return std::nullopt;
  return *established_at_ - dialed_at_;
}

void Call::schedule(SimTime dial_at, SimTime hangup_at) {
  if (hangup_at <= dial_at) throw ScenarioError("hangup must come after dial");
  dialed_at_ = dial_at;
  hangup_at_ = hangup_at;
  engine_.schedule(dial_at, [this] { dial(); }, "dial");
  engine_.schedule(hangup_at, [this] { hangup(); }, "hangup");
}

void Call::set_phase(CallPhase p) {
  if (p == phase_) return;
  if (!legal_transition(phase_, p)) {
    throw std::logic_error(fmt::format("illegal call transition {} -> {}", to_string(phase_),
                                       to_string(p)));
  }
  phase_ = p;
  timeline_.push_back({engine_.now(), p});
  trace(fmt::format("phase {}", to_string(p)));
}

void Call::dial() {
  dialed_at_ = engine_.now();
  live_ = true;
  set_phase(CallPhase::kDiscovering);
  request_gsm();
  start_discovery(Purpose::kDial);
}

void Call::hangup() {
  if (!live_) return;
  live_ = false;
  if (const auto* c = std::get_if<CommunityRoute>(&transport_)) {
    caller_.stop_heartbeat(PathId{caller(), callee(), c->serial});
  }
  if (gsm_) topo_.close_gsm(gsm_->id);
  if (const auto* g = std::get_if<GsmRoute>(&callee_transport_)) topo_.close_gsm(g->channel);
  set_phase(CallPhase::kIdle);
}

void Call::start_discovery(Purpose why) {
  purpose_ = why;
  if (!caller_.discovery_pending(callee())) caller_.initiate_discovery(callee());
}

void Call::request_gsm() {
  if (gsm_) return;
  gsm_ = topo_.open_gsm(caller(), callee());
  if (!gsm_) {
    trace("gsm unavailable");
    return;
  }
  const std::uint32_t id = gsm_->id;
  engine_.schedule(
      gsm_->usable_at,
      [this, id] {
        if (gsm_ && gsm_->id == id) on_gsm_ready();
      },
      "gsm-ready");
}

void Call::release_gsm() {
  if (!gsm_) return;
  const auto* in_use = std::get_if<GsmRoute>(&transport_);
  if (in_use && in_use->channel == gsm_->id) return;
  topo_.close_gsm(gsm_->id);
  gsm_.reset();
}

void Call::on_gsm_ready() {
  if (!live_) return;
  if ((phase_ == CallPhase::kDiscovering && dial_discovery_failed_) ||
      (phase_ == CallPhase::kSwitching && recovery_failed_)) {
    activate(GsmRoute{gsm_->id});
  }
}

void Call::on_discovery(const std::optional<PathReply>& result) {
  if (!live_) return;
  const Purpose why = purpose_;
  purpose_ = Purpose::kNone;
  auto community = [&] { return CommunityRoute{result->id.local_seq, result->full_path}; };

  switch (why) {
    case Purpose::kNone:
      return;
    case Purpose::kDial:
      if (result) {
        activate(community());
      } else if (gsm_) {
        dial_discovery_failed_ = true;
        if (topo_.gsm_usable(gsm_->id)) activate(GsmRoute{gsm_->id});
      } else {
        failed_ = true;
        live_ = false;
        trace("call failed: no community path and no GSM coverage");
        set_phase(CallPhase::kIdle);
      }
      return;
    case Purpose::kAlternative:
      if (!result) return;
      if (phase_ == CallPhase::kActiveGsm) {
        activate(community());
      } else if (phase_ == CallPhase::kActiveCommunity) {
        const auto* cur = std::get_if<CommunityRoute>(&transport_);
        if (cur && result->hop_count() < cur->hops()) activate(community());
      }
      return;
    case Purpose::kRecovery:
      if (result) {
        activate(community());
      } else {
        recovery_failed_ = true;
        if (gsm_ && topo_.gsm_usable(gsm_->id)) activate(GsmRoute{gsm_->id});
      }
      return;
  }
}

void Call::activate(Transport t) {
  const Transport old = transport_;
  if (phase_ == CallPhase::kActiveCommunity || phase_ == CallPhase::kActiveGsm) {
    set_phase(CallPhase::kSwitching);
  }
  ++epoch_;
  transport_ = t;
  recovery_failed_ = false;

  if (const auto* c = std::get_if<CommunityRoute>(&old)) {
    caller_.stop_heartbeat(PathId{caller(), callee(), c->serial});
  }
  if (const auto* g = std::get_if<GsmRoute>(&old); g && !std::holds_alternative<GsmRoute>(t)) {
    // The callee keeps answering over GSM until it sees the new epoch.
    const std::uint32_t id = g->channel;
    engine_.schedule_in(config_.playout_depth, [this, id] { topo_.close_gsm(id); }, "gsm-linger");
    if (gsm_ && gsm_->id == id) gsm_.reset();
  }

  if (const auto* c = std::get_if<CommunityRoute>(&t)) {
    release_gsm();
    caller_.start_heartbeat(PathId{caller(), callee(), c->serial});
    trace(fmt::format("switch epoch={} community serial={} path={}", epoch_, c->serial,
                      describe(c->full_path)));
    set_phase(CallPhase::kActiveCommunity);
  } else {
    last_gsm_channel_ = std::get<GsmRoute>(t).channel;
    trace(fmt::format("switch epoch={} gsm channel={}", epoch_, std::get<GsmRoute>(t).channel));
    set_phase(CallPhase::kActiveGsm);
  }

  if (!caller_capturing_) {
    caller_capturing_ = true;
    engine_.schedule_in(SimTime::zero(), [this] { caller_tick(); }, "capture");
    engine_.schedule_in(config_.monitor_interval, [this] { monitor_tick(); }, "monitor");
  }
}

void Call::monitor_tick() {
  if (!live_) return;
  engine_.schedule_in(config_.monitor_interval, [this] { monitor_tick(); }, "monitor");
  if (purpose_ != Purpose::kNone) return;
  if (phase_ == CallPhase::kActiveCommunity || phase_ == CallPhase::kActiveGsm) {
    start_discovery(Purpose::kAlternative);
  } else if (phase_ == CallPhase::kSwitching) {
    start_discovery(Purpose::kRecovery);
  }
}

void Call::on_path_lost(const PathId& path) {
  if (!live_ || phase_ != CallPhase::kActiveCommunity) return;
  const auto* cur = std::get_if<CommunityRoute>(&transport_);
  if (!cur || cur->serial != path.serial) return;
  trace(fmt::format("path lost serial={}", path.serial));
  caller_.stop_heartbeat(path);
  set_phase(CallPhase::kSwitching);
  recovery_failed_ = false;
  request_gsm();
  if (purpose_ == Purpose::kNone || !caller_.discovery_pending(callee())) {
    start_discovery(Purpose::kRecovery);
  } else {
    purpose_ = Purpose::kRecovery;
  }
}

void Call::caller_tick() {
  if (!live_ || engine_.now() >= hangup_at_) return;
  MediaPacket pkt;
  pkt.caller = caller();
  pkt.callee = callee();
  pkt.to_callee = true;
  pkt.epoch = epoch_;
  pkt.seq = caller_seq_++;
  pkt.media_timestamp = engine_.now();
  pkt.payload_size = config_.payload_size;
  send(Direction::kToCallee, pkt, transport_);
  engine_.schedule_in(config_.frame_interval, [this] { caller_tick(); }, "capture");
}

void Call::callee_tick() {
  if (!live_ || engine_.now() >= hangup_at_) return;
  MediaPacket pkt;
  pkt.caller = caller();
  pkt.callee = callee();
  pkt.to_callee = false;
  pkt.epoch = callee_epoch_;
  pkt.seq = callee_seq_++;
  pkt.media_timestamp = engine_.now();
  pkt.payload_size = config_.payload_size;
  send(Direction::kToCaller, pkt, callee_transport_);
  engine_.schedule_in(config_.frame_interval, [this] { callee_tick(); }, "capture");
}

void Call::send(Direction d, MediaPacket pkt, const Transport& via) {
  PacketLog& log = d == Direction::kToCallee ? to_callee_ : to_caller_;
  Router& from = d == Direction::kToCallee ? caller_ : callee_;
  if (const auto* c = std::get_if<CommunityRoute>(&via)) {
    pkt.path_serial = c->serial;
    log.sent(pkt, false);
    from.send_media(pkt);
  } else if (const auto* g = std::get_if<GsmRoute>(&via)) {
    pkt.path_serial = 0;
    log.sent(pkt, true);
    topo_.gsm_send(g->channel, from.self(), pkt);
  } else {
    log.sent(pkt, false);
    log.dropped(pkt, DropReason::kNoRoute);
  }
}

void Call::on_media_dropped(const MediaPacket& pkt, DropReason why) {
  (pkt.to_callee ? to_callee_ : to_caller_).dropped(pkt, why);
}

void Call::on_media(const MediaPacket& pkt) {
  if (pkt.to_callee) {
    if (!established_at_) {
      established_at_ = engine_.now();
      trace(fmt::format("established setup={}", to_string(*established_at_ - dialed_at_)));
    }
    if (pkt.epoch >= callee_epoch_) {
      callee_epoch_ = pkt.epoch;
      if (pkt.path_serial == 0) {
        callee_transport_ = GsmRoute{last_gsm_channel_};
      } else {
        callee_transport_ = CommunityRoute{pkt.path_serial, {}};
      }
    }
    if (!callee_capturing_ && live_) {
      callee_capturing_ = true;
      engine_.schedule_in(SimTime::zero(), [this] { callee_tick(); }, "capture");
    }
    deliver(Direction::kToCallee, pkt);
  } else {
    deliver(Direction::kToCaller, pkt);
  }
}

void Call::deliver(Direction d, const MediaPacket& pkt) {
  PacketLog& log = d == Direction::kToCallee ? to_callee_ : to_caller_;
  PlayoutBuffer& buf = d == Direction::kToCallee ? at_callee_ : at_caller_;
  const SimTime now = engine_.now();
  if (!log.arrived(pkt, now)) return;
  const auto adm = buf.admit(pkt, now);
  switch (adm.verdict) {
    case PlayoutBuffer::Verdict::kDuplicate:
      log.duplicate(pkt.seq);
      return;
    case PlayoutBuffer::Verdict::kLate:
      log.late(pkt.seq);
      return;
    case PlayoutBuffer::Verdict::kBuffered:
      break;
  }
  const std::uint32_t seq = pkt.seq;
  engine_.schedule(
      adm.due,
      [this, d, seq] {
        PacketLog& l = d == Direction::kToCallee ? to_callee_ : to_caller_;
        PlayoutBuffer& b = d == Direction::kToCallee ? at_callee_ : at_caller_;
        for (const auto& p : b.release(seq)) l.played(p.seq, engine_.now());
      },
      "playout");
}

}  // namespace comonet
