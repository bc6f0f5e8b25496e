#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "comonet/engine.hpp"
#include "comonet/packet_log.hpp"
#include "comonet/playout.hpp"
#include "comonet/router.hpp"
#include "comonet/topology.hpp"

namespace comonet {

enum class CallPhase { kIdle, kDiscovering, kActiveCommunity, kActiveGsm, kSwitching };

std::string_view to_string(CallPhase p);

/// True for the transitions a call may take.
bool legal_transition(CallPhase from, CallPhase to);

struct SessionConfig {
  SimTime frame_interval = SimTime::millis(20);
  std::uint16_t payload_size = 160;
  SimTime playout_depth = SimTime::millis(100);
  SimTime monitor_interval = SimTime::seconds(2);

  void validate() const;
};

struct PhaseChange {
  SimTime at;
  CallPhase phase;
};

/// A community path carrying the call.
struct CommunityRoute {
  std::uint32_t serial = 0;
  AddressPath full_path;
  std::size_t hops() const { return full_path.empty() ? 0 : full_path.size() - 1; }
};

struct GsmRoute {
  std::uint32_t channel = 0;
};

using Transport = std::variant<std::monostate, CommunityRoute, GsmRoute>;

/// One voice call between two nodes.
///
/// The caller side drives the call: it discovers a community path (and asks
/// for a GSM channel in parallel as a fallback), captures one frame per
/// frame_interval from activation until hangup, watches the path through the
/// router's heartbeats and looks for better alternatives every
/// monitor_interval. The callee mirrors whichever transport the most recent
/// caller epoch arrived on. Capture never pauses across a switch; packets go
/// out on the old transport until the new one is installed.
class Call {
 public:
  enum class Direction { kToCallee, kToCaller };

  Call(std::string label, Engine& engine, Topology& topology, Router& caller, Router& callee,
       SessionConfig config);
  Call(const Call&) = delete;
  Call& operator=(const Call&) = delete;

  /// Schedules dialing and hangup.
  void schedule(SimTime dial_at, SimTime hangup_at);

  // Event sinks, wired by the owning simulation.
  void on_discovery(const std::optional<PathReply>& result);
  void on_path_lost(const PathId& path);
  void on_media(const MediaPacket& pkt);
  void on_media_dropped(const MediaPacket& pkt, DropReason why);

  const std::string& label() const { return label_; }
  CommunityAddress caller() const { return caller_.self(); }
  CommunityAddress callee() const { return callee_.self(); }
  CallPhase phase() const { return phase_; }
  std::uint32_t epoch() const { return epoch_; }
  bool failed() const { return failed_; }
  SimTime dialed_at() const { return dialed_at_; }
  SimTime hangup_at() const { return hangup_at_; }
  std::optional<SimTime> established_at() const { return established_at_; }
  std::optional<SimTime> setup_time() const;
  const std::vector<PhaseChange>& timeline() const { return timeline_; }
  const Transport& transport() const { return transport_; }
  const PacketLog& log(Direction d) const { return d == Direction::kToCallee ? to_callee_ : to_caller_; }
  const SessionConfig& config() const { return config_; }
  /// Seq counts of frames captured per direction.
  std::uint32_t captured(Direction d) const {
    return d == Direction::kToCallee ? caller_seq_ : callee_seq_;
  }
  bool live() const { return live_; }

 private:
  enum class Purpose { kNone, kDial, kAlternative, kRecovery };

  void dial();
  void hangup();
  void set_phase(CallPhase p);
  void start_discovery(Purpose why);
  void request_gsm();
  void release_gsm();
  void on_gsm_ready();
  void activate(Transport t);
  void monitor_tick();
  void caller_tick();
  void callee_tick();
  void send(Direction d, MediaPacket pkt, const Transport& via);
  void deliver(Direction d, const MediaPacket& pkt);
  void trace(std::string_view what) const;

  std::string label_;
  Engine& engine_;
  Topology& topo_;
  Router& caller_;
  Router& callee_;
  SessionConfig config_;

  CallPhase phase_ = CallPhase::kIdle;
  std::vector<PhaseChange> timeline_;
  bool live_ = false;
  bool failed_ = false;
  bool dial_discovery_failed_ = false;
  bool recovery_failed_ = false;
  Purpose purpose_ = Purpose::kNone;
  SimTime dialed_at_;
  SimTime hangup_at_;
  std::optional<SimTime> established_at_;

  Transport transport_;
  std::optional<GsmChannel> gsm_;
  std::uint32_t last_gsm_channel_ = 0;
  std::uint32_t epoch_ = 0;
  std::uint32_t caller_seq_ = 0;
  bool caller_capturing_ = false;

  // Callee side.
  bool callee_capturing_ = false;
  std::uint32_t callee_seq_ = 0;
  std::uint32_t callee_epoch_ = 0;
  Transport callee_transport_;

  PlayoutBuffer at_callee_;
  PlayoutBuffer at_caller_;
  PacketLog to_callee_;
  PacketLog to_caller_;
};

}  // namespace comonet
