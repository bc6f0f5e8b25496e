#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "comonet/address.hpp"
#include "comonet/sim_time.hpp"

namespace comonet {

/// Number of rebroadcasts a path request may still undergo when it leaves
/// the originator.
inline constexpr int kMaxHopBudget = 7;
/// origin + up to kMaxHopBudget intermediates + target.
inline constexpr std::size_t kMaxPathNodes = kMaxHopBudget + 2;

using AddressPath = std::vector<CommunityAddress>;

struct RequestId {
  CommunityAddress origin;
  std::uint32_t local_seq = 0;
  auto operator<=>(const RequestId&) const = default;
};

/// Identifies one discovered community path. `serial` is the local_seq of
/// the request that discovered it, so every path an origin ever adopts has a
/// distinct id.
struct PathId {
  CommunityAddress origin;
  CommunityAddress target;
  std::uint32_t serial = 0;
  auto operator<=>(const PathId&) const = default;
};

struct PathRequest {
  RequestId id;
  CommunityAddress target;
  std::uint8_t hop_budget = kMaxHopBudget;
  AddressPath traversed;  // begins with id.origin
  bool operator==(const PathRequest&) const = default;
};

struct PathReply {
  RequestId id;
  CommunityAddress responder;
  CommunityAddress target;
  AddressPath full_path;  // origin ... target
  bool served_by_relay = false;
  bool operator==(const PathReply&) const = default;
  std::size_t hop_count() const { return full_path.empty() ? 0 : full_path.size() - 1; }
};

struct Heartbeat {
  PathId path;
  std::uint32_t seq = 0;
  bool operator==(const Heartbeat&) const = default;
};

struct HeartbeatAck {
  PathId path;
  std::uint32_t seq = 0;
  bool operator==(const HeartbeatAck&) const = default;
};

struct PathError {
  PathId path;
  CommunityAddress broken_at;
  bool operator==(const PathError&) const = default;
};

/// One voice frame. Stand-in for an RTP packet.
struct MediaPacket {
  CommunityAddress caller;
  CommunityAddress callee;
  bool to_callee = true;       // direction of travel
  std::uint32_t path_serial = 0;  // community path in use; 0 when carried over GSM
  std::uint32_t epoch = 0;     // session epoch at capture
  std::uint32_t seq = 0;
  SimTime media_timestamp;
  std::uint16_t payload_size = 0;
  std::uint8_t hops = 0;       // header field, incremented per forwarding node

  CommunityAddress source() const { return to_callee ? caller : callee; }
  CommunityAddress destination() const { return to_callee ? callee : caller; }
  PathId path() const { return PathId{caller, callee, path_serial}; }
  bool operator==(const MediaPacket&) const = default;
};

using Message = std::variant<PathRequest, PathReply, Heartbeat, HeartbeatAck, PathError, MediaPacket>;

std::string_view message_kind(const Message& m);
std::string describe(const Message& m);
std::string describe(const PathId& p);
std::string describe(const AddressPath& p);

}  // namespace comonet
