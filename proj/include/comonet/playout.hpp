#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "comonet/messages.hpp"

namespace comonet {

/// Receiver-side playout buffer for one media direction.
///
/// The first packet of each session epoch fixes that epoch's playout offset
/// (arrival - media_timestamp + depth), so a packet is due at
/// media_timestamp + offset. Packets arriving after their due time, or after
/// a higher seq was already played, are late. Releasing seq n plays every
/// buffered packet with seq <= n, in seq order; this keeps playback ordered
/// when a path switch shortens transit.
class PlayoutBuffer {
 public:
  enum class Verdict { kBuffered, kLate, kDuplicate };
  struct Admission {
    Verdict verdict;
    SimTime due;
  };

  explicit PlayoutBuffer(SimTime depth) : depth_(depth) {}

  SimTime depth() const { return depth_; }

  Admission admit(const MediaPacket& pkt, SimTime arrival);
  std::vector<MediaPacket> release(std::uint32_t up_to_seq);

  std::optional<std::uint32_t> last_played() const { return last_played_; }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  SimTime depth_;
  std::map<std::uint32_t, SimTime> offsets_;  // epoch -> playout offset
  std::map<std::uint32_t, MediaPacket> buffer_;
  std::set<std::uint32_t> seen_;
  std::optional<std::uint32_t> last_played_;
};

}  // namespace comonet
