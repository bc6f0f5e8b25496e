#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "comonet/messages.hpp"
#include "comonet/topology.hpp"

namespace comonet {

/// Final disposition of one sent media packet.
enum class Fate { kInFlight, kPlayed, kLostInTransit, kLostAtPlayout, kDuplicate };

std::string_view to_string(Fate f);

struct PacketRecord {
  std::uint32_t seq = 0;
  std::uint32_t epoch = 0;
  SimTime sent_at;  // == media timestamp
  bool via_gsm = false;
  std::optional<SimTime> arrived_at;
  std::uint64_t arrival_order = 0;  // global arrival rank within the log
  std::optional<SimTime> played_at;
  Fate fate = Fate::kInFlight;
  std::optional<DropReason> drop_reason;
};

struct Conservation {
  std::uint64_t sent = 0;
  std::uint64_t played = 0;
  std::uint64_t lost_in_transit = 0;
  std::uint64_t lost_at_playout = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t in_flight = 0;

  bool balanced() const {
    return sent == played + lost_in_transit + lost_at_playout + duplicates + in_flight;
  }
};

/// Raw per-direction packet log. Records are indexed by seq, which starts at
/// 0 and increases by one per captured frame.
class PacketLog {
 public:
  void sent(const MediaPacket& p, bool via_gsm);
  void dropped(const MediaPacket& p, DropReason why);
  /// Returns false if the seq was never sent (ignored).
  bool arrived(const MediaPacket& p, SimTime at);
  void played(std::uint32_t seq, SimTime at);
  void late(std::uint32_t seq);
  void duplicate(std::uint32_t seq);

  const std::vector<PacketRecord>& records() const { return records_; }
  std::uint64_t duplicate_arrivals() const { return duplicate_arrivals_; }

  /// Event counters (every sent/dropped/played/late/duplicate notification)
  /// plus the records still in flight. Balanced iff no packet received two
  /// terminal events.
  Conservation conservation() const;
  /// Counts per final fate in the records.
  Conservation census() const;

 private:
  PacketRecord* find(std::uint32_t seq);
  std::vector<PacketRecord> records_;
  std::uint64_t next_arrival_ = 0;
  std::uint64_t duplicate_arrivals_ = 0;
  Conservation events_;
};

}  // namespace comonet
