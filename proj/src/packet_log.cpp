#include "comonet/packet_log.hpp"

#include <stdexcept>

namespace comonet {

std::string_view to_string(Fate f) {
  switch (f) {
    case Fate::kInFlight: return "in_flight";
    case Fate::kPlayed: return "played";
    case Fate::kLostInTransit: return "lost_in_transit";
    case Fate::kLostAtPlayout: return "lost_at_playout";
    case Fate::kDuplicate: return "duplicate";
  }
  return "?";
}

PacketRecord* PacketLog::find(std::uint32_t seq) {
  return seq < records_.size() ? &records_[seq] : nullptr;
}

void PacketLog::sent(const MediaPacket& p, bool via_gsm) {
  if (p.seq != records_.size()) throw std::logic_error("media seq must be dense and increasing");
  PacketRecord r;
  r.seq = p.seq;
  r.epoch = p.epoch;
  r.sent_at = p.media_timestamp;
  r.via_gsm = via_gsm;
  records_.push_back(r);
  ++events_.sent;
}

void PacketLog::dropped(const MediaPacket& p, DropReason why) {
  PacketRecord* r = find(p.seq);
  if (!r) return;
  ++events_.lost_in_transit;
  r->fate = Fate::kLostInTransit;
  r->drop_reason = why;
}

bool PacketLog::arrived(const MediaPacket& p, SimTime at) {
  PacketRecord* r = find(p.seq);
  if (!r) return false;
  if (r->arrived_at) {
    ++duplicate_arrivals_;
    return true;
  }
  r->arrived_at = at;
  r->arrival_order = next_arrival_++;
  return true;
}

void PacketLog::played(std::uint32_t seq, SimTime at) {
  if (PacketRecord* r = find(seq)) {
    ++events_.played;
    r->played_at = at;
    r->fate = Fate::kPlayed;
  }
}

void PacketLog::late(std::uint32_t seq) {
  if (PacketRecord* r = find(seq)) {
    ++events_.lost_at_playout;
    r->fate = Fate::kLostAtPlayout;
  }
}

void PacketLog::duplicate(std::uint32_t seq) {
  // A duplicate arrival of an already-accounted packet keeps that packet's
  // fate; only a never-accounted copy would be classified here.
  if (PacketRecord* r = find(seq); r && r->fate == Fate::kInFlight && !r->arrived_at) {
    ++events_.duplicates;
    r->fate = Fate::kDuplicate;
  }
}

Conservation PacketLog::conservation() const {
  Conservation c = events_;
  c.in_flight = 0;
  for (const auto& r : records_) {
    if (r.fate == Fate::kInFlight) ++c.in_flight;
  }
  return c;
}

Conservation PacketLog::census() const {
  Conservation c;
  c.sent = records_.size();
  for (const auto& r : records_) {
    switch (r.fate) {
      case Fate::kPlayed: ++c.played; break;
      case Fate::kLostInTransit: ++c.lost_in_transit; break;
      case Fate::kLostAtPlayout: ++c.lost_at_playout; break;
      case Fate::kDuplicate: ++c.duplicates; break;
      case Fate::kInFlight: ++c.in_flight; break;
    }
  }
  return c;
}

}  // namespace comonet
