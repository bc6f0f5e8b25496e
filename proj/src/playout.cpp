#include "comonet/playout.hpp"

namespace comonet {

PlayoutBuffer::Admission PlayoutBuffer::admit(const MediaPacket& pkt, SimTime arrival) {
  if (!seen_.insert(pkt.seq).second) return {Verdict::kDuplicate, arrival};
  auto [it, fresh] = offsets_.try_emplace(pkt.epoch, arrival - pkt.media_timestamp + depth_);
  const SimTime due = pkt.media_timestamp + it->second;
  if (arrival > due || (last_played_ && pkt.seq <= *last_played_)) return {Verdict::kLate, due};
  buffer_.emplace(pkt.seq, pkt);
  return {Verdict::kBuffered, due};
}

std::vector<MediaPacket> PlayoutBuffer::release(std::uint32_t up_to_seq) {
  std::vector<MediaPacket> out;
  auto end = buffer_.upper_bound(up_to_seq);
  for (auto it = buffer_.begin(); it != end; ++it) out.push_back(it->second);
  buffer_.erase(buffer_.begin(), end);
  if (!out.empty()) last_played_ = out.back().seq;
  return out;
}

}  // namespace comonet
