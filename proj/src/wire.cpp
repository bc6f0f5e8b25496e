#include "comonet/wire.hpp"

#include <fmt/format.h>

namespace comonet::wire {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void i64(std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v);
    u32(static_cast<std::uint32_t>(u >> 32));
    u32(static_cast<std::uint32_t>(u));
  }
  void boolean(bool b) { u8(b ? 1 : 0); }
  void addr(const CommunityAddress& a) {
    for (auto o : a.octets) u8(o);
  }
  void path(const AddressPath& p) {
    if (p.size() > 255) throw std::length_error("address list longer than 255 entries");
    u8(static_cast<std::uint8_t>(p.size()));
    for (const auto& a : p) addr(a);
  }
  void path_id(const PathId& p) {
    addr(p.origin);
    addr(p.target);
    u32(p.serial);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    if (pos_ >= in_.size()) throw DecodeError(fmt::format("truncated message at byte {}", pos_));
    return in_[pos_++];
  }
  std::uint16_t u16() {
    const std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  std::int64_t i64() {
    const std::uint64_t hi = u32();
    return static_cast<std::int64_t>((hi << 32) | u32());
  }
  bool boolean() {
    const auto b = u8();
    if (b > 1) throw DecodeError(fmt::format("boolean byte {} at offset {}", b, pos_ - 1));
    return b == 1;
  }
  CommunityAddress addr() {
    CommunityAddress a;
    for (auto& o : a.octets) o = u8();
    return a;
  }
  AddressPath path() {
    const std::size_t n = u8();
    AddressPath p;
    p.reserve(n);
    for (std::size_t i = 0; i < n; ++i) p.push_back(addr());
    return p;
  }
  PathId path_id() {
    PathId p;
    p.origin = addr();
    p.target = addr();
    p.serial = u32();
    return p;
  }
  void finish() const {
    if (pos_ != in_.size()) {
      throw DecodeError(fmt::format("{} trailing bytes", in_.size() - pos_));
    }
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void put(Writer& w, const PathRequest& r) {
  w.u8(static_cast<std::uint8_t>(Tag::kPathRequest));
  w.addr(r.id.origin);
  w.u32(r.id.local_seq);
  w.addr(r.target);
  w.u8(r.hop_budget);
  w.path(r.traversed);
}
void put(Writer& w, const PathReply& r) {
  w.u8(static_cast<std::uint8_t>(Tag::kPathReply));
  w.addr(r.id.origin);
  w.u32(r.id.local_seq);
  w.addr(r.responder);
  w.addr(r.target);
  w.path(r.full_path);
  w.boolean(r.served_by_relay);
}
void put(Writer& w, const Heartbeat& h) {
  w.u8(static_cast<std::uint8_t>(Tag::kHeartbeat));
  w.path_id(h.path);
  w.u32(h.seq);
}
void put(Writer& w, const HeartbeatAck& h) {
  w.u8(static_cast<std::uint8_t>(Tag::kHeartbeatAck));
  w.path_id(h.path);
  w.u32(h.seq);
}
void put(Writer& w, const PathError& e) {
  w.u8(static_cast<std::uint8_t>(Tag::kPathError));
  w.path_id(e.path);
  w.addr(e.broken_at);
}
void put(Writer& w, const MediaPacket& p) {
  w.u8(static_cast<std::uint8_t>(Tag::kMedia));
  w.addr(p.caller);
  w.addr(p.callee);
  w.boolean(p.to_callee);
  w.u32(p.path_serial);
  w.u32(p.epoch);
  w.u32(p.seq);
  w.i64(p.media_timestamp.us());
  w.u16(p.payload_size);
  w.u8(p.hops);
}

}  // namespace

std::vector<std::uint8_t> encode(const Message& m) {
  Writer w;
  std::visit([&w](const auto& msg) { put(w, msg); }, m);
  return w.take();
}

Message decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto tag = static_cast<Tag>(r.u8());
  Message out;
  switch (tag) {
    case Tag::kPathRequest: {
      PathRequest q;
      q.id.origin = r.addr();
      q.id.local_seq = r.u32();
      q.target = r.addr();
      q.hop_budget = r.u8();
      if (q.hop_budget > kMaxHopBudget) {
        throw DecodeError(fmt::format("hop budget {} exceeds {}", q.hop_budget, kMaxHopBudget));
      }
      q.traversed = r.path();
      out = std::move(q);
      break;
    }
    case Tag::kPathReply: {
      PathReply p;
      p.id.origin = r.addr();
      p.id.local_seq = r.u32();
      p.responder = r.addr();
      p.target = r.addr();
      p.full_path = r.path();
      p.served_by_relay = r.boolean();
      out = std::move(p);
      break;
    }
    case Tag::kHeartbeat: {
      Heartbeat h;
      h.path = r.path_id();
      h.seq = r.u32();
      out = h;
      break;
    }
    case Tag::kHeartbeatAck: {
      HeartbeatAck h;
      h.path = r.path_id();
      h.seq = r.u32();
      out = h;
      break;
    }
    case Tag::kPathError: {
      PathError e;
      e.path = r.path_id();
      e.broken_at = r.addr();
      out = e;
      break;
    }
    case Tag::kMedia: {
      MediaPacket p;
      p.caller = r.addr();
      p.callee = r.addr();
      p.to_callee = r.boolean();
      p.path_serial = r.u32();
      p.epoch = r.u32();
      p.seq = r.u32();
      p.media_timestamp = SimTime::micros(r.i64());
      p.payload_size = r.u16();
      p.hops = r.u8();
      out = p;
      break;
    }
    default:
      throw DecodeError(fmt::format("unknown message type {}", static_cast<int>(tag)));
  }
  r.finish();
  return out;
}

}  // namespace comonet::wire
