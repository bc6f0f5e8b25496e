#include "comonet/messages.hpp"

#include <fmt/format.h>

namespace comonet {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string describe(const PathId& p) {
  return fmt::format("{}>{}#{}", p.origin.str(), p.target.str(), p.serial);
}

std::string describe(const AddressPath& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ',';
    out += p[i].str();
  }
  out += ']';
  return out;
}

std::string_view message_kind(const Message& m) {
  static constexpr std::string_view names[] = {"RREQ", "RREP", "HB", "HBACK", "PERR", "MEDIA"};
  return names[m.index()];
}

std::string describe(const Message& m) {
  return std::visit(
      overloaded{
          [](const PathRequest& r) {
            return fmt::format("RREQ id={}/{} target={} budget={} path={}", r.id.origin.str(),
                               r.id.local_seq, r.target.str(), r.hop_budget, describe(r.traversed));
          },
          [](const PathReply& r) {
            return fmt::format("RREP id={}/{} responder={} relay={} path={}", r.id.origin.str(),
                               r.id.local_seq, r.responder.str(), r.served_by_relay ? 1 : 0,
                               describe(r.full_path));
          },
          [](const Heartbeat& h) { return fmt::format("HB path={} seq={}", describe(h.path), h.seq); },
          [](const HeartbeatAck& h) {
            return fmt::format("HBACK path={} seq={}", describe(h.path), h.seq);
          },
          [](const PathError& e) {
            return fmt::format("PERR path={} broken_at={}", describe(e.path), e.broken_at.str());
          },
          [](const MediaPacket& p) {
            return fmt::format("MEDIA {}>{} dir={} serial={} epoch={} seq={}", p.caller.str(),
                               p.callee.str(), p.to_callee ? "fwd" : "rev", p.path_serial, p.epoch,
                               p.seq);
          },
      },
      m);
}

}  // namespace comonet
