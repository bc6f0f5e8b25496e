#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "comonet/random.hpp"
#include "comonet/wire.hpp"

using namespace comonet;

namespace {

CommunityAddress any_addr(RandomStream& r) {
  return CommunityAddress{{static_cast<std::uint8_t>(r.uniform_int(128, 227)),
                           static_cast<std::uint8_t>(r.uniform_int(0, 99)),
                           static_cast<std::uint8_t>(r.uniform_int(0, 99)),
                           static_cast<std::uint8_t>(r.uniform_int(0, 99))}};
}

AddressPath any_path(RandomStream& r) {
  AddressPath p;
  const auto n = r.uniform_int(0, static_cast<std::int64_t>(kMaxPathNodes));
  for (std::int64_t i = 0; i < n; ++i) p.push_back(any_addr(r));
  return p;
}

std::uint32_t u32(RandomStream& r) { return static_cast<std::uint32_t>(r.next_u64()); }

Message any_message(RandomStream& r) {
  const PathId pid{any_addr(r), any_addr(r), u32(r)};
  switch (r.uniform_int(0, 5)) {
    case 0:
      return PathRequest{{any_addr(r), u32(r)}, any_addr(r),
                         static_cast<std::uint8_t>(r.uniform_int(0, kMaxHopBudget)), any_path(r)};
    case 1:
      return PathReply{{any_addr(r), u32(r)}, any_addr(r), any_addr(r), any_path(r), r.bernoulli(0.5)};
    case 2:
      return Heartbeat{pid, u32(r)};
    case 3:
      return HeartbeatAck{pid, u32(r)};
    case 4:
      return PathError{pid, any_addr(r)};
    default:
      return MediaPacket{any_addr(r),
                         any_addr(r),
                         r.bernoulli(0.5),
                         u32(r),
                         u32(r),
                         u32(r),
                         SimTime::micros(r.uniform_int(0, INT64_MAX / 2)),
                         static_cast<std::uint16_t>(r.uniform_int(0, 65535)),
                         static_cast<std::uint8_t>(r.uniform_int(0, 255))};
  }
}

}  // namespace

TEST_CASE("every message round-trips through the codec") {
  RandomStream r(77);
  for (int i = 0; i < 5000; ++i) {
    const Message m = any_message(r);
    const auto bytes = wire::encode(m);
    REQUIRE(wire::decode(bytes) == m);
  }
}

TEST_CASE("heartbeat layout is fixed") {
  const Heartbeat hb{{CommunityAddress{{201, 3, 14, 70}}, CommunityAddress{{140, 34, 56, 78}}, 0x01020304},
                     0x0A0B0C0D};
  const std::vector<std::uint8_t> expect{3,    201, 3,    14,   70,   140,  34,   56,   78,
                                         0x01, 0x02, 0x03, 0x04, 0x0A, 0x0B, 0x0C, 0x0D};
  CHECK(wire::encode(hb) == expect);
}

TEST_CASE("malformed input is rejected") {
  RandomStream r(5);
  for (int i = 0; i < 500; ++i) {
    auto bytes = wire::encode(any_message(r));
    auto cut = bytes;
    cut.pop_back();
    CHECK_THROWS_AS(wire::decode(cut), wire::DecodeError);
    bytes.push_back(0);
    CHECK_THROWS_AS(wire::decode(bytes), wire::DecodeError);
  }
  CHECK_THROWS_AS(wire::decode(std::vector<std::uint8_t>{}), wire::DecodeError);
  CHECK_THROWS_AS(wire::decode(std::vector<std::uint8_t>{9}), wire::DecodeError);
  auto req = wire::encode(PathRequest{{CommunityAddress{{130, 0, 0, 1}}, 1}, CommunityAddress{{130, 0, 0, 2}}, 7, {}});
  req[9 + 4] = 8;  // tag, origin(4), seq(4), target(4), budget
  CHECK_THROWS_AS(wire::decode(req), wire::DecodeError);
}
