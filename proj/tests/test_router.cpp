#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "support.hpp"

using namespace comonet;
using testkit::addr;
using testkit::Bench;
using testkit::exact_links;

namespace {

void line(Bench& b, int n, double spacing = 90.0) {
  for (int i = 0; i < n; ++i) b.add(i, Vec2{spacing * i, 0});
}

MediaPacket media(int from, int to, std::uint32_t serial, std::uint32_t seq, bool to_callee = true) {
  MediaPacket p;
  p.caller = addr(to_callee ? from : to);
  p.callee = addr(to_callee ? to : from);
  p.to_callee = to_callee;
  p.path_serial = serial;
  p.epoch = 1;
  p.seq = seq;
  return p;
}

}  // namespace

TEST_CASE("three-node line: request out, reply back, entries on every node") {
  Bench b(exact_links());
  line(b, 3);
  const auto id = b.at(0).initiate_discovery(addr(2));
  CHECK(b.at(0).discovery_pending(addr(2)));
  CHECK_THROWS_AS(b.at(0).initiate_discovery(addr(2)), std::logic_error);
  CHECK_THROWS_AS(b.at(0).initiate_discovery(addr(0)), std::logic_error);
  b.engine.run_until(SimTime::seconds(1));

  REQUIRE(b.resolved.size() == 1);
  const auto& rep = *b.resolved[0].second;
  CHECK(rep.full_path == AddressPath{addr(0), addr(1), addr(2)});
  CHECK(rep.hop_count() == 2);
  CHECK_FALSE(rep.served_by_relay);
  CHECK_FALSE(b.at(0).discovery_pending(addr(2)));

  const PathId pid{addr(0), addr(2), id.local_seq};
  const auto* e0 = b.at(0).route(pid);
  const auto* e1 = b.at(1).route(pid);
  const auto* e2 = b.at(2).route(pid);
  REQUIRE(e0);
  REQUIRE(e1);
  REQUIRE(e2);
  CHECK(e0->next_hop == addr(1));
  CHECK_FALSE(e0->predecessor.has_value());
  CHECK(e0->hop_count == 2);
  CHECK(e1->next_hop == addr(2));
  CHECK(e1->predecessor == addr(0));
  CHECK(e1->hop_count == 1);
  CHECK_FALSE(e2->next_hop.has_value());
  CHECK(e2->predecessor == addr(1));
}

TEST_CASE("resolution time is two link latencies per hop") {
  for (int n = 2; n <= 9; ++n) {
    Bench b(exact_links());
    line(b, n);
    SimTime when;
    b.at(0).set_hooks({[&](CommunityAddress, const std::optional<PathReply>&) { when = b.engine.now(); },
                       {}, {}, {}});
    b.at(0).initiate_discovery(addr(n - 1));
    b.engine.run_until(SimTime::seconds(1));
    CHECK(when == SimTime::millis(5) * (2 * (n - 1)));
  }
}

TEST_CASE("hop budget: eight links resolve, nine time out") {
  {
    Bench b(exact_links());
    line(b, 9);
    b.at(0).initiate_discovery(addr(8));
    b.engine.run_until(SimTime::seconds(3));
    REQUIRE(b.resolved.size() == 1);
    REQUIRE(b.resolved[0].second.has_value());
    CHECK(b.resolved[0].second->hop_count() == 8);
  }
  {
    Bench b(exact_links());
    line(b, 10);
    SimTime when;
    b.at(0).set_hooks({[&](CommunityAddress, const std::optional<PathReply>& r) {
                         CHECK_FALSE(r.has_value());
                         when = b.engine.now();
                       },
                       {}, {}, {}});
    b.at(0).initiate_discovery(addr(9));
    b.engine.run_until(SimTime::seconds(3));
    CHECK(when == SimTime::seconds(2));
    // The copy that reaches the ninth node has no budget left.
    CHECK(b.at(8).stats().rebroadcasts.empty());
    CHECK(b.at(7).stats().rebroadcasts.size() == 1);
    CHECK(b.at(9).routes().empty());
  }
}

TEST_CASE("each node rebroadcasts a request at most once") {
  Bench b(exact_links());
  // Twelve nodes on a ring of radius 150 m: 78 m between neighbours, so
  // each hears exactly two others.
  const int n = 12;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * 3.14159265358979 * i / n;
    b.add(i, Vec2{150 * std::cos(a), 150 * std::sin(a)});
  }
  b.at(0).initiate_discovery(addr(6));
  b.engine.run_until(SimTime::seconds(3));
  for (int i = 0; i < n; ++i) {
    for (const auto& [id, count] : b.at(i).stats().rebroadcasts) CHECK(count == 1);
  }
  REQUIRE(b.resolved.size() == 1);
  CHECK(b.resolved[0].second->hop_count() == 6);
  CHECK(b.at(6).stats().replies_sent == 1);
}

TEST_CASE("diamond: the target answers the first copy only") {
  Bench b(exact_links());
  b.add(0, Vec2{0, 0});
  b.add(1, Vec2{70, 60});
  b.add(2, Vec2{70, -60});
  b.add(3, Vec2{140, 0});
  const auto id = b.at(0).initiate_discovery(addr(3));
  b.engine.run_until(SimTime::seconds(3));
  REQUIRE(b.resolved.size() == 1);
  CHECK(b.resolved[0].second->hop_count() == 2);
  CHECK(b.at(3).stats().replies_sent == 1);
  const PathId pid{addr(0), addr(3), id.local_seq};
  const bool via1 = b.at(1).route(pid) != nullptr;
  const bool via2 = b.at(2).route(pid) != nullptr;
  CHECK(via1 != via2);
  CHECK(b.resolved[0].second->full_path[1] == (via1 ? addr(1) : addr(2)));
}

TEST_CASE("random geometric graphs resolve at the BFS distance") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    Bench b(exact_links(), seed);
    RandomStream r(seed * 31 + 7);
    const int n = static_cast<int>(r.uniform_int(5, 20));
    for (int i = 0; i < n; ++i) b.add(i, Vec2{r.uniform01() * 400, r.uniform01() * 400});
    const int target = static_cast<int>(r.uniform_int(1, n - 1));
    const auto dist = testkit::bfs(*b.topo, addr(0), SimTime::zero());
    b.at(0).initiate_discovery(addr(target));
    b.engine.run_until(SimTime::seconds(3));
    REQUIRE(b.resolved.size() == 1);
    const auto it = dist.find(addr(target));
    if (it != dist.end() && it->second <= kMaxHopBudget + 1) {
      REQUIRE(b.resolved[0].second.has_value());
      CHECK(static_cast<int>(b.resolved[0].second->hop_count()) == it->second);
    } else {
      CHECK_FALSE(b.resolved[0].second.has_value());
    }
  }
}

TEST_CASE("media follows the path both ways and counts hops") {
  Bench b(exact_links());
  line(b, 4);
  const auto id = b.at(0).initiate_discovery(addr(3));
  b.engine.run_until(SimTime::seconds(1));
  b.at(0).send_media(media(0, 3, id.local_seq, 0));
  b.engine.run_until(SimTime::seconds(2));
  REQUIRE(b.media.size() == 1);
  CHECK(b.media[0].first == addr(3));
  CHECK(b.media[0].second.hops == 2);
  b.at(3).send_media(media(3, 0, id.local_seq, 0, false));
  b.engine.run_until(SimTime::seconds(3));
  REQUIRE(b.media.size() == 2);
  CHECK(b.media[1].first == addr(0));
  CHECK(b.at(1).stats().forwarded.at(PathId{addr(0), addr(3), id.local_seq}) == 2);
}

TEST_CASE("no route: media is dropped and reported") {
  Bench b(exact_links());
  line(b, 3);
  DropReason why{};
  int drops = 0;
  b.at(0).set_hooks({{}, {}, {}, [&](const MediaPacket&, DropReason r) {
                       why = r;
                       ++drops;
                     }});
  b.at(0).send_media(media(0, 2, 99, 0));
  CHECK(drops == 1);
  CHECK(why == DropReason::kNoRoute);
  CHECK(b.at(0).stats().routing_drops == 1);
}

TEST_CASE("a relay carrying live traffic answers on the target's behalf") {
  Bench b(exact_links());
  line(b, 3);
  b.add(3, Vec2{90, 90});  // hears only the middle node
  const auto id = b.at(0).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::seconds(1));
  b.at(0).send_media(media(0, 2, id.local_seq, 0));
  b.engine.run_until(SimTime::millis(1100));

  b.resolved.clear();
  b.at(3).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::seconds(2));
  REQUIRE(b.resolved.size() == 1);
  const auto& rep = *b.resolved[0].second;
  CHECK(rep.served_by_relay);
  CHECK(rep.responder == addr(1));
  CHECK(rep.full_path == AddressPath{addr(3), addr(1), addr(2)});
  CHECK(b.at(1).stats().relay_replies_sent == 1);
  CHECK(b.at(2).stats().replies_sent == 1);

  // The caller on that path gets no relay answer: the path already holds it.
  b.resolved.clear();
  b.at(0).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::millis(2200));
  REQUIRE(b.resolved.size() == 1);
  CHECK_FALSE(b.resolved[0].second->served_by_relay);
  CHECK(b.at(1).stats().relay_replies_sent == 1);
}

TEST_CASE("an idle or stale route does not earn a relay reply") {
  Bench b(exact_links());
  line(b, 3);
  b.add(3, Vec2{90, 90});
  b.at(0).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::seconds(1));
  b.at(3).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::seconds(2));
  REQUIRE(b.resolved.size() == 2);
  CHECK_FALSE(b.resolved[1].second->served_by_relay);
  CHECK(b.at(1).stats().relay_replies_sent == 0);
}

TEST_CASE("heartbeats are acknowledged every interval on a healthy path") {
  Bench b(exact_links());
  line(b, 3);
  const auto id = b.at(0).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::millis(100));
  const PathId pid{addr(0), addr(2), id.local_seq};
  b.at(0).start_heartbeat(pid);
  b.engine.run_until(SimTime::millis(10'100));
  CHECK(b.at(0).stats().acks_received.at(pid) >= 9);
  CHECK(b.at(1).stats().acks_received.at(pid) >= 9);
  CHECK(b.at(1).monitoring(pid));
  CHECK(b.lost.empty());
  b.at(0).stop_heartbeat(pid);
  CHECK_FALSE(b.at(0).monitoring(pid));
  // The intermediate retires once heartbeats stop arriving from upstream.
  b.engine.run_until(SimTime::seconds(16));
  CHECK_FALSE(b.at(1).monitoring(pid));
  CHECK(b.lost.empty());
}

TEST_CASE("origin detects a vanished next hop within miss_threshold intervals") {
  Bench b(exact_links());
  b.add(0, Vec2{0, 0});
  b.add(1, NodeKinematics({{SimTime::seconds(5), {90, 0}}, {SimTime::millis(5001), {90, 5000}}}));
  b.add(2, Vec2{180, 0});
  const auto id = b.at(0).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::millis(100));
  const PathId pid{addr(0), addr(2), id.local_seq};
  b.at(0).start_heartbeat(pid);
  b.engine.run_until(SimTime::seconds(15));
  REQUIRE(b.lost.size() == 1);
  CHECK(b.lost[0].at == addr(0));
  CHECK(b.lost[0].broken_at == addr(0));
  const auto& cfg = b.config;
  // Last ack came back at most one interval before the departure.
  CHECK(b.lost[0].when > SimTime::seconds(5) + cfg.loss_timeout() - cfg.heartbeat_interval);
  CHECK(b.lost[0].when <= SimTime::seconds(5) + cfg.loss_timeout());
  CHECK(b.at(0).route(pid)->broken);
  CHECK_FALSE(b.at(0).monitoring(pid));
}

TEST_CASE("an intermediate reports loss upstream and rediscovers") {
  Bench b(exact_links());
  b.add(0, Vec2{0, 0});
  b.add(1, Vec2{90, 0});
  b.add(2, NodeKinematics({{SimTime::seconds(5), {180, 0}}, {SimTime::millis(5001), {180, 5000}}}));
  const auto id = b.at(0).initiate_discovery(addr(2));
  b.engine.run_until(SimTime::millis(100));
  const PathId pid{addr(0), addr(2), id.local_seq};
  b.at(0).start_heartbeat(pid);
  b.engine.run_until(SimTime::seconds(15));

  const auto& detected = b.at(1).stats().losses_detected;
  REQUIRE(detected.size() == 1);
  const SimTime at_relay = detected[0].second;
  CHECK(at_relay > SimTime::seconds(5) + b.config.loss_timeout() - b.config.heartbeat_interval);
  CHECK(at_relay <= SimTime::seconds(5) + b.config.loss_timeout());
  REQUIRE(b.lost.size() >= 1);
  CHECK(b.lost[0].at == addr(0));
  CHECK(b.lost[0].broken_at == addr(1));
  CHECK(b.lost[0].when == at_relay + SimTime::millis(5));
  CHECK(b.at(1).route(pid)->broken);
  CHECK(b.at(0).route(pid)->broken);
  // The relay's own rediscovery times out: the target is gone.
  CHECK(std::any_of(b.resolved.begin(), b.resolved.end(), [](const auto& r) {
    return r.first == addr(1) && !r.second.has_value();
  }));
}
