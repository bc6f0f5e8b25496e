#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"

using comonet::DropReason;
using comonet::Message;
using comonet::NodeKinematics;
using comonet::SimTime;
using comonet::Vec2;
using comonet::Waypoint;
using testkit::addr;

namespace {

comonet::Message probe() { return comonet::Heartbeat{{addr(0), addr(1), 1}, 0}; }

struct Net {
  comonet::Engine engine;
  comonet::Topology topo;
  std::vector<std::pair<SimTime, comonet::CommunityAddress>> delivered;
  std::vector<DropReason> drops;

  explicit Net(comonet::LinkModel m = {}, std::uint64_t seed = 5)
      : topo(engine, m, comonet::RandomStream::derive(seed, "link"),
             comonet::RandomStream::derive(seed, "gsm")) {
    topo.set_deliver([this](comonet::CommunityAddress to, comonet::CommunityAddress, const Message&) {
      delivered.emplace_back(engine.now(), to);
    });
    topo.set_drop_observer([this](comonet::CommunityAddress, comonet::CommunityAddress,
                                  const Message&, DropReason r) { drops.push_back(r); });
  }
};

}  // namespace

TEST_CASE("piecewise-linear motion interpolates and parks at both ends") {
  const NodeKinematics k({Waypoint{SimTime::seconds(2), {0, 0}},
                          Waypoint{SimTime::seconds(4), {100, 50}},
                          Waypoint{SimTime::seconds(5), {100, 60}}});
  CHECK(k.position_at(SimTime::zero()) == Vec2{0, 0});
  CHECK(k.position_at(SimTime::seconds(3)) == Vec2{50, 25});
  CHECK(k.position_at(SimTime::millis(4500)) == Vec2{100, 55});
  CHECK(k.position_at(SimTime::seconds(100)) == Vec2{100, 60});
  CHECK_THROWS_AS(NodeKinematics({Waypoint{SimTime::seconds(1), {}}, Waypoint{SimTime::seconds(1), {}}}),
                  comonet::ScenarioError);
  CHECK_THROWS_AS(NodeKinematics({}), comonet::ScenarioError);
}

TEST_CASE("neighbour sets of a 90 m line match brute force") {
  Net n;
  const int count = 12;
  for (int i = 0; i < count; ++i) n.topo.add_node(addr(i), NodeKinematics::stationary({90.0 * i, 0}));
  for (int i = 0; i < count; ++i) {
    std::vector<comonet::CommunityAddress> expect;
    for (int j = 0; j < count; ++j) {
      if (j != i && std::abs(90.0 * (i - j)) <= 100.0) expect.push_back(addr(j));
    }
    CHECK(n.topo.neighbors(addr(i), SimTime::zero()) == expect);
    CHECK(expect.size() == ((i == 0 || i == count - 1) ? 1u : 2u));
  }
  CHECK(n.topo.adjacency(SimTime::zero()).size() == count - 1);
}

TEST_CASE("range boundary is inclusive and mode selects the range") {
  comonet::LinkModel bt;
  bt.mode = comonet::AdHocMode::kBluetooth;
  Net w, b(bt);
  for (auto* n : {&w, &b}) {
    n->topo.add_node(addr(0), NodeKinematics::stationary({0, 0}));
    n->topo.add_node(addr(1), NodeKinematics::stationary({10, 0}));
    n->topo.add_node(addr(2), NodeKinematics::stationary({100, 0}));
  }
  CHECK(w.topo.in_range(addr(0), addr(2), SimTime::zero()));
  CHECK(b.topo.in_range(addr(0), addr(1), SimTime::zero()));
  CHECK_FALSE(b.topo.in_range(addr(0), addr(2), SimTime::zero()));
  CHECK_FALSE(w.topo.in_range(addr(0), addr(0), SimTime::zero()));
  CHECK_THROWS_AS(w.topo.position_of(addr(9), SimTime::zero()), comonet::ScenarioError);
}

TEST_CASE("unicast latency stays in mean +- jitter, out-of-range is dropped") {
  Net n;
  n.topo.add_node(addr(0), NodeKinematics::stationary({0, 0}));
  n.topo.add_node(addr(1), NodeKinematics::stationary({50, 0}));
  n.topo.add_node(addr(2), NodeKinematics::stationary({500, 0}));
  for (int i = 0; i < 200; ++i) {
    n.engine.schedule(SimTime::millis(10 * i), [&] { n.topo.unicast(addr(0), addr(1), probe()); });
  }
  n.engine.run_until(SimTime::seconds(10));
  REQUIRE(n.delivered.size() == 200);
  for (std::size_t i = 0; i < n.delivered.size(); ++i) {
    const auto lat = n.delivered[i].first - SimTime::millis(10 * static_cast<std::int64_t>(i));
    CHECK(lat >= SimTime::millis(3));
    CHECK(lat <= SimTime::millis(7));
  }
  CHECK_FALSE(n.topo.unicast(addr(0), addr(2), probe()));
  CHECK(n.drops == std::vector<DropReason>{DropReason::kOutOfRange});
}

TEST_CASE("degenerate loss probabilities") {
  for (double p : {0.0, 1.0}) {
    comonet::LinkModel m;
    m.adhoc.loss_probability = p;
    Net n(m);
    n.topo.add_node(addr(0), NodeKinematics::stationary({0, 0}));
    n.topo.add_node(addr(1), NodeKinematics::stationary({50, 0}));
    int ok = 0;
    for (int i = 0; i < 500; ++i) ok += n.topo.unicast(addr(0), addr(1), probe()) ? 1 : 0;
    CHECK(ok == (p == 0.0 ? 500 : 0));
  }
}

TEST_CASE("radio loss rate is binomial within 3 sigma") {
  comonet::LinkModel m;
  m.adhoc.loss_probability = 0.1;
  Net n(m, 99);
  n.topo.add_node(addr(0), NodeKinematics::stationary({0, 0}));
  n.topo.add_node(addr(1), NodeKinematics::stationary({50, 0}));
  const int trials = 20000;
  int lost = 0;
  for (int i = 0; i < trials; ++i) lost += n.topo.unicast(addr(0), addr(1), probe()) ? 0 : 1;
  const double sd = std::sqrt(trials * 0.1 * 0.9);
  CHECK(std::abs(lost - trials * 0.1) < 3 * sd);
}

TEST_CASE("broadcast reaches every neighbour once") {
  Net n;
  n.topo.add_node(addr(0), NodeKinematics::stationary({0, 0}));
  n.topo.add_node(addr(1), NodeKinematics::stationary({60, 0}));
  n.topo.add_node(addr(2), NodeKinematics::stationary({0, 60}));
  n.topo.add_node(addr(3), NodeKinematics::stationary({300, 0}));
  CHECK(n.topo.broadcast(addr(0), probe()) == 2);
  n.engine.run_until(SimTime::seconds(1));
  CHECK(n.delivered.size() == 2);
}

TEST_CASE("GSM channels become usable after the setup time") {
  Net n;
  n.topo.add_node(addr(0), NodeKinematics::stationary({0, 0}));
  n.topo.add_node(addr(1), NodeKinematics::stationary({5000, 0}));
  n.topo.add_node(addr(2), NodeKinematics::stationary({0, 0}), false);
  CHECK_FALSE(n.topo.open_gsm(addr(0), addr(2)).has_value());
  const auto ch = n.topo.open_gsm(addr(0), addr(1));
  REQUIRE(ch.has_value());
  CHECK(ch->usable_at == SimTime::seconds(10));
  CHECK_FALSE(n.topo.gsm_send(ch->id, addr(0), probe()));
  n.engine.run_until(SimTime::seconds(10));
  CHECK(n.topo.gsm_usable(ch->id));
  CHECK(n.topo.gsm_send(ch->id, addr(0), probe()));
  n.engine.run_until(SimTime::seconds(11));
  REQUIRE(n.delivered.size() == 1);
  CHECK(n.delivered[0] == std::pair{SimTime::micros(10'110'000), addr(1)});
  n.topo.close_gsm(ch->id);
  CHECK_FALSE(n.topo.gsm_send(ch->id, addr(1), probe()));
  CHECK(n.drops == std::vector<DropReason>{DropReason::kGsmNotReady, DropReason::kGsmClosed});
}
