#include "comonet/simulation.hpp"

#include <fmt/format.h>
#include <future>

namespace comonet {

Simulation::Simulation(const Scenario& scenario, std::uint64_t seed, bool trace)
    : scenario_(scenario), seed_(seed), horizon_(scenario.horizon) {
  engine_.trace().enable(trace);
  topology_ = std::make_unique<Topology>(engine_, scenario.link, RandomStream::derive(seed, "link"),
                                         RandomStream::derive(seed, "gsm"));
  for (const auto& n : scenario.nodes) {
    topology_->add_node(n.address, NodeKinematics(n.waypoints), n.gsm_coverage);
    auto r = std::make_unique<Router>(engine_, *topology_, n.address, scenario.routing, n.busy,
                                      RandomStream::derive(seed, "busy:" + n.address.str()));
    wire(*r);
    routers_.emplace(n.address, std::move(r));
    numbers_.emplace(n.number, n.address);
  }
  topology_->set_deliver([this](CommunityAddress to, CommunityAddress from, const Message& m) {
    if (engine_.trace().enabled()) {
      engine_.trace().line(engine_.now(), to.str(), fmt::format("rx {} from {}", describe(m), from.str()));
    }
    routers_.at(to)->receive(from, m);
  });
  topology_->set_drop_observer(
      [this](CommunityAddress from, CommunityAddress to, const Message& m, DropReason why) {
        if (engine_.trace().enabled()) {
          engine_.trace().line(engine_.now(), from.str(),
                               fmt::format("lost {} to {} ({})", describe(m), to.str(), to_string(why)));
        }
        if (const auto* pkt = std::get_if<MediaPacket>(&m)) {
          if (Call* c = find_call(*pkt)) c->on_media_dropped(*pkt, why);
        }
      });
  for (const auto& c : scenario.calls) {
    auto call = std::make_unique<Call>(c.label, engine_, *topology_, router(c.caller), router(c.callee),
                                       scenario.session);
    call->schedule(c.dial_at, c.hangup_at);
    calls_.push_back(std::move(call));
  }
}

void Simulation::wire(Router& r) {
  const CommunityAddress self = r.self();
  Router::Hooks h;
  h.discovery_done = [this, self](CommunityAddress target, const std::optional<PathReply>& rep) {
    for (auto& c : calls_) {
      if (c->caller() == self && c->callee() == target && c->live()) c->on_discovery(rep);
    }
  };
  h.path_lost = [this, self](const PathId& path, CommunityAddress) {
    for (auto& c : calls_) {
      if (c->caller() == self && c->callee() == path.target) c->on_path_lost(path);
    }
  };
  h.media_arrived = [this](const MediaPacket& pkt, CommunityAddress) {
    if (Call* c = find_call(pkt)) c->on_media(pkt);
  };
  h.media_dropped = [this](const MediaPacket& pkt, DropReason why) {
    if (Call* c = find_call(pkt)) c->on_media_dropped(pkt, why);
  };
  r.set_hooks(std::move(h));
}

Call* Simulation::find_call(const MediaPacket& pkt) {
  // Calls sharing a node never overlap in time, so the capture instant
  // identifies the call.
  for (auto& c : calls_) {
    if (c->caller() == pkt.caller && c->callee() == pkt.callee &&
        pkt.media_timestamp >= c->dialed_at() && pkt.media_timestamp < c->hangup_at()) {
      return c.get();
    }
  }
  return nullptr;
}

Router& Simulation::router(CommunityAddress a) {
  auto it = routers_.find(a);
  if (it == routers_.end()) throw ScenarioError(fmt::format("unknown node {}", a.str()));
  return *it->second;
}

CommunityAddress Simulation::address_of(std::string_view number) const {
  auto it = numbers_.find(number);
  if (it == numbers_.end()) throw ScenarioError(fmt::format("unknown node {}", number));
  return it->second;
}

Call& Simulation::call(std::string_view label) {
  for (auto& c : calls_) {
    if (c->label() == label) return *c;
  }
  throw ScenarioError(fmt::format("unknown call '{}'", label));
}

RunResult Simulation::result() const {
  RunResult r;
  r.seed = seed_;
  r.horizon = horizon_;
  for (std::size_t i = 0; i < calls_.size(); ++i) {
    const Call& c = *calls_[i];
    const CallSpec& spec = scenario_.calls[i];
    CallRecord rec;
    rec.label = c.label();
    rec.caller_number = spec.caller;
    rec.callee_number = spec.callee;
    rec.failed = c.failed();
    rec.dialed_at = c.dialed_at();
    rec.hangup_at = c.hangup_at();
    rec.established_at = c.established_at();
    rec.timeline = c.timeline();
    rec.to_callee = c.log(Call::Direction::kToCallee);
    rec.to_caller = c.log(Call::Direction::kToCaller);
    rec.final_epoch = c.epoch();
    r.calls.push_back(std::move(rec));
  }
  r.trace = engine_.trace().text();
  return r;
}

RunResult run_scenario(const Scenario& scenario, std::uint64_t seed, bool trace) {
  Simulation sim(scenario, seed, trace);
  sim.run();
  return sim.result();
}

std::vector<RunResult> run_batch(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                 bool trace) {
  std::vector<std::future<RunResult>> jobs;
  jobs.reserve(seeds.size());
  for (auto seed : seeds) {
    jobs.push_back(std::async(std::launch::async,
                              [&scenario, seed, trace] { return run_scenario(scenario, seed, trace); }));
  }
  std::vector<RunResult> out;
  out.reserve(seeds.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace comonet
