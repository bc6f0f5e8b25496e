#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "comonet/call.hpp"
#include "comonet/engine.hpp"
#include "comonet/router.hpp"
#include "comonet/scenario.hpp"
#include "comonet/topology.hpp"

namespace comonet {

/// Raw outcome of one call in one run.
struct CallRecord {
  std::string label;
  std::string caller_number;
  std::string callee_number;
  bool failed = false;
  SimTime dialed_at;
  SimTime hangup_at;
  std::optional<SimTime> established_at;
  std::vector<PhaseChange> timeline;
  PacketLog to_callee;
  PacketLog to_caller;
  std::uint32_t final_epoch = 0;
};

struct RunResult {
  std::uint64_t seed = 0;
  SimTime horizon;
  std::vector<CallRecord> calls;
  std::string trace;
};

/// One scenario instantiated on its own engine.
///
/// Random streams are derived from the run seed per consumer ("link", "gsm",
/// "busy:<address>"), so changing one consumer's usage leaves the others'
/// draws untouched.
class Simulation {
 public:
  Simulation(const Scenario& scenario, std::uint64_t seed, bool trace = false);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  void run_until(SimTime t) { engine_.run_until(t); }
  void run() { engine_.run_until(horizon_); }

  Engine& engine() { return engine_; }
  Topology& topology() { return *topology_; }
  Router& router(CommunityAddress a);
  Router& router(std::string_view number) { return router(address_of(number)); }
  CommunityAddress address_of(std::string_view number) const;
  std::vector<std::unique_ptr<Call>>& calls() { return calls_; }
  Call& call(std::string_view label);

  RunResult result() const;

 private:
  Call* find_call(const MediaPacket& pkt);
  void wire(Router& r);

  const Scenario& scenario_;
  std::uint64_t seed_;
  SimTime horizon_;
  Engine engine_;
  std::unique_ptr<Topology> topology_;
  std::map<CommunityAddress, std::unique_ptr<Router>> routers_;
  std::map<std::string, CommunityAddress, std::less<>> numbers_;
  std::vector<std::unique_ptr<Call>> calls_;
};

RunResult run_scenario(const Scenario& scenario, std::uint64_t seed, bool trace = false);

/// Runs each seed on its own engine (in parallel) and returns results in
/// seed order.
std::vector<RunResult> run_batch(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                 bool trace = false);

}  // namespace comonet
