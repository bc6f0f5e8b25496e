#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "comonet/address.hpp"
#include "comonet/call.hpp"
#include "comonet/router.hpp"
#include "comonet/topology.hpp"

namespace comonet {

struct NodeSpec {
  std::string number;
  CommunityAddress address;
  std::vector<Waypoint> waypoints;
  bool gsm_coverage = true;
  bool busy = false;
  int line = 0;
};

struct CallSpec {
  std::string label;
  std::string caller;
  std::string callee;
  SimTime dial_at;
  SimTime hangup_at;
  int line = 0;
};

/// A fully validated experiment description.
struct Scenario {
  std::uint64_t seed = 1;
  SimTime horizon;
  std::string common_prefix = "07";
  LinkModel link;
  RoutingConfig routing;
  SessionConfig session;
  std::vector<NodeSpec> nodes;
  std::vector<CallSpec> calls;

  const NodeSpec* node(std::string_view number) const;
};

struct Diagnostic {
  int line = 0;        // 0 when not tied to a line
  std::string where;   // section/key or call/node identification
  std::string message;
};

std::string format_diagnostic(std::string_view origin, const Diagnostic& d);

/// Every problem found in a scenario, not just the first.
class ScenarioValidationError : public std::runtime_error {
 public:
  ScenarioValidationError(std::string origin, std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<Diagnostic> diagnostics_;
};

/// Parses the sectioned key/value + table format described in
/// docs/formats.md. Throws ScenarioValidationError listing all errors.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<input>");
Scenario load_scenario(const std::filesystem::path& path);

/// Parses a non-negative decimal with at most `decimals` fractional digits
/// into an integer scaled by 10^decimals ("1.5", 3 -> 1500). Throws
/// std::invalid_argument.
std::int64_t parse_fixed(std::string_view text, int decimals);

}  // namespace comonet
