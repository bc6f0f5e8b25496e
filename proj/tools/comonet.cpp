// comonet: run community-network call scenarios and map phone numbers to
// community addresses.
//
//   comonet run <scenario> [--seed N | --seeds N..M] [--out FILE]
//               [--format table|csv] [--trace FILE]
//   comonet addr encode <number>
//   comonet addr decode <a.b.c.d>
//
// Exit status: 0 success, 1 validation error, 2 usage error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "comonet/address.hpp"
#include "comonet/metrics.hpp"
#include "comonet/report.hpp"
#include "comonet/scenario.hpp"
#include "comonet/simulation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kUsage = 2;

std::vector<std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw comonet::UsageError("--seeds expects N..M");
  const auto lo = static_cast<std::uint64_t>(comonet::parse_fixed(s.substr(0, dots), 0));
  const auto hi = static_cast<std::uint64_t>(comonet::parse_fixed(s.substr(dots + 2), 0));
  if (hi < lo) throw comonet::UsageError("--seeds range is empty");
  if (hi - lo >= 10000) throw comonet::UsageError("--seeds range too large");
  std::vector<std::uint64_t> out;
  for (auto v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

bool write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community mobile network call simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and print its QoS report");
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out_path;
  std::string format = "table";
  std::string trace_path;
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--seeds", seeds, "Batch over seeds N..M (inclusive)")->excludes(seed_opt);
  run->add_option("--out", out_path, "Write the report to FILE instead of stdout");
  run->add_option("--format", format, "table or csv");
  run->add_option("--trace", trace_path, "Write the event trace to FILE");

  auto* addr = app.add_subcommand("addr", "Phone number <-> community address");
  addr->require_subcommand(1);
  std::string prefix = "07";
  addr->add_option("--prefix", prefix, "Common leading digit group");
  std::string encode_value, decode_value;
  auto* enc = addr->add_subcommand("encode", "Phone number to address");
  enc->add_option("number", encode_value)->required();
  auto* dec = addr->add_subcommand("decode", "Address to phone number");
  dec->add_option("address", decode_value)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*addr) {
    try {
      const comonet::AddressCodec codec(prefix);
      if (*enc) {
        fmt::print("{}\n", codec.encode(encode_value).str());
      } else {
        fmt::print("{}\n", codec.decode(comonet::parse_community_address(decode_value)).digits());
      }
      return kOk;
    } catch (const comonet::AddressError& e) {
      fmt::print(stderr, "error: {}\n", e.what());
      return kValidation;
    }
  }

  comonet::ReportFormat fmt_kind;
  std::vector<std::uint64_t> seed_list;
  try {
    fmt_kind = comonet::parse_report_format(format);
    if (!seeds.empty()) seed_list = parse_seed_range(seeds);
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kUsage;
  }

  comonet::Scenario sc;
  try {
    sc = comonet::load_scenario(scenario_path);
  } catch (const comonet::ScenarioValidationError& e) {
    for (const auto& d : e.diagnostics()) {
      fmt::print(stderr, "{}\n", comonet::format_diagnostic(e.origin(), d));
    }
    return kValidation;
  }
  if (seed_list.empty()) seed_list.push_back(seed.value_or(sc.seed));

  const bool want_trace = !trace_path.empty();
  const auto runs = comonet::run_batch(sc, seed_list, want_trace);
  const std::string text = comonet::render_report(comonet::build_report(runs), fmt_kind);

  if (want_trace) {
    std::string all;
    for (const auto& r : runs) {
      all += fmt::format("# seed {}\n", r.seed);
      all += r.trace;
    }
    if (!write_file(trace_path, all)) {
      fmt::print(stderr, "error: cannot write {}\n", trace_path);
      return kUsage;
    }
  }
  if (out_path.empty()) {
    fmt::print("{}", text);
  } else if (!write_file(out_path, text)) {
    fmt::print(stderr, "error: cannot write {}\n", out_path);
    return kUsage;
  }
  return kOk;
}
