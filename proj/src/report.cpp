#include "comonet/report.hpp"

#include <fmt/format.h>

namespace comonet {

namespace {

std::string num(const std::optional<double>& v, int decimals) {
  if (!v) return "n/a";
  return fmt::format("{:.{}f}", *v, decimals);
}

std::string flag(const std::optional<bool>& f) {
  if (!f) return "n/a";
  return *f ? "PASS" : "FAIL";
}

std::string csv_row(std::string_view seed, const CallQos& q) {
  const Conservation& b = q.breakdown;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", seed, q.label,
                     num(q.delay_ms, 6), num(q.jitter_ms, 6), num(q.loss, 6), num(q.setup_s, 6),
                     flag(q.flags.delay_ok), flag(q.flags.jitter_ok), flag(q.flags.loss_ok), b.sent,
                     b.played, b.lost_in_transit, b.lost_at_playout, b.duplicates, b.in_flight,
                     q.failed ? 1 : 0);
}

std::string render_csv(const QosReport& r) {
  std::string out =
      "seed,call,delay_ms,jitter_ms,packet_loss,setup_s,delay_ok,jitter_ok,loss_ok,sent,played,"
      "lost_in_transit,lost_at_playout,duplicates,in_flight,failed\n";
  for (const auto& run : r.runs) {
    for (const auto& q : run.calls) out += csv_row(fmt::format("{}", run.seed), q);
  }
  for (const auto& q : r.mean) out += csv_row("mean", q);
  return out;
}

constexpr int kLabelWidth = 18;
constexpr int kColWidth = 12;

std::string grid_line(std::string_view name, const std::vector<std::string>& cells,
                      std::string_view recomd) {
  std::string out = fmt::format("{:<{}}", name, kLabelWidth);
  for (const auto& c : cells) out += fmt::format("{:<{}}", c, kColWidth);
  out += recomd;
  // No trailing spaces.
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out + "\n";
}

std::string render_table(const QosReport& r) {
  std::string out;
  if (r.runs.size() == 1) {
    out += fmt::format("QoS report, seed {}\n\n", r.runs.front().seed);
  } else {
    std::string seeds;
    for (const auto& run : r.runs) seeds += (seeds.empty() ? "" : " ") + fmt::format("{}", run.seed);
    out += fmt::format("QoS report, mean over {} seeds ({})\n\n", r.runs.size(), seeds);
  }
  std::vector<std::string> head, delay, jitter, loss, setup, fd, fj, fl;
  for (const auto& q : r.mean) {
    head.push_back(q.label);
    delay.push_back(num(q.delay_ms, 3));
    jitter.push_back(num(q.jitter_ms, 3));
    loss.push_back(num(q.loss, 3));
    setup.push_back(num(q.setup_s, 3));
    fd.push_back(flag(q.flags.delay_ok));
    fj.push_back(flag(q.flags.jitter_ok));
    fl.push_back(flag(q.flags.loss_ok));
  }
  const Recommendation rec;
  out += grid_line("", head, "Recomd");
  out += grid_line("Delay (ms)", delay, fmt::format("{:g}", rec.max_delay_ms));
  out += grid_line("Jitter (ms)", jitter, fmt::format("{:g}", rec.max_jitter_ms));
  out += grid_line("Packet loss", loss, fmt::format("{:g}", rec.max_loss));
  out += grid_line("Setup (s)", setup, "");
  out += grid_line("Delay vs Recomd", fd, "");
  out += grid_line("Jitter vs Recomd", fj, "");
  out += grid_line("Loss vs Recomd", fl, "");

  out += "\nPer seed\n";
  out += fmt::format("{:<8}{:<14}{:<12}{:<12}{:<12}{:<12}{}\n", "seed", "call", "delay_ms", "jitter_ms",
                     "loss", "setup_s", "sent/played/transit/late/dup/inflight");
  for (const auto& run : r.runs) {
    for (const auto& q : run.calls) {
      const Conservation& b = q.breakdown;
      out += fmt::format("{:<8}{:<14}{:<12}{:<12}{:<12}{:<12}{}/{}/{}/{}/{}/{}\n", run.seed, q.label,
                         num(q.delay_ms, 3), num(q.jitter_ms, 3), num(q.loss, 4), num(q.setup_s, 3),
                         b.sent, b.played, b.lost_in_transit, b.lost_at_playout, b.duplicates,
                         b.in_flight);
    }
  }

  out += "\nTransport timeline";
  out += r.runs.size() == 1 ? "\n" : fmt::format(" (seed {})\n", r.runs.front().seed);
  for (const auto& q : r.runs.front().calls) {
    out += fmt::format("{}:", q.label);
    for (const auto& pc : q.timeline) out += fmt::format(" {} {}", to_string(pc.at), to_string(pc.phase));
    if (q.failed) out += " (failed)";
    out += "\n";
  }
  return out;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::kTable;
  if (name == "csv") return ReportFormat::kCsv;
  throw UsageError(fmt::format("unknown report format '{}' (expected table or csv)", name));
}

std::string render_report(const QosReport& report, ReportFormat format) {
  if (report.runs.empty()) return {};
  return format == ReportFormat::kCsv ? render_csv(report) : render_table(report);
}

std::string render_report(const QosReport& report, std::string_view format) {
  return render_report(report, parse_report_format(format));
}

}  // namespace comonet
