#include "comonet/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace comonet {

DelaySum compute_delay(std::span<const PacketLog* const> logs) {
  DelaySum d;
  for (const PacketLog* log : logs) {
    for (const auto& r : log->records()) {
      if (r.fate != Fate::kPlayed) continue;
      d.total_us += (*r.played_at - r.sent_at).us();
      ++d.count;
    }
  }
  return d;
}

JitterStats compute_jitter(const PacketLog& log) {
  std::vector<const PacketRecord*> arrived;
  for (const auto& r : log.records()) {
    if (r.arrived_at) arrived.push_back(&r);
  }
  std::sort(arrived.begin(), arrived.end(),
            [](const PacketRecord* a, const PacketRecord* b) { return a->arrival_order < b->arrival_order; });
  JitterStats s;
  double j = 0;
  for (std::size_t i = 1; i < arrived.size(); ++i) {
    const std::int64_t prev = (*arrived[i - 1]->arrived_at - arrived[i - 1]->sent_at).us();
    const std::int64_t cur = (*arrived[i]->arrived_at - arrived[i]->sent_at).us();
    const double d = std::abs(static_cast<double>(cur - prev));
    j += (d - j) * kJitterGain;
    s.sum_us += j;
    ++s.updates;
  }
  s.final_us = j;
  return s;
}

JitterStats compute_jitter(std::span<const PacketLog* const> logs) {
  JitterStats total;
  for (const PacketLog* log : logs) {
    const JitterStats s = compute_jitter(*log);
    total.sum_us += s.sum_us;
    total.updates += s.updates;
    total.final_us = std::max(total.final_us, s.final_us);
  }
  return total;
}

LossStats compute_loss(std::span<const PacketLog* const> logs) {
  LossStats l;
  for (const PacketLog* log : logs) {
    const Conservation c = log->conservation();
    l.sent += c.sent;
    l.played += c.played;
  }
  return l;
}

RecommendationFlags check_recommendations(const CallQos& q, const Recommendation& rec) {
  RecommendationFlags f;
  if (q.delay_ms) f.delay_ok = *q.delay_ms <= rec.max_delay_ms;
  if (q.jitter_ms) f.jitter_ok = *q.jitter_ms <= rec.max_jitter_ms;
  if (q.loss) f.loss_ok = *q.loss <= rec.max_loss;
  return f;
}

CallQos evaluate_call(const CallRecord& call) {
  const PacketLog* logs[] = {&call.to_callee, &call.to_caller};
  CallQos q;
  q.label = call.label;
  q.delay_ms = compute_delay(logs).mean_ms();
  q.jitter_ms = compute_jitter(logs).mean_ms();
  q.loss = compute_loss(logs).ratio();
  if (call.established_at) q.setup_s = (*call.established_at - call.dialed_at).sec();
  for (const PacketLog* log : logs) {
    const Conservation c = log->conservation();
    q.breakdown.sent += c.sent;
    q.breakdown.played += c.played;
    q.breakdown.lost_in_transit += c.lost_in_transit;
    q.breakdown.lost_at_playout += c.lost_at_playout;
    q.breakdown.duplicates += c.duplicates;
    q.breakdown.in_flight += c.in_flight;
  }
  q.failed = call.failed;
  q.timeline = call.timeline;
  return q;
}

namespace {

std::optional<double> mean_of(const std::vector<std::optional<double>>& xs) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

QosReport build_report(const std::vector<RunResult>& runs, const Recommendation& rec) {
  QosReport report;
  for (const auto& run : runs) {
    SeedReport sr;
    sr.seed = run.seed;
    for (const auto& c : run.calls) {
      CallQos q = evaluate_call(c);
      q.flags = check_recommendations(q, rec);
      sr.calls.push_back(std::move(q));
    }
    report.runs.push_back(std::move(sr));
  }
  if (report.runs.empty()) return report;
  const std::size_t ncalls = report.runs.front().calls.size();
  for (std::size_t i = 0; i < ncalls; ++i) {
    std::vector<std::optional<double>> delay, jitter, loss, setup;
    CallQos m;
    m.label = report.runs.front().calls[i].label;
    for (const auto& sr : report.runs) {
      const CallQos& q = sr.calls[i];
      delay.push_back(q.delay_ms);
      jitter.push_back(q.jitter_ms);
      loss.push_back(q.loss);
      setup.push_back(q.setup_s);
      m.breakdown.sent += q.breakdown.sent;
      m.breakdown.played += q.breakdown.played;
      m.breakdown.lost_in_transit += q.breakdown.lost_in_transit;
      m.breakdown.lost_at_playout += q.breakdown.lost_at_playout;
      m.breakdown.duplicates += q.breakdown.duplicates;
      m.breakdown.in_flight += q.breakdown.in_flight;
      m.failed = m.failed || q.failed;
    }
    m.delay_ms = mean_of(delay);
    m.jitter_ms = mean_of(jitter);
    m.loss = mean_of(loss);
    m.setup_s = mean_of(setup);
    m.flags = check_recommendations(m, rec);
    report.mean.push_back(std::move(m));
  }
  return report;
}

}  // namespace comonet
