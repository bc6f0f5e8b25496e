#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "comonet/packet_log.hpp"
#include "comonet/simulation.hpp"

namespace comonet {

/// Smoothing gain of the interarrival jitter estimator.
inline constexpr double kJitterGain = 1.0 / 16.0;

/// Exact mouth-to-ear delay aggregate: sum and count of
/// (played_at - sent_at) over played packets.
struct DelaySum {
  std::int64_t total_us = 0;
  std::uint64_t count = 0;
  std::optional<double> mean_ms() const {
    if (count == 0) return std::nullopt;
    return static_cast<double>(total_us) / static_cast<double>(count) / 1e3;
  }
};

/// Interarrival jitter over received packets in arrival order. For each
/// packet after the first, D = transit_i - transit_{i-1} and
/// J += (|D| - J) / 16, starting from J = 0.
struct JitterStats {
  double final_us = 0;   // J after the last packet
  double sum_us = 0;     // sum of J over every update
  std::uint64_t updates = 0;
  std::optional<double> mean_ms() const {
    if (updates == 0) return std::nullopt;
    return sum_us / static_cast<double>(updates) / 1e3;
  }
  std::optional<double> final_ms() const {
    if (updates == 0) return std::nullopt;
    return final_us / 1e3;
  }
};

struct LossStats {
  std::uint64_t sent = 0;
  std::uint64_t played = 0;
  std::optional<double> ratio() const {
    if (sent == 0) return std::nullopt;
    return static_cast<double>(sent - played) / static_cast<double>(sent);
  }
};

DelaySum compute_delay(std::span<const PacketLog* const> logs);
JitterStats compute_jitter(const PacketLog& log);
/// Per-log estimators; the update samples are pooled.
JitterStats compute_jitter(std::span<const PacketLog* const> logs);
LossStats compute_loss(std::span<const PacketLog* const> logs);

/// ITU-T Y.1541-style targets used as the "recommended" column.
struct Recommendation {
  double max_delay_ms = 100.0;
  double max_jitter_ms = 50.0;
  double max_loss = 0.001;
};

struct RecommendationFlags {
  std::optional<bool> delay_ok;
  std::optional<bool> jitter_ok;
  std::optional<bool> loss_ok;
};

struct CallQos {
  std::string label;
  std::optional<double> delay_ms;
  std::optional<double> jitter_ms;
  std::optional<double> loss;
  std::optional<double> setup_s;
  Conservation breakdown;  // both directions summed
  bool failed = false;
  std::vector<PhaseChange> timeline;
  RecommendationFlags flags;
};

RecommendationFlags check_recommendations(const CallQos& q, const Recommendation& rec = {});

struct SeedReport {
  std::uint64_t seed = 0;
  std::vector<CallQos> calls;
};

struct QosReport {
  std::vector<SeedReport> runs;
  /// Per call, the mean over seeds of each defined value.
  std::vector<CallQos> mean;
};

CallQos evaluate_call(const CallRecord& call);
QosReport build_report(const std::vector<RunResult>& runs, const Recommendation& rec = {});

}  // namespace comonet
