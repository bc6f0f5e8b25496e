#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "comonet/metrics.hpp"

namespace comonet {

enum class ReportFormat { kTable, kCsv };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "table" or "csv"; anything else throws UsageError.
ReportFormat parse_report_format(std::string_view name);

/// Renders a report. Column order is always Delay, Jitter, Packet loss,
/// Setup. Undefined figures render as "n/a".
std::string render_report(const QosReport& report, ReportFormat format);
std::string render_report(const QosReport& report, std::string_view format);

}  // namespace comonet
