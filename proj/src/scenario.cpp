#include "comonet/scenario.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace comonet {

const NodeSpec* Scenario::node(std::string_view number) const {
  for (const auto& n : nodes) {
    if (n.number == number) return &n;
  }
  return nullptr;
}

std::string format_diagnostic(std::string_view origin, const Diagnostic& d) {
  if (d.line > 0) return fmt::format("{}:{}: {}: {}", origin, d.line, d.where, d.message);
  return fmt::format("{}: {}: {}", origin, d.where, d.message);
}

namespace {

std::string join(std::string_view origin, const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += '\n';
    out += format_diagnostic(origin, d);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("'{}' is not a number", s));
  }
  return v;
}

bool parse_flag(std::string_view s) {
  if (s == "yes" || s == "true" || s == "1") return true;
  if (s == "no" || s == "false" || s == "0") return false;
  throw std::invalid_argument(fmt::format("'{}' is not yes/no", s));
}

SimTime seconds_field(std::string_view s) { return SimTime::micros(parse_fixed(s, 6)); }
SimTime millis_field(std::string_view s) { return SimTime::micros(parse_fixed(s, 3)); }

class Parser {
 public:
  explicit Parser(std::string_view origin) : origin_(origin) {}

  Scenario run(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string_view s = raw;
      if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        section_line(line, s);
        continue;
      }
      if (section_.empty()) {
        error(line, "file", "content before the first [section]");
      } else if (section_ == "nodes") {
        node_row(line, s);
      } else if (section_ == "calls") {
        call_row(line, s);
      } else if (known_section_) {
        key_value(line, s);
      }
    }
    finish();
    if (!diags_.empty()) throw ScenarioValidationError(std::string(origin_), std::move(diags_));
    return std::move(sc_);
  }

 private:
  void error(int line, std::string where, std::string msg) {
    diags_.push_back(Diagnostic{line, std::move(where), std::move(msg)});
  }

  void section_line(int line, std::string_view s) {
    if (s.back() != ']') {
      error(line, "section", fmt::format("malformed section header '{}'", s));
      known_section_ = false;
      return;
    }
    section_ = std::string(trim(s.substr(1, s.size() - 2)));
    static const std::set<std::string> known{"scenario", "link", "protocol", "nodes", "calls"};
    known_section_ = known.contains(section_);
    if (!known_section_) error(line, "section", fmt::format("unknown section [{}]", section_));
    if (!sections_seen_.insert(section_).second) {
      error(line, "section", fmt::format("section [{}] appears twice", section_));
    }
  }

  void key_value(int line, std::string_view s) {
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      error(line, section_, fmt::format("expected 'key = value', got '{}'", s));
      return;
    }
    const std::string key(trim(s.substr(0, eq)));
    const std::string_view value = trim(s.substr(eq + 1));
    const std::string where = fmt::format("[{}] {}", section_, key);
    if (!keys_seen_.insert(section_ + "." + key).second) {
      error(line, where, "key given twice");
      return;
    }
    if (value.empty()) {
      error(line, where, "missing value");
      return;
    }
    try {
      if (!assign(key, value)) error(line, where, "unknown key");
    } catch (const std::exception& e) {
      error(line, where, e.what());
    }
  }

  bool assign(const std::string& key, std::string_view v) {
    auto& link = sc_.link;
    auto& rt = sc_.routing;
    auto& ss = sc_.session;
    if (section_ == "scenario") {
      if (key == "seed") {
        std::uint64_t seed = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
        if (ec != std::errc{} || p != v.data() + v.size()) {
          throw std::invalid_argument(fmt::format("'{}' is not an unsigned integer", v));
        }
        sc_.seed = seed;
      } else if (key == "horizon_s") {
        sc_.horizon = seconds_field(v);
        has_horizon_ = true;
      } else if (key == "mode") {
        if (v == "wlan") link.mode = AdHocMode::kWlan;
        else if (v == "bluetooth") link.mode = AdHocMode::kBluetooth;
        else throw std::invalid_argument(fmt::format("mode must be wlan or bluetooth, got '{}'", v));
      } else if (key == "common_prefix") {
        AddressCodec check{std::string(v)};
        sc_.common_prefix = check.common_prefix();
      } else {
        return false;
      }
      return true;
    }
    if (section_ == "link") {
      if (key == "wlan_range_m") link.adhoc.wlan_range_m = parse_double(v);
      else if (key == "bluetooth_range_m") link.adhoc.bluetooth_range_m = parse_double(v);
      else if (key == "latency_ms") link.adhoc.latency_mean = millis_field(v);
      else if (key == "jitter_ms") link.adhoc.latency_jitter = millis_field(v);
      else if (key == "loss") link.adhoc.loss_probability = parse_double(v);
      else if (key == "gsm_setup_s") link.gsm.setup_time = seconds_field(v);
      else if (key == "gsm_delay_ms") link.gsm.one_way_delay = millis_field(v);
      else if (key == "gsm_loss") link.gsm.loss_probability = parse_double(v);
      else if (key == "busy_delay_ms") rt.busy_forwarding_delay = millis_field(v);
      else return false;
      return true;
    }
    if (section_ == "protocol") {
      if (key == "heartbeat_interval_ms") rt.heartbeat_interval = millis_field(v);
      else if (key == "miss_threshold") rt.miss_threshold = static_cast<int>(parse_fixed(v, 0));
      else if (key == "discovery_timeout_ms") rt.discovery_timeout = millis_field(v);
      else if (key == "monitor_interval_ms") ss.monitor_interval = millis_field(v);
      else if (key == "playout_depth_ms") ss.playout_depth = millis_field(v);
      else if (key == "frame_interval_ms") ss.frame_interval = millis_field(v);
      else if (key == "payload_bytes") {
        const auto b = parse_fixed(v, 0);
        if (b < 1 || b > 65535) throw std::invalid_argument("payload_bytes must be in 1..65535");
        ss.payload_size = static_cast<std::uint16_t>(b);
      } else {
        return false;
      }
      return true;
    }
    return false;
  }

  void node_row(int line, std::string_view s) {
    const auto cols = split_ws(s);
    if (cols.size() < 4) {
      error(line, "[nodes]", "expected: number gsm busy waypoint...");
      return;
    }
    NodeSpec n;
    n.number = std::string(cols[0]);
    n.line = line;
    const std::string where = fmt::format("node {}", n.number);
    bool ok = true;
    try {
      n.gsm_coverage = parse_flag(cols[1]);
    } catch (const std::exception& e) {
      error(line, where, fmt::format("gsm column: {}", e.what()));
      ok = false;
    }
    try {
      n.busy = parse_flag(cols[2]);
    } catch (const std::exception& e) {
      error(line, where, fmt::format("busy column: {}", e.what()));
      ok = false;
    }
    for (std::size_t i = 3; i < cols.size(); ++i) {
      try {
        n.waypoints.push_back(waypoint(cols[i]));
      } catch (const std::exception& e) {
        error(line, where, fmt::format("waypoint '{}': {}", cols[i], e.what()));
        ok = false;
      }
    }
    if (ok) {
      try {
        NodeKinematics check(n.waypoints);
      } catch (const std::exception& e) {
        error(line, where, e.what());
      }
    }
    nodes_.push_back(std::move(n));
  }

  static Waypoint waypoint(std::string_view tok) {
    const auto at = tok.find('@');
    const auto comma = tok.find(',');
    if (at == std::string_view::npos || comma == std::string_view::npos || comma < at) {
      throw std::invalid_argument("expected t_s@x_m,y_m");
    }
    return Waypoint{seconds_field(tok.substr(0, at)),
                    Vec2{parse_double(tok.substr(at + 1, comma - at - 1)),
                         parse_double(tok.substr(comma + 1))}};
  }

  void call_row(int line, std::string_view s) {
    const auto cols = split_ws(s);
    if (cols.size() != 5) {
      error(line, "[calls]", "expected: label caller callee dial_s hangup_s");
      return;
    }
    CallSpec c;
    c.label = std::string(cols[0]);
    c.caller = std::string(cols[1]);
    c.callee = std::string(cols[2]);
    c.line = line;
    const std::string where = fmt::format("call '{}'", c.label);
    try {
      c.dial_at = seconds_field(cols[3]);
      c.hangup_at = seconds_field(cols[4]);
    } catch (const std::exception& e) {
      error(line, where, e.what());
      return;
    }
    calls_.push_back(std::move(c));
  }

  void finish() {
    if (!has_horizon_) error(0, "[scenario] horizon_s", "required key missing");
    try {
      sc_.link.validate();
    } catch (const std::exception& e) {
      error(0, "[link]", e.what());
    }
    try {
      sc_.session.validate();
    } catch (const std::exception& e) {
      error(0, "[protocol]", e.what());
    }
    if (sc_.routing.miss_threshold < 1) error(0, "[protocol] miss_threshold", "must be >= 1");
    if (sc_.routing.heartbeat_interval <= SimTime::zero()) {
      error(0, "[protocol] heartbeat_interval_ms", "must be > 0");
    }
    if (sc_.routing.discovery_timeout <= SimTime::zero()) {
      error(0, "[protocol] discovery_timeout_ms", "must be > 0");
    }

    const AddressCodec codec(sc_.common_prefix);
    std::set<std::string> numbers;
    for (auto& n : nodes_) {
      const std::string where = fmt::format("node {}", n.number);
      try {
        n.address = codec.encode(n.number);
      } catch (const AddressError& e) {
        error(n.line, where, fmt::format("invalid phone number: {}", e.what()));
      }
      if (!numbers.insert(n.number).second) error(n.line, where, "declared twice");
    }
    if (nodes_.empty()) error(0, "[nodes]", "no nodes declared");

    std::set<std::string> labels;
    std::map<std::string, std::vector<const CallSpec*>> by_node;
    for (const auto& c : calls_) {
      const std::string where = fmt::format("call '{}'", c.label);
      if (!labels.insert(c.label).second) error(c.line, where, "label used twice");
      if (!numbers.contains(c.caller)) {
        error(c.line, where, fmt::format("caller {} is not a declared node", c.caller));
      }
      if (!numbers.contains(c.callee)) {
        error(c.line, where, fmt::format("callee {} is not a declared node", c.callee));
      }
      if (c.caller == c.callee) error(c.line, where, "caller and callee are the same node");
      if (!(c.dial_at < c.hangup_at)) error(c.line, where, "dial_s must be before hangup_s");
      if (has_horizon_ && c.hangup_at > sc_.horizon) {
        error(c.line, where, "hangup_s is after the scenario horizon");
      }
      by_node[c.caller].push_back(&c);
      by_node[c.callee].push_back(&c);
    }
    for (const auto& [number, cs] : by_node) {
      for (std::size_t i = 0; i < cs.size(); ++i) {
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
          if (cs[i]->dial_at < cs[j]->hangup_at && cs[j]->dial_at < cs[i]->hangup_at) {
            error(cs[j]->line, fmt::format("call '{}'", cs[j]->label),
                  fmt::format("node {} is already in call '{}' at that time", number, cs[i]->label));
          }
        }
      }
    }
    sc_.nodes = std::move(nodes_);
    sc_.calls = std::move(calls_);
  }

  std::string_view origin_;
  Scenario sc_;
  std::vector<NodeSpec> nodes_;
  std::vector<CallSpec> calls_;
  std::vector<Diagnostic> diags_;
  std::string section_;
  bool known_section_ = false;
  bool has_horizon_ = false;
  std::set<std::string> sections_seen_;
  std::set<std::string> keys_seen_;
};

}  // namespace

ScenarioValidationError::ScenarioValidationError(std::string origin, std::vector<Diagnostic> ds)
    : std::runtime_error(join(origin, ds)), origin_(std::move(origin)), diagnostics_(std::move(ds)) {}

std::int64_t parse_fixed(std::string_view text, int decimals) {
  if (text.empty()) throw std::invalid_argument("empty number");
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument(fmt::format("'{}' is not a decimal number", text));
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') {
      throw std::invalid_argument(fmt::format("'{}' is not a non-negative decimal number", text));
    }
    any_digit = true;
    if (seen_dot) {
      if (++frac_digits > decimals) {
        throw std::invalid_argument(fmt::format("'{}' has more than {} decimal places", text, decimals));
      }
      frac = frac * 10 + (c - '0');
    } else {
      if (whole > (INT64_MAX / 10) / 1000000) {
        throw std::invalid_argument(fmt::format("'{}' is too large", text));
      }
      whole = whole * 10 + (c - '0');
    }
  }
  if (!any_digit) throw std::invalid_argument(fmt::format("'{}' is not a decimal number", text));
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  for (int i = frac_digits; i < decimals; ++i) frac *= 10;
  return whole * scale + frac;
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  return Parser(origin).run(text);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioValidationError(path.string(), {Diagnostic{0, "file", "cannot open file"}});
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

}  // namespace comonet
