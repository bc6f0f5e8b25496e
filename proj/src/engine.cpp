#include "comonet/engine.hpp"

#include <fmt/format.h>

namespace comonet {

std::string to_string(SimTime t) {
  const std::int64_t us = t.us();
  const char* sign = us < 0 ? "-" : "";
  const std::int64_t a = us < 0 ? -us : us;
  return fmt::format("{}{}.{:06d}", sign, a / 1000000, a % 1000000);
}

void Trace::line(SimTime t, std::string_view who, std::string_view what) {
  if (!enabled_) return;
  text_ += to_string(t);
  text_ += ' ';
  text_ += who;
  text_ += ' ';
  text_ += what;
  text_ += '\n';
}

EventHandle Engine::schedule(SimTime at, Handler fn, std::string label) {
  if (at < now_) {
    throw ClockError(fmt::format("event '{}' scheduled at {} s, before current clock {} s", label,
                                 to_string(at), to_string(now_)));
  }
  const Key key{at, next_seq_++};
  queue_.emplace(key, Entry{std::move(fn), std::move(label)});
  return EventHandle{key.at, key.seq};
}

bool Engine::cancel(const EventHandle& h) {
  if (!h.valid()) return false;
  return queue_.erase(Key{h.fire_at, h.seq}) > 0;
}

std::size_t Engine::run_until(SimTime t) {
  if (t < now_) {
    throw ClockError(fmt::format("run_until({}) is before current clock {}", to_string(t),
                                 to_string(now_)));
  }
  std::size_t count = 0;
  while (!queue_.empty()) {
    auto it = queue_.begin();
    if (it->first.at > t) break;
    now_ = it->first.at;
    Handler fn = std::move(it->second.fn);
    queue_.erase(it);
    ++count;
    ++dispatched_;
    fn();
  }
  now_ = t;
  return count;
}

}  // namespace comonet
