#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "comonet/sim_time.hpp"

namespace comonet {

/// Fatal scenario error: an attempt to move the clock backwards.
class ClockError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Returned by Engine::schedule; identifies one pending event.
struct EventHandle {
  SimTime fire_at;
  std::uint64_t seq = 0;
  bool valid() const { return seq != 0; }
};

/// Append-only text trace. Every line is "<time> <who> <what>".
class Trace {
 public:
  void enable(bool on) { enabled_ = on; }
  bool enabled() const { return enabled_; }
  void line(SimTime t, std::string_view who, std::string_view what);
  const std::string& text() const { return text_; }

 private:
  bool enabled_ = false;
  std::string text_;
};

/// Deterministic discrete-event engine.
///
/// Events are totally ordered by (fire_at, seq); seq is the insertion counter,
/// so two events at the same instant dispatch in the order they were
/// scheduled. Handlers run to completion on the calling thread and may
/// schedule or cancel further events.
class Engine {
 public:
  using Handler = std::function<void()>;

  Engine() = default;
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  SimTime now() const { return now_; }

  /// Throws ClockError if `at` precedes the current clock.
  EventHandle schedule(SimTime at, Handler fn, std::string label = {});
  EventHandle schedule_in(SimTime delay, Handler fn, std::string label = {}) {
    return schedule(now_ + delay, std::move(fn), std::move(label));
  }

  /// Returns false if the event already fired or was cancelled.
  bool cancel(const EventHandle& h);

  /// Dispatches every event with fire_at <= t, then sets the clock to t.
  std::size_t run_until(SimTime t);

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched_total() const { return dispatched_; }

  Trace& trace() { return trace_; }
  const Trace& trace() const { return trace_; }

 private:
  struct Key {
    SimTime at;
    std::uint64_t seq;
    auto operator<=>(const Key&) const = default;
  };
  struct Entry {
    Handler fn;
    std::string label;
  };

  SimTime now_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t dispatched_ = 0;
  std::map<Key, Entry> queue_;
  Trace trace_;
};

}  // namespace comonet

namespace comonet {

/// Invalid scenario input or a reference to something the scenario does not
/// declare.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace comonet
