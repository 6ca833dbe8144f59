#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <queue>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace simlb {

// Simulated seconds.
using SimTime = double;

inline constexpr SimTime kForever = std::numeric_limits<SimTime>::infinity();

enum class EventKind : std::uint8_t {
  BatchArrival,
  TaskArrival,
  TaskCompletion,
  HourBoundary,
  SimulationEnd,
};

inline constexpr std::size_t kEventKindCount = 5;

std::string_view to_string(EventKind kind);

// Payload meaning depends on the kind:
//   BatchArrival:   primary = batch id
//   TaskArrival:    primary = task id
//   TaskCompletion: primary = task id, secondary = vm id
//   HourBoundary:   primary = hour index
//   SimulationEnd:  unused
struct SimEvent {
  SimTime time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::SimulationEnd;
  std::uint64_t primary = 0;
  std::uint64_t secondary = 0;
};

// Min-queue on (time, seq). Tracks the time of the last popped event so that
// scheduling into the past is rejected.
class EventQueue {
 public:
  // Returns the sequence number assigned to the event.
  std::uint64_t schedule(SimTime time, EventKind kind, std::uint64_t primary = 0,
                         std::uint64_t secondary = 0);

  // Drops a scheduled event; it will never be popped. Cancelling an unknown
  // or already popped seq is a no-op.
  void cancel(std::uint64_t seq);

  bool empty();
  std::size_t size() const { return live_.size(); }
  const SimEvent& top();
  SimEvent pop();

  SimTime now() const { return now_; }
  // Only moves the clock forward; used when a bounded run ends without events.
  void advance_to(SimTime time);

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void purge();

  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::unordered_set<std::uint64_t> live_;  // scheduled, not popped, not cancelled
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0.0;
};

// Single-threaded event loop dispatching to one handler per event kind.
class Simulator {
 public:
  using Handler = std::function<void(const SimEvent&)>;

  void on(EventKind kind, Handler handler);

  std::uint64_t schedule(SimTime time, EventKind kind, std::uint64_t primary = 0,
                         std::uint64_t secondary = 0) {
    return queue_.schedule(time, kind, primary, secondary);
  }

  void cancel(std::uint64_t seq) { queue_.cancel(seq); }

  // Processes every event with time <= until. Returns the number processed.
  std::uint64_t run(SimTime until = kForever);

  // Stops the current run() after the event being handled.
  void stop() { stopped_ = true; }

  SimTime now() const { return queue_.now(); }
  std::size_t pending() const { return queue_.size(); }

  // One line per processed event: time,seq,kind,payload.
  void set_trace(std::ostream* out) { trace_ = out; }

 private:
  EventQueue queue_;
  std::array<Handler, kEventKindCount> handlers_{};
  std::ostream* trace_ = nullptr;
  bool stopped_ = false;
};

void write_trace_line(std::ostream& out, const SimEvent& event);

}  // namespace simlb
