#include "simlb/event_queue.hpp"

#include <ostream>
#include <string>

#include "simlb/csv.hpp"
#include "simlb/error.hpp"

namespace simlb {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::BatchArrival:
      return "BatchArrival";
    case EventKind::TaskArrival:
      return "TaskArrival";
    case EventKind::TaskCompletion:
      return "TaskCompletion";
    case EventKind::HourBoundary:
      return "HourBoundary";
    case EventKind::SimulationEnd:
      return "SimulationEnd";
  }
  return "Unknown";
}

std::uint64_t EventQueue::schedule(SimTime time, EventKind kind, std::uint64_t primary,
                                   std::uint64_t secondary) {
  if (!(time >= now_)) {
    throw SchedulingInPast("event " + std::string(to_string(kind)) + " at t=" +
                           format_number(time) + " is before clock t=" + format_number(now_));
  }
  const std::uint64_t seq = next_seq_++;
  live_.insert(seq);
  heap_.push(SimEvent{time, seq, kind, primary, secondary});
  return seq;
}

void EventQueue::cancel(std::uint64_t seq) { live_.erase(seq); }

void EventQueue::purge() {
  while (!heap_.empty() && !live_.contains(heap_.top().seq)) heap_.pop();
}

bool EventQueue::empty() {
  purge();
  return heap_.empty();
}

const SimEvent& EventQueue::top() {
  purge();
  return heap_.top();
}

SimEvent EventQueue::pop() {
  purge();
  SimEvent event = heap_.top();
  heap_.pop();
  live_.erase(event.seq);
  now_ = event.time;
  return event;
}

void EventQueue::advance_to(SimTime time) {
  if (time > now_) now_ = time;
}

void Simulator::on(EventKind kind, Handler handler) {
  handlers_[static_cast<std::size_t>(kind)] = std::move(handler);
}

std::uint64_t Simulator::run(SimTime until) {
  stopped_ = false;
  std::uint64_t processed = 0;
  while (!stopped_ && !queue_.empty() && queue_.top().time <= until) {
    const SimEvent event = queue_.pop();
    if (trace_ != nullptr) write_trace_line(*trace_, event);
    const auto& handler = handlers_[static_cast<std::size_t>(event.kind)];
    if (!handler) {
      throw InvariantViolation("no handler registered for " + std::string(to_string(event.kind)));
    }
    handler(event);
    ++processed;
  }
  if (processed == 0 && until != kForever) queue_.advance_to(until);
  return processed;
}

void write_trace_line(std::ostream& out, const SimEvent& event) {
  out << format_number(event.time) << ',' << event.seq << ',' << to_string(event.kind) << ','
      << event.primary << ':' << event.secondary << '\n';
}

}  // namespace simlb
