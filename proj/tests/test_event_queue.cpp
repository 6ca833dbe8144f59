#include <sstream>
#include <vector>

#include "doctest.h"
#include "simlb/error.hpp"
#include "simlb/event_queue.hpp"

using namespace simlb;

TEST_SUITE("event_queue") {
  TEST_CASE("earlier time pops first regardless of insertion order") {
    EventQueue q;
    q.schedule(5.0, EventKind::TaskArrival, 1);
    q.schedule(3.0, EventKind::TaskArrival, 2);
    CHECK(q.pop().time == 3.0);
    CHECK(q.pop().time == 5.0);
    CHECK(q.empty());
  }

  TEST_CASE("equal times pop in scheduling order") {
    EventQueue q;
    q.schedule(7.0, EventKind::TaskArrival, 'A');
    q.schedule(7.0, EventKind::TaskArrival, 'B');
    CHECK(q.pop().primary == 'A');
    CHECK(q.pop().primary == 'B');
  }

  TEST_CASE("scheduling before the clock throws") {
    EventQueue q;
    q.schedule(2.0, EventKind::TaskArrival);
    q.pop();
    CHECK(q.now() == 2.0);
    CHECK_THROWS_AS(q.schedule(1.0, EventKind::TaskArrival), SchedulingInPast);
    CHECK_NOTHROW(q.schedule(2.0, EventKind::TaskArrival));
  }

  TEST_CASE("cancelled events are never popped") {
    EventQueue q;
    const auto a = q.schedule(1.0, EventKind::TaskCompletion, 1);
    q.schedule(2.0, EventKind::TaskCompletion, 2);
    CHECK(q.size() == 2);
    q.cancel(a);
    CHECK(q.size() == 1);
    q.cancel(a);
    q.cancel(999);
    CHECK(q.size() == 1);
    CHECK(q.pop().primary == 2);
    CHECK(q.empty());
  }

  TEST_CASE("run on an empty simulator processes nothing") {
    Simulator sim;
    CHECK(sim.run(10.0) == 0);
    CHECK(sim.now() == 10.0);
  }

  TEST_CASE("bounded run stops at the horizon") {
    Simulator sim;
    std::vector<double> seen;
    sim.on(EventKind::TaskArrival, [&](const SimEvent& e) { seen.push_back(e.time); });
    for (double t : {1.0, 2.0, 3.0}) sim.schedule(t, EventKind::TaskArrival);
    CHECK(sim.run(2.0) == 2);
    CHECK(sim.now() == 2.0);
    CHECK(sim.pending() == 1);
    CHECK(seen == std::vector<double>{1.0, 2.0});
    CHECK(sim.run() == 1);
  }

  TEST_CASE("handlers may schedule follow-up events") {
    Simulator sim;
    int arrivals = 0;
    sim.on(EventKind::BatchArrival, [&](const SimEvent& e) {
      for (int i = 0; i < 3; ++i) sim.schedule(e.time, EventKind::TaskArrival, i);
    });
    sim.on(EventKind::TaskArrival, [&](const SimEvent&) { ++arrivals; });
    for (int b = 0; b < 250; ++b) sim.schedule(b, EventKind::BatchArrival, b);
    CHECK(sim.run() == 250 + 750);
    CHECK(arrivals == 750);
  }

  TEST_CASE("stop ends the run after the current event") {
    Simulator sim;
    sim.on(EventKind::SimulationEnd, [&](const SimEvent&) { sim.stop(); });
    sim.on(EventKind::TaskArrival, [](const SimEvent&) {});
    sim.schedule(1.0, EventKind::TaskArrival);
    sim.schedule(2.0, EventKind::SimulationEnd);
    sim.schedule(3.0, EventKind::TaskArrival);
    CHECK(sim.run() == 2);
    CHECK(sim.pending() == 1);
  }

  TEST_CASE("an event without a handler is an invariant violation") {
    Simulator sim;
    sim.schedule(1.0, EventKind::HourBoundary);
    CHECK_THROWS_AS(sim.run(), InvariantViolation);
  }

  TEST_CASE("trace lines carry time, seq, kind and payload") {
    Simulator sim;
    std::ostringstream out;
    sim.set_trace(&out);
    sim.on(EventKind::TaskCompletion, [](const SimEvent&) {});
    sim.schedule(1.5, EventKind::TaskCompletion, 4, 9);
    sim.run();
    CHECK(out.str() == "1.5,0,TaskCompletion,4:9\n");
  }
}
