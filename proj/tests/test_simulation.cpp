#include <sstream>
#include <vector>

#include "doctest.h"
#include "simlb/error.hpp"
#include "simlb/metrics.hpp"
#include "simlb/simulation.hpp"

using namespace simlb;

namespace {

struct Workload {
  std::vector<BatchArrival> schedule;
  std::vector<Task> tasks;
};

Workload batches(std::uint64_t seed, std::int64_t count, std::int64_t size, double interval = 1.0) {
  Workload w;
  w.schedule = build_batch_schedule({count, size, interval});
  Rng rng(seed);
  w.tasks = generate_tasks(rng, default_categories(), w.schedule);
  return w;
}

Task fixed_task(TaskId id, double mi, double arrival) {
  Task t;
  t.id = id;
  t.length_mi = mi;
  t.arrival = arrival;
  return t;
}

}  // namespace

TEST_SUITE("simulation") {
  TEST_CASE("every configuration conserves resources and drains") {
    const Workload w = batches(17, 40, 25);
    for (auto balancer : {BalancerKind::Sbdlb, BalancerKind::Throttled}) {
      for (auto exec : {ExecutionModel::Reservation, ExecutionModel::ProportionalShare}) {
        for (auto mode : {QueueMode::Scan, QueueMode::HeadOnly}) {
          for (auto dispatch : {ThrottledDispatch::Pooled, ThrottledDispatch::Sequential}) {
            SimulationParams p;
            p.dcs = 2;
            p.vms_per_dc = 5;
            p.balancer = balancer;
            p.execution = exec;
            p.queue_mode = mode;
            p.throttled_dispatch = dispatch;
            p.check_invariants = true;
            const SimulationResult r = simulate(p, w.tasks, w.schedule);
            CHECK(r.arrivals == w.tasks.size());
            CHECK(r.completions == w.tasks.size());
            std::int64_t placed = 0;
            for (const auto& u : r.vm_usage) {
              placed += u.tasks;
              CHECK(u.peak_active <= (balancer == BalancerKind::Sbdlb ? 3 : 1));
            }
            CHECK(placed == static_cast<std::int64_t>(w.tasks.size()));
            for (const Task& t : r.tasks) {
              REQUIRE(t.start.has_value());
              REQUIRE(t.finish.has_value());
              CHECK(*t.start >= t.arrival);
              CHECK(*t.finish >= *t.start);
            }
          }
        }
      }
    }
  }

  TEST_CASE("event count is batches plus two events per task") {
    const Workload w = batches(3, 250, 4);
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 10;
    p.execution = ExecutionModel::Reservation;
    const SimulationResult r = simulate(p, w.tasks, w.schedule);
    CHECK(r.events_processed == 250 + 2 * w.tasks.size());
  }

  TEST_CASE("identical inputs give identical runs") {
    const Workload w = batches(8, 30, 20);
    SimulationParams p;
    p.dcs = 2;
    p.vms_per_dc = 4;
    std::ostringstream ta, tb;
    const SimulationResult a = simulate(p, w.tasks, w.schedule, &ta);
    const SimulationResult b = simulate(p, w.tasks, w.schedule, &tb);
    REQUIRE(a.tasks.size() == b.tasks.size());
    for (std::size_t i = 0; i < a.tasks.size(); ++i) {
      CHECK(a.tasks[i].start == b.tasks[i].start);
      CHECK(a.tasks[i].finish == b.tasks[i].finish);
      CHECK(a.tasks[i].vm == b.tasks[i].vm);
    }
    CHECK(ta.str() == tb.str());
    CHECK_FALSE(ta.str().empty());
  }

  TEST_CASE("throttled on one vm runs queued tasks back to back") {
    std::vector<Task> tasks{fixed_task(0, 5000, 0), fixed_task(1, 5000, 0), fixed_task(2, 5000, 0)};
    const std::vector<BatchArrival> schedule{{0.0, 3}};
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 1;  // a single low-spec VM, 500 MIPS
    p.balancer = BalancerKind::Throttled;
    const SimulationResult r = simulate(p, tasks, schedule);
    CHECK(*r.tasks[0].finish == doctest::Approx(10));
    CHECK(*r.tasks[1].start == doctest::Approx(10));
    CHECK(*r.tasks[1].finish == doctest::Approx(20));
    CHECK(*r.tasks[2].finish == doctest::Approx(30));
    CHECK(r.peak_queue_length == 2);
  }

  TEST_CASE("throttled on a high-spec vm uses the whole vm") {
    std::vector<Task> tasks{fixed_task(0, 5000, 0), fixed_task(1, 5000, 0)};
    const std::vector<BatchArrival> schedule{{0.0, 2}};
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 2;
    p.balancer = BalancerKind::Throttled;
    const SimulationResult r = simulate(p, tasks, schedule);
    CHECK(*r.tasks[1].vm == 1);
    CHECK(*r.tasks[1].finish == doctest::Approx(2.5));
  }

  TEST_CASE("reservation runs a task at its reserved MIPS") {
    std::vector<Task> tasks{fixed_task(0, 5e6, 0)};
    const std::vector<BatchArrival> schedule{{0.0, 1}};
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 1;
    p.execution = ExecutionModel::Reservation;
    const SimulationResult r = simulate(p, tasks, schedule);
    CHECK(*r.tasks[0].finish == doctest::Approx(19047.6).epsilon(1e-5));
    p.execution = ExecutionModel::ProportionalShare;
    const SimulationResult s = simulate(p, tasks, schedule);
    CHECK(*s.tasks[0].finish == doctest::Approx(5e6 / 500.0));
  }

  TEST_CASE("proportional share splits a vm by reservation") {
    // Two equal tasks on one low-spec VM share its 500 MIPS; when the short
    // one ends the long one speeds up.
    std::vector<Task> tasks{fixed_task(0, 1000, 0), fixed_task(1, 1000, 0), fixed_task(2, 3000, 0)};
    const std::vector<BatchArrival> schedule{{0.0, 3}};
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 1;
    p.check_invariants = true;
    const SimulationResult r = simulate(p, tasks, schedule);
    // Equal reservations for the first two; the third is longer and gets a
    // larger share, so compute the expected finish from the shares directly.
    const NormalizationBounds nb;
    const double d0 = normalize_demand(1000, VmSpec::low_spec(), nb).mips;
    const double d2 = normalize_demand(3000, VmSpec::low_spec(), nb).mips;
    const double total = 2 * d0 + d2;
    const double t1 = 1000 / (500 * d0 / total);
    const double left = 3000 - t1 * 500 * d2 / total;
    CHECK(*r.tasks[0].finish == doctest::Approx(t1));
    CHECK(*r.tasks[1].finish == doctest::Approx(t1));
    CHECK(*r.tasks[2].finish == doctest::Approx(t1 + left / 500));
  }

  TEST_CASE("horizon leaves late tasks unfinished") {
    const Workload w = batches(5, 50, 20);
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 2;
    p.horizon = 60.0;
    p.hour_events = true;
    p.hour_length_sec = 10.0;
    const SimulationResult r = simulate(p, w.tasks, w.schedule);
    const CollectedRecords c = collect_records(r);
    CHECK(c.unfinished > 0);
    CHECK(c.records.size() + static_cast<std::size_t>(c.unfinished) == w.tasks.size());
    CHECK(r.end_time == 60.0);
    for (const auto& rec : c.records) CHECK(rec.finish <= 60.0);
  }

  TEST_CASE("schedule and tasks must agree") {
    Workload w = batches(1, 5, 5);
    w.tasks.pop_back();
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 2;
    CHECK_THROWS_AS(simulate(p, w.tasks, w.schedule), ConfigError);
  }

  TEST_CASE("sbdlb sends more work to high-spec vms") {
    const Workload w = batches(21, 100, 20);
    SimulationParams p;
    p.dcs = 1;
    p.vms_per_dc = 4;
    const SimulationResult r = simulate(p, w.tasks, w.schedule);
    std::int64_t low = 0, high = 0;
    for (const auto& u : r.vm_usage) (u.tier == VmTier::HighSpec ? high : low) += u.tasks;
    CHECK(high > low);
  }
}
