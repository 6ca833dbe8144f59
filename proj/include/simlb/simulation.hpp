#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "simlb/balancers.hpp"
#include "simlb/cloud_model.hpp"
#include "simlb/workload.hpp"

namespace simlb {

// How a VM's MIPS are spent on the tasks it holds.
//   Reservation:       each task runs at exactly its reserved MIPS.
//   ProportionalShare: the VM's full MIPS are split among its tasks in
//                      proportion to their reserved MIPS; a lone task gets the
//                      whole VM.
enum class ExecutionModel { Reservation, ProportionalShare };

std::string_view to_string(ExecutionModel model);
ExecutionModel parse_execution_model(std::string_view text);

struct SimulationParams {
  int dcs = 8;
  int vms_per_dc = 60;
  BalancerKind balancer = BalancerKind::Sbdlb;
  int task_threshold = 3;
  double floor_fraction = 0.05;
  QueueMode queue_mode = QueueMode::HeadOnly;
  ThrottledDispatch throttled_dispatch = ThrottledDispatch::Sequential;
  ExecutionModel execution = ExecutionModel::ProportionalShare;
  CostRates cost_rates;
  std::vector<TaskCategory> categories = default_categories();
  // Emit HourBoundary events every hour_length_sec up to the last arrival.
  bool hour_events = false;
  double hour_length_sec = 3600.0;
  // Stop at this time; tasks not finished by then are reported unfinished.
  std::optional<SimTime> horizon;
  // Re-verify resource conservation and queue membership after every event.
  bool check_invariants = false;
};

struct VmUsage {
  VmId vm = 0;
  DcId dc = 0;
  VmTier tier = VmTier::LowSpec;
  std::int64_t tasks = 0;
  int peak_active = 0;
};

struct SimulationResult {
  std::vector<Task> tasks;  // start/finish/vm filled in for executed tasks
  std::vector<VmUsage> vm_usage;
  std::vector<CostRates> dc_rates;  // indexed by dc id
  std::uint64_t events_processed = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t completions = 0;
  std::size_t peak_queue_length = 0;
  SimTime end_time = 0.0;
};

// Runs one simulation instance to completion (or to the horizon). `tasks`
// must be ordered by arrival with ids equal to their index, and `schedule`
// must list the batches they were generated from.
SimulationResult simulate(const SimulationParams& params, std::vector<Task> tasks,
                          std::span<const BatchArrival> schedule, std::ostream* trace = nullptr);

}  // namespace simlb
