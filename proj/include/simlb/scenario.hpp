#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simlb/metrics.hpp"
#include "simlb/simulation.hpp"
#include "simlb/stats.hpp"

namespace simlb {

enum class ScenarioKind { S1, S2, S3, S4, ThresholdSweep };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario(std::string_view text);

// Batched arrivals for S1-S3 and the threshold sweep. At scale 1 a run sees
// batch_count * full_batch_size tasks; batch size is multiplied by the scale.
struct BatchWorkload {
  std::int64_t batch_count = 250;
  std::int64_t full_batch_size = 2000;
  double interval_sec = 1.0;
  // Fixed task count overriding the scaled batch size. Spread over the
  // batches with the remainder going to the earliest ones.
  std::optional<std::int64_t> total_tasks;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::S1;
  std::vector<int> dcs;
  std::vector<int> vms_per_dc;
  std::vector<int> thresholds;
  std::vector<BalancerKind> balancers{BalancerKind::Throttled, BalancerKind::Sbdlb};
  std::uint64_t seed = 1;
  double scale = 0.02;
  int reps = 1;
  BatchWorkload batches;
  bool log_uniform_size = false;
  // Model knobs. dcs, vms_per_dc, balancer and task_threshold are overwritten
  // per run from the sweep lists above.
  SimulationParams model;
};

// Sweep lists and model defaults for a scenario.
ScenarioConfig default_scenario(ScenarioKind kind);

// Throws ConfigError.
void validate(const ScenarioConfig& config);

// One simulation instance inside a scenario.
struct RunSpec {
  std::string run_id;
  std::string point_key;  // run id without the balancer, shared by a pair
  std::size_t point_index = 0;
  std::uint64_t seed = 0;
  int dcs = 0;
  int vms_per_dc = 0;
  int threshold = 0;
  int rep = 0;
  BalancerKind balancer = BalancerKind::Sbdlb;
};

// Points are ordered rep-major, then dcs, then vms. Every point gets
// seed + point_index; thresholds and balancers at one point share it.
std::vector<RunSpec> expand_runs(const ScenarioConfig& config);

// Workload for one point, identical for every run sharing the seed.
struct PointWorkload {
  std::vector<BatchArrival> schedule;
  std::vector<Task> tasks;
  std::optional<DiurnalPlan> diurnal;
};

PointWorkload build_workload(const ScenarioConfig& config, std::uint64_t seed);

struct RunOutcome {
  RunSpec spec;
  RunSummary summary;
  std::vector<VmUsage> vm_usage;
  std::uint64_t workload_hash = 0;
  double wall_sec = 0.0;
};

struct ScenarioOutcome {
  std::vector<RunOutcome> runs;  // in expand_runs order
  std::vector<std::string> summary_rows;
  std::vector<std::string> stats_rows;
};

struct RunnerOptions {
  std::optional<std::filesystem::path> out_dir;
  int jobs = 1;
  bool trace = false;       // write trace.csv per run
  bool write_tasks = true;  // write tasks.csv per run
};

// Runs every sweep point for every balancer and writes the CSV/JSON outputs
// when an output directory is given.
ScenarioOutcome run_scenario(const ScenarioConfig& config, const RunnerOptions& options);

// Pairs summary rows of two result sets by point key and runs the paired
// t-test per metric. `a` is the baseline; positive improvement means `b` is
// better. Throws MismatchedSweeps when the point keys differ.
struct SummaryTableRow {
  std::string run_id;
  std::string balancer;
  std::string point_key;
  double avg_response_ms = 0.0;
  double avg_dc_processing_ms = 0.0;
  double total_cost_usd = 0.0;
};

std::vector<SummaryTableRow> read_summary(const std::filesystem::path& summary_csv);
std::vector<std::string> compare(std::vector<SummaryTableRow> a, std::vector<SummaryTableRow> b);
void compare_dirs(const std::filesystem::path& a, const std::filesystem::path& b,
                  const std::filesystem::path& out);

inline constexpr const char* kVmAllocationCsvHeader = "run_id,balancer,dc_id,vm_id,tier,tasks";

}  // namespace simlb
