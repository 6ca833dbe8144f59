#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simlb/cloud_model.hpp"
#include "simlb/simulation.hpp"
#include "simlb/workload.hpp"

namespace simlb {

struct TaskRecord {
  TaskId task = 0;
  CategoryName category = CategoryName::Text;
  double length_mi = 0.0;
  VmId vm = 0;
  DcId dc = 0;
  SimTime arrival = 0.0;
  SimTime start = 0.0;
  SimTime finish = 0.0;

  // From acknowledgment by the balancer to completion; includes queue wait.
  double response_sec() const { return finish - arrival; }
};

struct DcRecord {
  DcId dc = 0;
  std::int64_t tasks = 0;
  SimTime first_start = 0.0;
  SimTime last_finish = 0.0;
  double processing_sec = 0.0;
  double cost_usd = 0.0;
};

struct HourSummary {
  int hour = 0;
  std::int64_t tasks = 0;
  // Unset for bins without tasks.
  std::optional<double> avg_response_sec;
  std::optional<double> dc_processing_sec;  // mean over DCs active in the bin
  std::optional<double> cost_usd;           // summed over those DCs
};

struct RunSummary {
  std::int64_t task_count = 0;
  std::int64_t unfinished = 0;
  double avg_response_sec = 0.0;
  std::vector<DcRecord> per_dc;
  // Mean over every configured DC; an idle DC counts as zero.
  double avg_dc_processing_sec = 0.0;
  double total_dc_processing_sec = 0.0;
  double total_cost_usd = 0.0;
  std::vector<HourSummary> hourly;
};

struct CollectedRecords {
  std::vector<TaskRecord> records;  // finished tasks, by task id
  std::int64_t unfinished = 0;
};

CollectedRecords collect_records(const SimulationResult& result);

// Mean of finish - arrival. Throws EmptyRecordSet.
double avg_response_time(std::span<const TaskRecord> records);

// Last finish minus first start over the DC's tasks. Throws NoTasksForDc.
double dc_processing_time(std::span<const TaskRecord> records, DcId dc);

// processing time * CPU rate.
double dc_operating_cost(double processing_sec, const CostRates& rates);

// Tasks binned by floor(arrival / hour_length). Per-bin DC processing time
// uses only the bin's tasks with first start / last finish clipped to the
// hour window. Returns max(bins, highest occupied bin + 1) entries.
std::vector<HourSummary> hourly_breakdown(std::span<const TaskRecord> records,
                                          double hour_length_sec,
                                          std::span<const CostRates> dc_rates, int bins = 0);

RunSummary summarize(std::span<const TaskRecord> records, std::span<const CostRates> dc_rates,
                     std::int64_t unfinished);

inline constexpr const char* kTasksCsvHeader =
    "task_id,category,length_mi,vm_id,dc_id,arrival_s,start_s,finish_s,response_ms";
inline constexpr const char* kSummaryCsvHeader =
    "run_id,balancer,dcs,vms_per_dc,tasks,avg_response_ms,avg_dc_processing_ms,total_cost_usd,"
    "unfinished";
inline constexpr const char* kHourlyCsvHeader =
    "run_id,hour,tasks,avg_response_ms,dc_processing_ms,cost_usd";

void write_tasks_csv(std::ostream& out, std::span<const TaskRecord> records);

struct SummaryRow {
  std::string run_id;
  std::string balancer;
  int dcs = 0;
  int vms_per_dc = 0;
  RunSummary summary;
};

std::string summary_csv_row(const SummaryRow& row);
std::vector<std::string> hourly_csv_rows(const std::string& run_id,
                                         std::span<const HourSummary> hours);

}  // namespace simlb
