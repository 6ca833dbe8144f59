#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "simlb/cloud_model.hpp"
#include "simlb/event_queue.hpp"

namespace simlb {

// Every random draw in a run comes from one engine owned by that run.
using Rng = std::mt19937_64;

enum class CategoryName : std::uint8_t { Reels, Images, Text };

std::string_view to_string(CategoryName name);

struct TaskCategory {
  CategoryName name = CategoryName::Text;
  std::uint64_t size_min_bytes = 0;
  std::uint64_t size_max_bytes = 0;
  double ci_min = 0.0;  // instructions per byte
  double ci_max = 0.0;
  double share = 0.0;
  bool log_uniform_size = false;

  double min_mi() const;
  double max_mi() const;
};

// Reels 10 MB-1 GB at CI 1000-10000 (60%), Images 1-30 MB at CI 500-1000
// (30%), Text 10-100 KB at CI 10-100 (10%). MB = 1e6 bytes, KB = 1e3.
std::vector<TaskCategory> default_categories();

// Throws ConfigError on empty tables, inverted ranges, or shares that do not
// sum to 1.
void validate_categories(std::span<const TaskCategory> categories);

struct Task {
  TaskId id = 0;
  CategoryName category = CategoryName::Text;
  std::uint64_t size_bytes = 0;
  double ci = 0.0;
  double length_mi = 0.0;
  SimTime arrival = 0.0;
  std::optional<SimTime> start;
  std::optional<SimTime> finish;
  std::optional<VmId> vm;
};

// Million instructions: bytes * CI / 1e6.
double compute_mi(std::uint64_t size_bytes, double ci);

// Category by share, size and CI uniform within the category's ranges.
Task sample_task(Rng& rng, std::span<const TaskCategory> categories, TaskId id, SimTime arrival);

struct BatchPlan {
  std::int64_t batch_count = 0;
  std::int64_t batch_size = 0;
  double interval_sec = 1.0;
};

struct BatchArrival {
  SimTime time = 0.0;
  std::int64_t tasks = 0;
  friend bool operator==(const BatchArrival&, const BatchArrival&) = default;
};

// Batch i arrives at i * interval. Throws ConfigError on non-positive fields.
std::vector<BatchArrival> build_batch_schedule(const BatchPlan& plan);

enum class HourType : std::uint8_t { Peak, NonPeak };

struct HourPlan {
  int hour = 0;
  HourType type = HourType::NonPeak;
  std::int64_t batch_size = 0;
  std::int64_t total_batches = 0;
};

struct DiurnalPlan {
  std::array<HourPlan, 24> hours{};
  std::int64_t total_tasks() const;
};

inline constexpr std::array<std::int64_t, 3> kPeakBatchSizes{5000, 5500, 6000};
inline constexpr std::array<std::int64_t, 3> kPeakBatchCounts{18, 19, 20};
inline constexpr std::array<std::int64_t, 3> kNonPeakBatchSizes{3000, 3500, 4000};
inline constexpr std::array<std::int64_t, 3> kNonPeakBatchCounts{9, 10, 11};

// Peak hours are 8-10, 13-14 and 17-22.
bool is_peak_hour(int hour);

DiurnalPlan build_diurnal_plan(Rng& rng);

// Batches evenly spaced inside each hour. Batch sizes are multiplied by
// `scale` (rounded, at least one task); batch counts are kept.
std::vector<BatchArrival> diurnal_schedule(const DiurnalPlan& plan, double scale,
                                           double hour_length_sec = 3600.0);

// Samples every task of the schedule in arrival order; ids are dense from 0.
std::vector<Task> generate_tasks(Rng& rng, std::span<const TaskCategory> categories,
                                 std::span<const BatchArrival> schedule);

// Stable digest of the generated stream (ids, categories, sizes, CI, arrival),
// used to check that both balancers see the same workload.
std::uint64_t workload_fingerprint(std::span<const Task> tasks);

}  // namespace simlb
