#include "simlb/workload.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "simlb/error.hpp"

namespace simlb {

std::string_view to_string(CategoryName name) {
  switch (name) {
    case CategoryName::Reels:
      return "reels";
    case CategoryName::Images:
      return "images";
    case CategoryName::Text:
      return "text";
  }
  return "unknown";
}

double TaskCategory::min_mi() const { return compute_mi(size_min_bytes, ci_min); }
double TaskCategory::max_mi() const { return compute_mi(size_max_bytes, ci_max); }

std::vector<TaskCategory> default_categories() {
  return {
      {CategoryName::Reels, 10'000'000, 1'000'000'000, 1000.0, 10000.0, 0.60},
      {CategoryName::Images, 1'000'000, 30'000'000, 500.0, 1000.0, 0.30},
      {CategoryName::Text, 10'000, 100'000, 10.0, 100.0, 0.10},
  };
}

void validate_categories(std::span<const TaskCategory> categories) {
  if (categories.empty()) throw ConfigError("task category table is empty");
  double total = 0.0;
  for (const auto& c : categories) {
    if (c.size_min_bytes == 0 || c.size_min_bytes > c.size_max_bytes) {
      throw ConfigError("category " + std::string(to_string(c.name)) + ": bad size range");
    }
    if (!(c.ci_min > 0) || c.ci_min > c.ci_max) {
      throw ConfigError("category " + std::string(to_string(c.name)) + ": bad CI range");
    }
    if (c.share < 0) throw ConfigError("category shares must be non-negative");
    total += c.share;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("category shares must sum to 1");
}

double compute_mi(std::uint64_t size_bytes, double ci) {
  return static_cast<double>(size_bytes) * ci / 1e6;
}

Task sample_task(Rng& rng, std::span<const TaskCategory> categories, TaskId id, SimTime arrival) {
  std::vector<double> shares;
  shares.reserve(categories.size());
  for (const auto& c : categories) shares.push_back(c.share);
  std::discrete_distribution<std::size_t> pick(shares.begin(), shares.end());
  const TaskCategory& cat = categories[pick(rng)];

  std::uint64_t size = 0;
  if (cat.log_uniform_size) {
    std::uniform_real_distribution<double> u(std::log(static_cast<double>(cat.size_min_bytes)),
                                             std::log(static_cast<double>(cat.size_max_bytes)));
    size = static_cast<std::uint64_t>(std::llround(std::exp(u(rng))));
    size = std::clamp(size, cat.size_min_bytes, cat.size_max_bytes);
  } else {
    std::uniform_int_distribution<std::uint64_t> u(cat.size_min_bytes, cat.size_max_bytes);
    size = u(rng);
  }
  std::uniform_real_distribution<double> ci_dist(cat.ci_min, cat.ci_max);
  const double ci = ci_dist(rng);

  Task task;
  task.id = id;
  task.category = cat.name;
  task.size_bytes = size;
  task.ci = ci;
  task.length_mi = compute_mi(size, ci);
  task.arrival = arrival;
  return task;
}

std::vector<BatchArrival> build_batch_schedule(const BatchPlan& plan) {
  if (plan.batch_count <= 0 || plan.batch_size <= 0 || !(plan.interval_sec > 0)) {
    throw ConfigError("batch plan fields must be positive");
  }
  std::vector<BatchArrival> out;
  out.reserve(static_cast<std::size_t>(plan.batch_count));
  for (std::int64_t i = 0; i < plan.batch_count; ++i) {
    out.push_back({static_cast<double>(i) * plan.interval_sec, plan.batch_size});
  }
  return out;
}

bool is_peak_hour(int hour) {
  return (hour >= 8 && hour <= 10) || (hour >= 13 && hour <= 14) || (hour >= 17 && hour <= 22);
}

std::int64_t DiurnalPlan::total_tasks() const {
  std::int64_t total = 0;
  for (const auto& h : hours) total += h.batch_size * h.total_batches;
  return total;
}

DiurnalPlan build_diurnal_plan(Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, 2);
  DiurnalPlan plan;
  for (int h = 0; h < 24; ++h) {
    const bool peak = is_peak_hour(h);
    HourPlan& hp = plan.hours[static_cast<std::size_t>(h)];
    hp.hour = h;
    hp.type = peak ? HourType::Peak : HourType::NonPeak;
    hp.batch_size = (peak ? kPeakBatchSizes : kNonPeakBatchSizes)[pick(rng)];
    hp.total_batches = (peak ? kPeakBatchCounts : kNonPeakBatchCounts)[pick(rng)];
  }
  return plan;
}

std::vector<BatchArrival> diurnal_schedule(const DiurnalPlan& plan, double scale,
                                           double hour_length_sec) {
  if (!(scale > 0) || scale > 1) throw ConfigError("scale factor must be in (0, 1]");
  std::vector<BatchArrival> out;
  for (const auto& h : plan.hours) {
    const auto size =
        std::max<std::int64_t>(1, std::llround(static_cast<double>(h.batch_size) * scale));
    const double spacing = hour_length_sec / static_cast<double>(h.total_batches);
    for (std::int64_t b = 0; b < h.total_batches; ++b) {
      out.push_back({h.hour * hour_length_sec + static_cast<double>(b) * spacing, size});
    }
  }
  return out;
}

std::vector<Task> generate_tasks(Rng& rng, std::span<const TaskCategory> categories,
                                 std::span<const BatchArrival> schedule) {
  validate_categories(categories);
  std::vector<Task> tasks;
  std::int64_t total = 0;
  for (const auto& b : schedule) total += b.tasks;
  tasks.reserve(static_cast<std::size_t>(total));
  for (const auto& b : schedule) {
    for (std::int64_t k = 0; k < b.tasks; ++k) {
      tasks.push_back(sample_task(rng, categories, tasks.size(), b.time));
    }
  }
  return tasks;
}

std::uint64_t workload_fingerprint(std::span<const Task> tasks) {
  // FNV-1a over the fields that define the stream.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& t : tasks) {
    mix(t.id);
    mix(static_cast<std::uint64_t>(t.category));
    mix(t.size_bytes);
    mix(std::bit_cast<std::uint64_t>(t.ci));
    mix(std::bit_cast<std::uint64_t>(t.arrival));
  }
  return h;
}

}  // namespace simlb
