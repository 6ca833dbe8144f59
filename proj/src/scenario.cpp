#include "simlb/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "simlb/config.hpp"
#include "simlb/csv.hpp"
#include "simlb/error.hpp"

namespace simlb {

namespace fs = std::filesystem;

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::S1:
      return "s1";
    case ScenarioKind::S2:
      return "s2";
    case ScenarioKind::S3:
      return "s3";
    case ScenarioKind::S4:
      return "s4";
    case ScenarioKind::ThresholdSweep:
      return "threshold";
  }
  return "unknown";
}

ScenarioKind parse_scenario(std::string_view text) {
  if (text == "s1") return ScenarioKind::S1;
  if (text == "s2") return ScenarioKind::S2;
  if (text == "s3") return ScenarioKind::S3;
  if (text == "s4") return ScenarioKind::S4;
  if (text == "threshold") return ScenarioKind::ThresholdSweep;
  throw ConfigError("unknown scenario '" + std::string(text) + "'");
}

namespace {

std::vector<int> range(int lo, int hi, int step) {
  std::vector<int> out;
  for (int v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

}  // namespace

ScenarioConfig default_scenario(ScenarioKind kind) {
  ScenarioConfig c;
  c.scenario = kind;
  c.thresholds = {3};
  switch (kind) {
    case ScenarioKind::S1:
      c.dcs = {8};
      c.vms_per_dc = range(10, 80, 10);
      break;
    case ScenarioKind::S2:
      c.dcs = range(1, 8, 1);
      c.vms_per_dc = {60};
      break;
    case ScenarioKind::S3:
      c.dcs = {8};
      c.vms_per_dc = {20};
      break;
    case ScenarioKind::S4:
      c.dcs = {8};
      c.vms_per_dc = {60};
      c.model.hour_events = true;
      break;
    case ScenarioKind::ThresholdSweep:
      c.dcs = range(1, 8, 1);
      c.vms_per_dc = {60};
      c.thresholds = {2, 3, 4};
      c.balancers = {BalancerKind::Sbdlb};
      break;
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  const auto positive_list = [](const std::vector<int>& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string(name) + " list is empty");
    if (std::ranges::any_of(v, [](int x) { return x <= 0; })) {
      throw ConfigError(std::string(name) + " entries must be positive");
    }
  };
  positive_list(c.dcs, "dcs");
  positive_list(c.vms_per_dc, "vms_per_dc");
  positive_list(c.thresholds, "thresholds");
  if (c.balancers.empty()) throw ConfigError("no balancers selected");
  if (std::set<BalancerKind>(c.balancers.begin(), c.balancers.end()).size() != c.balancers.size()) {
    throw ConfigError("balancer listed twice");
  }
  if (!(c.scale > 0.0 && c.scale <= 1.0)) throw ConfigError("scale must be in (0, 1]");
  if (c.reps < 1) throw ConfigError("reps must be at least 1");
  if (c.batches.batch_count <= 0 || c.batches.full_batch_size <= 0) {
    throw ConfigError("batch count and size must be positive");
  }
  if (!(c.batches.interval_sec > 0.0)) throw ConfigError("batch interval must be positive");
  if (c.batches.total_tasks && c.scenario == ScenarioKind::S4) {
    throw ConfigError("a fixed task count does not apply to the diurnal scenario; use the scale");
  }
  if (c.batches.total_tasks && *c.batches.total_tasks <= 0) {
    throw ConfigError("total task count must be positive");
  }
  if (!(c.model.hour_length_sec > 0.0)) throw ConfigError("hour length must be positive");
  validate_categories(c.model.categories);
  c.model.cost_rates.validate();
  NormalizationBounds{0.1, 1e7, c.model.floor_fraction}.validate();
}

std::vector<RunSpec> expand_runs(const ScenarioConfig& c) {
  std::vector<RunSpec> runs;
  std::size_t point = 0;
  for (int rep = 0; rep < c.reps; ++rep) {
    for (int dcs : c.dcs) {
      for (int vms : c.vms_per_dc) {
        const std::uint64_t seed = c.seed + point;
        for (int threshold : c.thresholds) {
          std::ostringstream key;
          key << to_string(c.scenario) << "-d" << dcs << "-v" << vms << "-t" << threshold << "-r"
              << rep << "-s" << seed;
          for (BalancerKind b : c.balancers) {
            RunSpec r;
            r.point_key = key.str();
            r.run_id = r.point_key + "-" + std::string(to_string(b));
            r.point_index = point;
            r.seed = seed;
            r.dcs = dcs;
            r.vms_per_dc = vms;
            r.threshold = threshold;
            r.rep = rep;
            r.balancer = b;
            runs.push_back(std::move(r));
          }
        }
        ++point;
      }
    }
  }
  return runs;
}

PointWorkload build_workload(const ScenarioConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  PointWorkload w;
  if (c.scenario == ScenarioKind::S4) {
    w.diurnal = build_diurnal_plan(rng);
    w.schedule = diurnal_schedule(*w.diurnal, c.scale, c.model.hour_length_sec);
  } else if (c.batches.total_tasks) {
    const std::int64_t n = *c.batches.total_tasks;
    const std::int64_t count = std::min(c.batches.batch_count, n);
    for (std::int64_t i = 0; i < count; ++i) {
      const std::int64_t size = n / count + (i < n % count ? 1 : 0);
      w.schedule.push_back({static_cast<double>(i) * c.batches.interval_sec, size});
    }
  } else {
    const auto size = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(c.batches.full_batch_size) * c.scale));
    w.schedule = build_batch_schedule({c.batches.batch_count, size, c.batches.interval_sec});
  }
  w.tasks = generate_tasks(rng, c.model.categories, w.schedule);
  return w;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

void write_file(const fs::path& path, const std::string& header,
                const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << header << '\n';
  for (const auto& row : rows) out << row << '\n';
}

struct RunContext {
  const ScenarioConfig& config;
  const RunnerOptions& options;
  nlohmann::json config_json;
  std::string config_hash;
};

RunOutcome execute(const RunContext& ctx, const RunSpec& spec) {
  const auto wall_start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const PointWorkload work = build_workload(ctx.config, spec.seed);

  SimulationParams params = ctx.config.model;
  params.dcs = spec.dcs;
  params.vms_per_dc = spec.vms_per_dc;
  params.balancer = spec.balancer;
  params.task_threshold = spec.threshold;

  std::optional<fs::path> run_dir;
  if (ctx.options.out_dir) {
    run_dir = *ctx.options.out_dir / "runs" / spec.run_id;
    fs::create_directories(*run_dir);
  }
  std::ofstream trace;
  if (ctx.options.trace && run_dir) {
    trace.open(*run_dir / "trace.csv", std::ios::binary);
    trace << "time,seq,kind,payload\n";
  }

  RunOutcome out;
  out.spec = spec;
  out.workload_hash = workload_fingerprint(work.tasks);
  const SimulationResult result =
      simulate(params, work.tasks, work.schedule, trace.is_open() ? &trace : nullptr);
  const CollectedRecords collected = collect_records(result);
  out.summary = summarize(collected.records, result.dc_rates, collected.unfinished);
  if (ctx.config.scenario == ScenarioKind::S4) {
    out.summary.hourly =
        hourly_breakdown(collected.records, params.hour_length_sec, result.dc_rates, 24);
  }
  out.vm_usage = result.vm_usage;
  out.wall_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  if (run_dir) {
    if (ctx.options.write_tasks) {
      std::ofstream tasks(*run_dir / "tasks.csv", std::ios::binary);
      write_tasks_csv(tasks, collected.records);
    }
    nlohmann::json manifest = {
        {"run_id", spec.run_id},
        {"config", ctx.config_json},
        {"config_hash", ctx.config_hash},
        {"seed", spec.seed},
        {"point",
         {{"dcs", spec.dcs},
          {"vms_per_dc", spec.vms_per_dc},
          {"threshold", spec.threshold},
          {"rep", spec.rep},
          {"balancer", to_string(spec.balancer)}}},
        {"workload_hash", hex64(out.workload_hash)},
        {"tasks", work.tasks.size()},
        {"events", result.events_processed},
        {"started_at", started},
        {"finished_at", utc_now()},
    };
    std::ofstream m(*run_dir / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << '\n';
  }
  return out;
}

SummaryTableRow table_row(const RunOutcome& r) {
  return {r.spec.run_id,
          std::string(to_string(r.spec.balancer)),
          r.spec.point_key,
          r.summary.avg_response_sec * 1000.0,
          r.summary.avg_dc_processing_sec * 1000.0,
          r.summary.total_cost_usd};
}

std::string strip_balancer(const std::string& run_id, const std::string& balancer) {
  const std::string suffix = "-" + balancer;
  if (run_id.size() > suffix.size() &&
      run_id.compare(run_id.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return run_id.substr(0, run_id.size() - suffix.size());
  }
  return run_id;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& config, const RunnerOptions& options) {
  validate(config);
  RunContext ctx{config, options, to_json(config), {}};
  ctx.config_hash = content_hash(ctx.config_json);
  const std::vector<RunSpec> specs = expand_runs(config);
  if (options.out_dir) fs::create_directories(*options.out_dir);

  ScenarioOutcome outcome;
  outcome.runs.resize(specs.size());
  const int jobs = std::clamp<int>(options.jobs, 1, static_cast<int>(specs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      {
        std::lock_guard lock(error_mutex);
        if (error) return;
      }
      try {
        outcome.runs[i] = execute(ctx, specs[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::map<std::size_t, std::uint64_t> point_hash;
  for (const RunOutcome& r : outcome.runs) {
    const auto [it, inserted] = point_hash.emplace(r.spec.point_index, r.workload_hash);
    if (!inserted && it->second != r.workload_hash) {
      throw InvariantViolation("runs at point " + r.spec.point_key + " saw different workloads");
    }
  }

  std::vector<std::string> hourly_rows;
  std::vector<std::string> allocation_rows;
  for (const RunOutcome& r : outcome.runs) {
    outcome.summary_rows.push_back(summary_csv_row(
        {r.spec.run_id, std::string(to_string(r.spec.balancer)), r.spec.dcs, r.spec.vms_per_dc,
         r.summary}));
    for (auto& row : hourly_csv_rows(r.spec.run_id, r.summary.hourly)) {
      hourly_rows.push_back(std::move(row));
    }
    for (const VmUsage& u : r.vm_usage) {
      allocation_rows.push_back(join_csv({r.spec.run_id, std::string(to_string(r.spec.balancer)),
                                          std::to_string(u.dc), std::to_string(u.vm),
                                          std::string(to_string(u.tier)),
                                          std::to_string(u.tasks)}));
    }
  }

  const bool paired =
      std::ranges::find(config.balancers, BalancerKind::Throttled) != config.balancers.end() &&
      std::ranges::find(config.balancers, BalancerKind::Sbdlb) != config.balancers.end();
  if (paired) {
    std::vector<SummaryTableRow> a, b;
    for (const RunOutcome& r : outcome.runs) {
      (r.spec.balancer == BalancerKind::Throttled ? a : b).push_back(table_row(r));
    }
    outcome.stats_rows = compare(std::move(a), std::move(b));
  }

  if (options.out_dir) {
    const fs::path& dir = *options.out_dir;
    write_file(dir / "summary.csv", kSummaryCsvHeader, outcome.summary_rows);
    if (config.scenario == ScenarioKind::S4) write_file(dir / "hourly.csv", kHourlyCsvHeader, hourly_rows);
    if (config.scenario == ScenarioKind::S3) {
      write_file(dir / "vm_allocation.csv", kVmAllocationCsvHeader, allocation_rows);
    }
    if (paired) write_file(dir / "stats.csv", kStatsCsvHeader, outcome.stats_rows);
    nlohmann::json manifest = {{"config", ctx.config_json},
                               {"config_hash", ctx.config_hash},
                               {"runs", specs.size()},
                               {"finished_at", utc_now()}};
    std::ofstream m(dir / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << '\n';
  }
  return outcome;
}

std::vector<SummaryTableRow> read_summary(const fs::path& summary_csv) {
  const CsvTable table = read_csv(summary_csv);
  if (join_csv(table.header) != kSummaryCsvHeader) {
    throw ConfigError("unexpected summary header in " + summary_csv.string());
  }
  const auto col = [&](std::string_view name) { return table.column(name); };
  const std::size_t run = col("run_id"), bal = col("balancer"), resp = col("avg_response_ms"),
                    proc = col("avg_dc_processing_ms"), cost = col("total_cost_usd");
  std::vector<SummaryTableRow> rows;
  for (const auto& f : table.rows) {
    SummaryTableRow r;
    r.run_id = f[run];
    r.balancer = f[bal];
    r.point_key = strip_balancer(r.run_id, r.balancer);
    try {
      r.avg_response_ms = std::stod(f[resp]);
      r.avg_dc_processing_ms = std::stod(f[proc]);
      r.total_cost_usd = std::stod(f[cost]);
    } catch (const std::exception&) {
      throw ConfigError("non-numeric metric in " + summary_csv.string() + " row " + r.run_id);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::string> compare(std::vector<SummaryTableRow> a, std::vector<SummaryTableRow> b) {
  if (a.empty() || b.empty()) throw MismatchedSweeps("nothing to compare");
  std::map<std::string, const SummaryTableRow*> by_key;
  for (const auto& r : b) {
    if (!by_key.emplace(r.point_key, &r).second) {
      throw MismatchedSweeps("point " + r.point_key + " appears twice");
    }
  }
  if (a.size() != b.size()) {
    throw MismatchedSweeps("sweeps have " + std::to_string(a.size()) + " and " +
                           std::to_string(b.size()) + " points");
  }
  std::vector<const SummaryTableRow*> matched;
  std::set<std::string> seen;
  for (const auto& r : a) {
    const auto it = by_key.find(r.point_key);
    if (it == by_key.end()) throw MismatchedSweeps("point " + r.point_key + " has no partner");
    if (!seen.insert(r.point_key).second) {
      throw MismatchedSweeps("point " + r.point_key + " appears twice");
    }
    matched.push_back(it->second);
  }

  using Metric = double SummaryTableRow::*;
  const std::pair<const char*, Metric> metrics[] = {
      {"avg_response_ms", &SummaryTableRow::avg_response_ms},
      {"avg_dc_processing_ms", &SummaryTableRow::avg_dc_processing_ms},
      {"total_cost_usd", &SummaryTableRow::total_cost_usd},
  };
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> rows;
  for (const auto& [name, field] : metrics) {
    PairedSample s;
    for (std::size_t i = 0; i < a.size(); ++i) {
      s.labels.push_back(a[i].point_key);
      s.a.push_back(a[i].*field);
      s.b.push_back(matched[i]->*field);
    }
    TestResult t{nan, static_cast<int>(a.size()) - 1, nan, nan};
    try {
      t = paired_t_test(s);
    } catch (const Error&) {
      try {
        t.mean_improvement_pct = percent_improvement(s.a, s.b);
      } catch (const Error&) {
      }
    }
    rows.push_back(join_csv({name, a.front().balancer, matched.front()->balancer,
                             std::to_string(a.size()), format_number(t.t_statistic),
                             std::to_string(t.degrees_of_freedom), format_number(t.p_two_sided),
                             format_number(t.mean_improvement_pct)}));
  }
  return rows;
}

void compare_dirs(const fs::path& a, const fs::path& b, const fs::path& out) {
  auto rows_a = read_summary(a / "summary.csv");
  auto rows_b = read_summary(b / "summary.csv");
  // A directory holding both balancers contributes its throttled rows as the
  // baseline side and its sbdlb rows as the other.
  const auto keep = [](std::vector<SummaryTableRow>& rows, const char* balancer) {
    std::set<std::string> kinds;
    for (const auto& r : rows) kinds.insert(r.balancer);
    if (kinds.size() > 1) std::erase_if(rows, [&](const auto& r) { return r.balancer != balancer; });
  };
  keep(rows_a, "throttled");
  keep(rows_b, "sbdlb");
  const auto rows = compare(std::move(rows_a), std::move(rows_b));
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_file(out, kStatsCsvHeader, rows);
}

}  // namespace simlb
