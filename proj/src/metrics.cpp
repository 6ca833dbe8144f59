#include "simlb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "simlb/csv.hpp"
#include "simlb/error.hpp"

namespace simlb {

CollectedRecords collect_records(const SimulationResult& result) {
  CollectedRecords out;
  out.records.reserve(result.tasks.size());
  for (const Task& t : result.tasks) {
    if (!t.finish || !t.start || !t.vm) {
      ++out.unfinished;
      continue;
    }
    out.records.push_back({t.id, t.category, t.length_mi, *t.vm, result.vm_usage.at(*t.vm).dc,
                           t.arrival, *t.start, *t.finish});
  }
  return out;
}

double avg_response_time(std::span<const TaskRecord> records) {
  if (records.empty()) throw EmptyRecordSet("average response time of zero tasks");
  double total = 0.0;
  for (const auto& r : records) total += r.response_sec();
  return total / static_cast<double>(records.size());
}

double dc_processing_time(std::span<const TaskRecord> records, DcId dc) {
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& r : records) {
    if (r.dc != dc) continue;
    any = true;
    first = std::min(first, r.start);
    last = std::max(last, r.finish);
  }
  if (!any) throw NoTasksForDc("no tasks ran in dc " + std::to_string(dc));
  return last - first;
}

double dc_operating_cost(double processing_sec, const CostRates& rates) {
  return processing_sec * rates.cpu_per_sec;
}

namespace {

struct Span {
  std::int64_t tasks = 0;
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
};

}  // namespace

std::vector<HourSummary> hourly_breakdown(std::span<const TaskRecord> records,
                                          double hour_length_sec,
                                          std::span<const CostRates> dc_rates, int bins) {
  if (!(hour_length_sec > 0)) throw ConfigError("hour length must be positive");
  int count = std::max(bins, 0);
  for (const auto& r : records) {
    count = std::max(count, static_cast<int>(std::floor(r.arrival / hour_length_sec)) + 1);
  }
  const std::size_t n_dc = dc_rates.size();
  std::vector<std::vector<Span>> spans(static_cast<std::size_t>(count), std::vector<Span>(n_dc));
  std::vector<double> response(static_cast<std::size_t>(count), 0.0);
  std::vector<std::int64_t> tasks(static_cast<std::size_t>(count), 0);
  for (const auto& r : records) {
    const auto h = static_cast<std::size_t>(std::floor(r.arrival / hour_length_sec));
    Span& s = spans[h].at(r.dc);
    ++s.tasks;
    s.first = std::min(s.first, r.start);
    s.last = std::max(s.last, r.finish);
    response[h] += r.response_sec();
    ++tasks[h];
  }
  std::vector<HourSummary> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int h = 0; h < count; ++h) {
    const auto hi = static_cast<std::size_t>(h);
    HourSummary hs;
    hs.hour = h;
    hs.tasks = tasks[hi];
    if (hs.tasks > 0) {
      hs.avg_response_sec = response[hi] / static_cast<double>(hs.tasks);
      const double lo = h * hour_length_sec;
      const double hi_edge = (h + 1) * hour_length_sec;
      double proc = 0.0;
      double cost = 0.0;
      int active = 0;
      for (std::size_t d = 0; d < n_dc; ++d) {
        const Span& s = spans[hi][d];
        if (s.tasks == 0) continue;
        const double clipped = std::max(0.0, std::min(s.last, hi_edge) - std::max(s.first, lo));
        proc += clipped;
        cost += dc_operating_cost(clipped, dc_rates[d]);
        ++active;
      }
      hs.dc_processing_sec = proc / active;
      hs.cost_usd = cost;
    }
    out.push_back(hs);
  }
  return out;
}

RunSummary summarize(std::span<const TaskRecord> records, std::span<const CostRates> dc_rates,
                     std::int64_t unfinished) {
  RunSummary s;
  s.task_count = static_cast<std::int64_t>(records.size());
  s.unfinished = unfinished;
  s.avg_response_sec = records.empty() ? 0.0 : avg_response_time(records);
  std::vector<Span> spans(dc_rates.size());
  for (const auto& r : records) {
    Span& sp = spans.at(r.dc);
    ++sp.tasks;
    sp.first = std::min(sp.first, r.start);
    sp.last = std::max(sp.last, r.finish);
  }
  for (std::size_t d = 0; d < dc_rates.size(); ++d) {
    DcRecord rec;
    rec.dc = static_cast<DcId>(d);
    rec.tasks = spans[d].tasks;
    if (rec.tasks > 0) {
      rec.first_start = spans[d].first;
      rec.last_finish = spans[d].last;
      rec.processing_sec = rec.last_finish - rec.first_start;
    }
    rec.cost_usd = dc_operating_cost(rec.processing_sec, dc_rates[d]);
    s.total_dc_processing_sec += rec.processing_sec;
    s.total_cost_usd += rec.cost_usd;
    s.per_dc.push_back(rec);
  }
  if (!s.per_dc.empty()) {
    s.avg_dc_processing_sec = s.total_dc_processing_sec / static_cast<double>(s.per_dc.size());
  }
  return s;
}

void write_tasks_csv(std::ostream& out, std::span<const TaskRecord> records) {
  out << kTasksCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.task << ',' << to_string(r.category) << ',' << format_number(r.length_mi) << ','
        << r.vm << ',' << r.dc << ',' << format_number(r.arrival) << ','
        << format_number(r.start) << ',' << format_number(r.finish) << ','
        << format_number(r.response_sec() * 1000.0) << '\n';
  }
}

std::string summary_csv_row(const SummaryRow& row) {
  const RunSummary& s = row.summary;
  return join_csv({row.run_id, row.balancer, std::to_string(row.dcs),
                   std::to_string(row.vms_per_dc), std::to_string(s.task_count),
                   format_number(s.avg_response_sec * 1000.0),
                   format_number(s.avg_dc_processing_sec * 1000.0),
                   format_number(s.total_cost_usd), std::to_string(s.unfinished)});
}

std::vector<std::string> hourly_csv_rows(const std::string& run_id,
                                         std::span<const HourSummary> hours) {
  std::vector<std::string> rows;
  rows.reserve(hours.size());
  const auto opt = [](const std::optional<double>& v, double k) {
    return v ? format_number(*v * k) : std::string();
  };
  for (const auto& h : hours) {
    rows.push_back(join_csv({run_id, std::to_string(h.hour), std::to_string(h.tasks),
                             opt(h.avg_response_sec, 1000.0), opt(h.dc_processing_sec, 1000.0),
                             opt(h.cost_usd, 1.0)}));
  }
  return rows;
}

}  // namespace simlb
