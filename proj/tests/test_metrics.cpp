#include <sstream>
#include <vector>

#include "doctest.h"
#include "simlb/csv.hpp"
#include "simlb/error.hpp"
#include "simlb/metrics.hpp"

using namespace simlb;

namespace {

TaskRecord rec(TaskId id, DcId dc, double arrival, double start, double finish) {
  TaskRecord r;
  r.task = id;
  r.dc = dc;
  r.vm = dc;
  r.arrival = arrival;
  r.start = start;
  r.finish = finish;
  return r;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("average response time is the mean of finish minus arrival") {
    const std::vector<TaskRecord> r{rec(0, 0, 0, 0, 2), rec(1, 0, 0, 0, 4), rec(2, 0, 0, 0, 6)};
    CHECK(avg_response_time(r) == 4.0);
    const std::vector<TaskRecord> one{rec(0, 0, 5, 5, 15)};
    CHECK(avg_response_time(one) == 10.0);
    CHECK_THROWS_AS(avg_response_time({}), EmptyRecordSet);
  }

  TEST_CASE("response time includes queue wait") {
    CHECK(rec(0, 0, 0, 5, 7).response_sec() == 7.0);
  }

  TEST_CASE("dc processing time spans first start to last finish") {
    const std::vector<TaskRecord> r{rec(0, 0, 0, 0, 5), rec(1, 0, 0, 1, 9), rec(2, 1, 0, 3, 3.5)};
    CHECK(dc_processing_time(r, 0) == 9.0);
    CHECK(dc_processing_time(r, 1) == 0.5);
    CHECK_THROWS_AS(dc_processing_time(r, 2), NoTasksForDc);
  }

  TEST_CASE("cost is processing time times the cpu rate") {
    CHECK(dc_operating_cost(120.0, CostRates{}) == 360.0);
    CHECK(dc_operating_cost(0.0, CostRates{}) == 0.0);
  }

  TEST_CASE("summary averages over every dc and sums costs") {
    const std::vector<TaskRecord> r{rec(0, 0, 0, 0, 5), rec(1, 0, 0, 1, 9), rec(2, 1, 0, 3, 3.5)};
    const std::vector<CostRates> rates(3);
    const RunSummary s = summarize(r, rates, 2);
    CHECK(s.task_count == 3);
    CHECK(s.unfinished == 2);
    REQUIRE(s.per_dc.size() == 3);
    CHECK(s.per_dc[2].tasks == 0);
    CHECK(s.per_dc[2].processing_sec == 0.0);
    CHECK(s.total_dc_processing_sec == 9.5);
    CHECK(s.avg_dc_processing_sec == doctest::Approx(9.5 / 3));
    CHECK(s.total_cost_usd == s.per_dc[0].cost_usd + s.per_dc[1].cost_usd + s.per_dc[2].cost_usd);
    CHECK(s.total_cost_usd == 3.0 * s.total_dc_processing_sec);
  }

  TEST_CASE("each task lands in exactly one dc") {
    std::vector<TaskRecord> r;
    for (TaskId i = 0; i < 40; ++i) r.push_back(rec(i, i % 4, i, i + 1, i + 3));
    const RunSummary s = summarize(r, std::vector<CostRates>(4), 0);
    std::int64_t total = 0;
    for (const auto& d : s.per_dc) total += d.tasks;
    CHECK(total == 40);
  }

  TEST_CASE("scaling all timestamps scales every time metric") {
    std::vector<TaskRecord> r{rec(0, 0, 0, 1, 5), rec(1, 1, 2, 2.5, 9), rec(2, 1, 3, 4, 4.5)};
    const std::vector<CostRates> rates(2);
    const RunSummary a = summarize(r, rates, 0);
    for (auto& x : r) {
      x.arrival *= 4;
      x.start *= 4;
      x.finish *= 4;
    }
    const RunSummary b = summarize(r, rates, 0);
    CHECK(b.avg_response_sec == doctest::Approx(4 * a.avg_response_sec));
    CHECK(b.avg_dc_processing_sec == doctest::Approx(4 * a.avg_dc_processing_sec));
    CHECK(b.total_cost_usd == doctest::Approx(4 * a.total_cost_usd));
  }

  TEST_CASE("hourly bins by arrival and leaves empty bins null") {
    const std::vector<TaskRecord> r{rec(0, 0, 10, 10, 20), rec(1, 0, 3700, 3700, 3800)};
    const std::vector<CostRates> rates(1);
    const auto h = hourly_breakdown(r, 3600, rates, 4);
    REQUIRE(h.size() == 4);
    CHECK(h[0].tasks == 1);
    CHECK(h[1].tasks == 1);
    CHECK(h[2].tasks == 0);
    CHECK_FALSE(h[2].avg_response_sec.has_value());
    CHECK_FALSE(h[2].dc_processing_sec.has_value());
    CHECK_FALSE(h[2].cost_usd.has_value());
    CHECK(*h[0].dc_processing_sec == 10.0);
    CHECK(*h[1].cost_usd == 300.0);
    std::int64_t total = 0;
    for (const auto& x : h) total += x.tasks;
    CHECK(total == 2);
  }

  TEST_CASE("hourly processing time is clipped to the hour") {
    const std::vector<TaskRecord> r{rec(0, 0, 3000, 3000, 9000)};
    const auto h = hourly_breakdown(r, 3600, std::vector<CostRates>(1));
    REQUIRE(h.size() == 1);
    CHECK(*h[0].dc_processing_sec == 600.0);
    CHECK(*h[0].avg_response_sec == 6000.0);
  }

  TEST_CASE("csv writers use the fixed headers and millisecond columns") {
    const std::vector<TaskRecord> r{rec(3, 1, 0.5, 1, 2.25)};
    std::ostringstream out;
    write_tasks_csv(out, r);
    std::istringstream in(out.str());
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == kTasksCsvHeader);
    CHECK(line == "3,text,0,1,1,0.5,1,2.25,1750");

    SummaryRow row{"s1-x-sbdlb", "sbdlb", 8, 10, summarize(r, std::vector<CostRates>(2), 1)};
    CHECK(summary_csv_row(row) == "s1-x-sbdlb,sbdlb,8,10,1,1750,625,3.75,1");
    const auto hours = hourly_breakdown(r, 3600, std::vector<CostRates>(2), 2);
    const auto rows = hourly_csv_rows("id", hours);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "id,0,1,1750,1250,3.75");
    CHECK(rows[1] == "id,1,0,,,");
  }

  TEST_CASE("numbers round-trip through the csv formatter") {
    for (double v : {0.1, 1.0 / 3.0, 12345.678, 1e-300, 6.02e23}) {
      CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(2.0) == "2");
  }
}
