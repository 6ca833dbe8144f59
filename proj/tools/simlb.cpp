#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simlb/config.hpp"
#include "simlb/error.hpp"
#include "simlb/scenario.hpp"

namespace {

// "1,2,3", "10-80" or "10-80:10".
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw simlb::ConfigError("empty entry in list '" + text + "'");
    try {
      const auto dash = item.find('-', 1);
      if (dash == std::string::npos) {
        out.push_back(std::stoi(item));
        continue;
      }
      const auto colon = item.find(':', dash);
      const int lo = std::stoi(item.substr(0, dash));
      const int hi = std::stoi(item.substr(dash + 1, colon - dash - 1));
      const int step = colon == std::string::npos ? 1 : std::stoi(item.substr(colon + 1));
      if (step <= 0 || hi < lo) throw simlb::ConfigError("bad range '" + item + "'");
      for (int v = lo; v <= hi; v += step) out.push_back(v);
    } catch (const std::logic_error&) {
      throw simlb::ConfigError("bad list entry '" + item + "'");
    }
  }
  if (out.empty()) throw simlb::ConfigError("empty list");
  return out;
}

struct RunArgs {
  std::string scenario;
  std::string balancer = "both";
  std::optional<std::uint64_t> seed;
  std::optional<double> scale;
  std::string out;
  std::string dcs;
  std::string vms;
  std::optional<std::int64_t> tasks;
  std::optional<int> threshold;
  std::string config;
  std::optional<int> reps;
  int jobs = 1;
  bool check = false;
};

int run(const RunArgs& a) {
  simlb::ScenarioConfig c;
  if (!a.config.empty()) {
    c = simlb::load_config(a.config);
    if (!a.scenario.empty() && simlb::parse_scenario(a.scenario) != c.scenario) {
      throw simlb::ConfigError("--scenario disagrees with the config file");
    }
  } else {
    if (a.scenario.empty()) throw simlb::ConfigError("--scenario or --config is required");
    c = simlb::default_scenario(simlb::parse_scenario(a.scenario));
  }
  if (a.balancer == "both") {
    if (a.config.empty() && c.scenario != simlb::ScenarioKind::ThresholdSweep) {
      c.balancers = {simlb::BalancerKind::Throttled, simlb::BalancerKind::Sbdlb};
    }
  } else {
    c.balancers = {simlb::parse_balancer(a.balancer)};
  }
  if (a.seed) c.seed = *a.seed;
  if (a.scale) c.scale = *a.scale;
  if (!a.dcs.empty()) c.dcs = parse_int_list(a.dcs);
  if (!a.vms.empty()) c.vms_per_dc = parse_int_list(a.vms);
  if (a.tasks) c.batches.total_tasks = *a.tasks;
  if (a.threshold) c.thresholds = {*a.threshold};
  if (a.reps) c.reps = *a.reps;
  if (a.check) c.model.check_invariants = true;

  simlb::RunnerOptions opts;
  opts.out_dir = a.out;
  opts.jobs = a.jobs;
  const char* trace = std::getenv("SIMLB_TRACE");
  opts.trace = trace != nullptr && std::string(trace) == "1";
  const simlb::ScenarioOutcome outcome = simlb::run_scenario(c, opts);

  std::cout << simlb::kSummaryCsvHeader << '\n';
  for (const auto& row : outcome.summary_rows) std::cout << row << '\n';
  if (!outcome.stats_rows.empty()) {
    std::cout << '\n' << simlb::kStatsCsvHeader << '\n';
    for (const auto& row : outcome.stats_rows) std::cout << row << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Load-balancer simulation runner"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario sweep");
  run_cmd->add_option("--scenario", ra.scenario, "s1 | s2 | s3 | s4 | threshold")
      ->check(CLI::IsMember({"s1", "s2", "s3", "s4", "threshold"}));
  run_cmd->add_option("--balancer", ra.balancer, "sbdlb | throttled | both")
      ->check(CLI::IsMember({"sbdlb", "throttled", "both"}));
  run_cmd->add_option("--seed", ra.seed, "Base seed; point i uses seed + i");
  run_cmd->add_option("--scale", ra.scale, "Workload scale in (0, 1]");
  run_cmd->add_option("--out", ra.out, "Output directory")->required();
  run_cmd->add_option("--dcs", ra.dcs, "DC counts, e.g. 1-8 or 2,4");
  run_cmd->add_option("--vms", ra.vms, "VMs per DC, e.g. 10-80:10");
  run_cmd->add_option("--tasks", ra.tasks, "Fixed task count per run (batched scenarios)");
  run_cmd->add_option("--threshold", ra.threshold, "SBDLB task threshold");
  run_cmd->add_option("--config", ra.config, "JSON config or run manifest");
  run_cmd->add_option("--reps", ra.reps, "Repetitions per sweep point");
  run_cmd->add_option("--jobs", ra.jobs, "Parallel simulation instances")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--check-invariants", ra.check, "Verify conservation after every event");

  std::string ca, cb, cout_path;
  auto* cmp_cmd = app.add_subcommand("compare", "Paired comparison of two result directories");
  cmp_cmd->add_option("--a", ca, "Baseline result directory")->required();
  cmp_cmd->add_option("--b", cb, "Result directory compared against the baseline")->required();
  cmp_cmd->add_option("--out", cout_path, "stats.csv to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return run(ra);
    simlb::compare_dirs(ca, cb, cout_path);
    return 0;
  } catch (const simlb::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const simlb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const simlb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
