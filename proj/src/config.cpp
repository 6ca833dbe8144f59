#include "simlb/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <set>

#include "simlb/error.hpp"

namespace simlb {

using nlohmann::json;

namespace {

CategoryName parse_category(std::string_view text) {
  if (text == "reels") return CategoryName::Reels;
  if (text == "images") return CategoryName::Images;
  if (text == "text") return CategoryName::Text;
  throw ConfigError("unknown task category '" + std::string(text) + "'");
}

void reject_unknown(const json& j, std::string_view where, std::set<std::string> known) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json category_json(const TaskCategory& c) {
  return {{"name", to_string(c.name)},         {"size_min_bytes", c.size_min_bytes},
          {"size_max_bytes", c.size_max_bytes}, {"ci_min", c.ci_min},
          {"ci_max", c.ci_max},                 {"share", c.share}};
}

TaskCategory category_from(const json& j) {
  reject_unknown(j, "category", {"name", "size_min_bytes", "size_max_bytes", "ci_min", "ci_max",
                                 "share"});
  TaskCategory c;
  c.name = parse_category(get<std::string>(j, "name"));
  c.size_min_bytes = get<std::uint64_t>(j, "size_min_bytes");
  c.size_max_bytes = get<std::uint64_t>(j, "size_max_bytes");
  c.ci_min = get<double>(j, "ci_min");
  c.ci_max = get<double>(j, "ci_max");
  c.share = get<double>(j, "share");
  return c;
}

}  // namespace

json to_json(const ScenarioConfig& config) {
  const SimulationParams& m = config.model;
  json balancers = json::array();
  for (BalancerKind b : config.balancers) balancers.push_back(to_string(b));
  json categories = json::array();
  for (const TaskCategory& c : m.categories) categories.push_back(category_json(c));
  json batches = {{"batch_count", config.batches.batch_count},
                  {"full_batch_size", config.batches.full_batch_size},
                  {"interval_sec", config.batches.interval_sec},
                  {"total_tasks", nullptr}};
  if (config.batches.total_tasks) batches["total_tasks"] = *config.batches.total_tasks;
  return {
      {"scenario", to_string(config.scenario)},
      {"dcs", config.dcs},
      {"vms_per_dc", config.vms_per_dc},
      {"thresholds", config.thresholds},
      {"balancers", balancers},
      {"seed", config.seed},
      {"scale", config.scale},
      {"reps", config.reps},
      {"batches", batches},
      {"log_uniform_size", config.log_uniform_size},
      {"model",
       {{"floor_fraction", m.floor_fraction},
        {"queue_mode", to_string(m.queue_mode)},
        {"throttled_dispatch", to_string(m.throttled_dispatch)},
        {"execution", to_string(m.execution)},
        {"hour_length_sec", m.hour_length_sec},
        {"check_invariants", m.check_invariants},
        {"cost_rates",
         {{"cpu_per_sec", m.cost_rates.cpu_per_sec},
          {"ram_per_mb", m.cost_rates.ram_per_mb},
          {"bw_per_mbps", m.cost_rates.bw_per_mbps},
          {"storage_per_mb", m.cost_rates.storage_per_mb}}},
        {"categories", categories}}},
  };
}

ScenarioConfig config_from_json(const json& j) {
  return config_from_json(j, default_scenario(ScenarioKind::S1));
}

ScenarioConfig config_from_json(const json& j, const ScenarioConfig& base) {
  reject_unknown(j, "config",
                 {"scenario", "dcs", "vms_per_dc", "thresholds", "balancers", "seed", "scale",
                  "reps", "batches", "log_uniform_size", "model"});
  ScenarioConfig c = j.contains("scenario")
                         ? default_scenario(parse_scenario(get<std::string>(j, "scenario")))
                         : base;
  if (j.contains("dcs")) c.dcs = get<std::vector<int>>(j, "dcs");
  if (j.contains("vms_per_dc")) c.vms_per_dc = get<std::vector<int>>(j, "vms_per_dc");
  if (j.contains("thresholds")) c.thresholds = get<std::vector<int>>(j, "thresholds");
  if (j.contains("balancers")) {
    c.balancers.clear();
    for (const auto& name : get<std::vector<std::string>>(j, "balancers")) {
      c.balancers.push_back(parse_balancer(name));
    }
  }
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("scale")) c.scale = get<double>(j, "scale");
  if (j.contains("reps")) c.reps = get<int>(j, "reps");
  if (j.contains("log_uniform_size")) c.log_uniform_size = get<bool>(j, "log_uniform_size");
  if (j.contains("batches")) {
    const json& b = j.at("batches");
    reject_unknown(b, "batches", {"batch_count", "full_batch_size", "interval_sec", "total_tasks"});
    if (b.contains("batch_count")) c.batches.batch_count = get<std::int64_t>(b, "batch_count");
    if (b.contains("full_batch_size")) {
      c.batches.full_batch_size = get<std::int64_t>(b, "full_batch_size");
    }
    if (b.contains("interval_sec")) c.batches.interval_sec = get<double>(b, "interval_sec");
    if (b.contains("total_tasks")) {
      if (b.at("total_tasks").is_null()) {
        c.batches.total_tasks.reset();
      } else {
        c.batches.total_tasks = get<std::int64_t>(b, "total_tasks");
      }
    }
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m, "model",
                   {"floor_fraction", "queue_mode", "throttled_dispatch", "execution",
                    "hour_length_sec", "check_invariants", "cost_rates", "categories"});
    SimulationParams& p = c.model;
    if (m.contains("floor_fraction")) p.floor_fraction = get<double>(m, "floor_fraction");
    if (m.contains("queue_mode")) p.queue_mode = parse_queue_mode(get<std::string>(m, "queue_mode"));
    if (m.contains("throttled_dispatch")) {
      p.throttled_dispatch = parse_throttled_dispatch(get<std::string>(m, "throttled_dispatch"));
    }
    if (m.contains("execution")) {
      p.execution = parse_execution_model(get<std::string>(m, "execution"));
    }
    if (m.contains("hour_length_sec")) p.hour_length_sec = get<double>(m, "hour_length_sec");
    if (m.contains("check_invariants")) p.check_invariants = get<bool>(m, "check_invariants");
    if (m.contains("cost_rates")) {
      const json& r = m.at("cost_rates");
      reject_unknown(r, "cost_rates", {"cpu_per_sec", "ram_per_mb", "bw_per_mbps", "storage_per_mb"});
      if (r.contains("cpu_per_sec")) p.cost_rates.cpu_per_sec = get<double>(r, "cpu_per_sec");
      if (r.contains("ram_per_mb")) p.cost_rates.ram_per_mb = get<double>(r, "ram_per_mb");
      if (r.contains("bw_per_mbps")) p.cost_rates.bw_per_mbps = get<double>(r, "bw_per_mbps");
      if (r.contains("storage_per_mb")) {
        p.cost_rates.storage_per_mb = get<double>(r, "storage_per_mb");
      }
    }
    if (m.contains("categories")) {
      const json& cats = m.at("categories");
      if (!cats.is_array()) throw ConfigError("categories must be an array");
      p.categories.clear();
      for (const json& cat : cats) p.categories.push_back(category_from(cat));
    }
  }
  for (TaskCategory& cat : c.model.categories) cat.log_uniform_size = c.log_uniform_size;
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("config")) return config_from_json(j.at("config"));
  return config_from_json(j);
}

std::string content_hash(const json& j) {
  const std::string body = j.dump();
  const std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest.data(), &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

}  // namespace simlb
