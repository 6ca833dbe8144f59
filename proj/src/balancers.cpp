#include "simlb/balancers.hpp"

#include <limits>
#include <string>

#include "simlb/csv.hpp"
#include "simlb/error.hpp"

namespace simlb {

void NormalizationBounds::validate() const {
  if (!(mi_min < mi_max)) throw ConfigError("normalization bounds need mi_min < mi_max");
  if (!(floor_fraction > 0.0 && floor_fraction <= 1.0)) {
    throw ConfigError("floor_fraction must be in (0, 1]");
  }
}

NormalizationBounds NormalizationBounds::from_categories(std::span<const TaskCategory> categories,
                                                         double floor_fraction) {
  validate_categories(categories);
  NormalizationBounds b;
  b.mi_min = std::numeric_limits<double>::infinity();
  b.mi_max = -std::numeric_limits<double>::infinity();
  for (const auto& c : categories) {
    b.mi_min = std::min(b.mi_min, c.min_mi());
    b.mi_max = std::max(b.mi_max, c.max_mi());
  }
  b.floor_fraction = floor_fraction;
  b.validate();
  return b;
}

ResourceVector normalize_demand(double length_mi, const VmSpec& spec,
                                const NormalizationBounds& bounds) {
  if (!(length_mi >= bounds.mi_min && length_mi <= bounds.mi_max)) {
    throw OutOfBounds("task length " + format_number(length_mi) + " MI outside [" +
                      format_number(bounds.mi_min) + ", " + format_number(bounds.mi_max) + "]");
  }
  const double position = (length_mi - bounds.mi_min) / (bounds.mi_max - bounds.mi_min);
  const auto scale = [&](double capacity) {
    const double lo = bounds.floor_fraction * capacity;
    return position * (capacity - lo) + lo;
  };
  const ResourceVector cap = total_capacity(spec);
  return {scale(cap.mips), scale(cap.ram_mb), scale(cap.bw_mbps)};
}

std::optional<double> sbdlb_score(const VmState& vm, const ResourceVector& demand, int threshold) {
  if (vm.active_tasks() >= threshold) return std::nullopt;
  if (!vm.can_fit(demand)) return kInfeasibleScore;
  return vm.available().sum();
}

BalancerDecision sbdlb_select(std::span<const VmState> vms, double length_mi,
                              const NormalizationBounds& bounds, int threshold) {
  const VmState* best = nullptr;
  ResourceVector best_demand;
  double best_score = kInfeasibleScore;
  // Demand only depends on the VM spec, so cache it per distinct spec.
  const VmSpec* cached_spec = nullptr;
  ResourceVector cached_demand;
  for (const VmState& vm : vms) {
    if (vm.active_tasks() >= threshold) continue;
    if (cached_spec == nullptr || !(*cached_spec == vm.spec())) {
      cached_demand = normalize_demand(length_mi, vm.spec(), bounds);
      cached_spec = &vm.spec();
    }
    const auto score = sbdlb_score(vm, cached_demand, threshold);
    if (!score || *score < 0) continue;
    if (*score > best_score || (*score == best_score && best != nullptr && vm.id() < best->id())) {
      best = &vm;
      best_score = *score;
      best_demand = cached_demand;
    }
  }
  if (best == nullptr) return Enqueue{};
  return Assign{best->id(), best_demand};
}

std::optional<VmId> ThrottledTable::first_available() const {
  for (std::size_t i = 0; i < busy_.size(); ++i) {
    if (!busy_[i]) return static_cast<VmId>(i);
  }
  return std::nullopt;
}

BalancerDecision throttled_select(ThrottledTable& table, std::span<const VmState> vms) {
  const auto vm = table.first_available();
  if (!vm) return Enqueue{};
  table.mark_busy(*vm);
  return Assign{*vm, vms[*vm].capacity()};
}

void WaitQueue::push(TaskId task) {
  if (!members_.insert(task).second) {
    throw InvariantViolation("task " + std::to_string(task) + " is already queued");
  }
  order_.push_back(task);
}

std::string_view to_string(QueueMode mode) {
  return mode == QueueMode::Scan ? "scan" : "head-only";
}

std::string_view to_string(BalancerKind kind) {
  return kind == BalancerKind::Sbdlb ? "sbdlb" : "throttled";
}

std::string_view to_string(ThrottledDispatch dispatch) {
  return dispatch == ThrottledDispatch::Pooled ? "pooled" : "sequential";
}

ThrottledDispatch parse_throttled_dispatch(std::string_view text) {
  if (text == "pooled") return ThrottledDispatch::Pooled;
  if (text == "sequential") return ThrottledDispatch::Sequential;
  throw ConfigError("unknown throttled_dispatch '" + std::string(text) + "'");
}

QueueMode parse_queue_mode(std::string_view text) {
  if (text == "scan") return QueueMode::Scan;
  if (text == "head-only") return QueueMode::HeadOnly;
  throw ConfigError("unknown queue_mode '" + std::string(text) + "'");
}

BalancerKind parse_balancer(std::string_view text) {
  if (text == "sbdlb") return BalancerKind::Sbdlb;
  if (text == "throttled") return BalancerKind::Throttled;
  throw ConfigError("unknown balancer '" + std::string(text) + "'");
}

double execution_duration(double length_mi, const ResourceVector& demand) {
  if (!(demand.mips > 0)) throw InvariantViolation("task reserved no MIPS");
  return length_mi / demand.mips;
}

SbdlbBalancer::SbdlbBalancer(NormalizationBounds bounds, int threshold)
    : bounds_(bounds), threshold_(threshold) {
  bounds_.validate();
  if (threshold_ < 1) throw ConfigError("task_threshold must be >= 1");
}

BalancerDecision SbdlbBalancer::select(std::span<const VmState> vms, const Task& task) {
  return sbdlb_select(vms, task.length_mi, bounds_, threshold_);
}

BalancerDecision SbdlbBalancer::select_on(const VmState& vm, const Task& task) {
  const ResourceVector demand = normalize_demand(task.length_mi, vm.spec(), bounds_);
  const auto score = sbdlb_score(vm, demand, threshold_);
  if (!score || *score < 0) return Enqueue{};
  return Assign{vm.id(), demand};
}

ThrottledBalancer::ThrottledBalancer(std::size_t vm_count, ThrottledDispatch dispatch)
    : table_(vm_count), dispatch_(dispatch) {
  if (vm_count == 0) throw ConfigError("throttled balancer needs at least one vm");
}

BalancerDecision ThrottledBalancer::select(std::span<const VmState> vms, const Task& task) {
  if (dispatch_ == ThrottledDispatch::Pooled) return throttled_select(table_, vms);
  const std::size_t n = table_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto vm = static_cast<VmId>((next_ + k) % n);
    if (!table_.busy(vm)) {
      table_.mark_busy(vm);
      next_ = static_cast<VmId>((vm + 1) % n);
      return Assign{vm, vms[vm].capacity()};
    }
  }
  bound_[task.id] = next_;
  next_ = static_cast<VmId>((next_ + 1) % n);
  return Enqueue{};
}

BalancerDecision ThrottledBalancer::select_on(const VmState& vm, const Task& task) {
  if (table_.busy(vm.id())) return Enqueue{};
  if (dispatch_ == ThrottledDispatch::Sequential) {
    const auto it = bound_.find(task.id);
    if (it == bound_.end() || it->second != vm.id()) return Enqueue{};
    bound_.erase(it);
  }
  table_.mark_busy(vm.id());
  return Assign{vm.id(), vm.capacity()};
}

bool ThrottledBalancer::eligible(VmId vm, const Task& task) const {
  if (dispatch_ == ThrottledDispatch::Pooled) return true;
  const auto bound = bound_vm(task.id);
  return bound && *bound == vm;
}

std::optional<VmId> ThrottledBalancer::bound_vm(TaskId task) const {
  const auto it = bound_.find(task);
  if (it == bound_.end()) return std::nullopt;
  return it->second;
}

namespace {

Placement apply(std::span<VmState> vms, const Task& task, const Assign& a, int limit) {
  vms[a.vm].allocate(task.id, a.demand, limit);
  return {task.id, a};
}

}  // namespace

std::vector<Placement> on_completion(TaskId finished, VmId vm, std::span<VmState> vms,
                                     WaitQueue& queue, LoadBalancer& policy,
                                     std::span<const Task> tasks, QueueMode mode) {
  vms[vm].release(finished);
  policy.on_released(vm);
  std::vector<Placement> placed;
  const int limit = policy.max_active_tasks();
  queue.drain([&](TaskId id) -> std::pair<bool, bool> {
    if (vms[vm].active_tasks() >= limit) return {false, true};
    const Task& task = tasks[id];
    if (!policy.eligible(vm, task)) return {false, false};
    const BalancerDecision d = policy.select_on(vms[vm], task);
    if (const auto* a = std::get_if<Assign>(&d)) {
      placed.push_back(apply(vms, task, *a, limit));
      return {true, false};
    }
    return {false, mode == QueueMode::HeadOnly};
  });
  return placed;
}

std::vector<Placement> reassess_all(std::span<VmState> vms, WaitQueue& queue,
                                    LoadBalancer& policy, std::span<const Task> tasks,
                                    QueueMode mode) {
  std::vector<Placement> placed;
  const int limit = policy.max_active_tasks();
  queue.drain([&](TaskId id) -> std::pair<bool, bool> {
    const Task& task = tasks[id];
    const BalancerDecision d = policy.select(vms, task);
    if (const auto* a = std::get_if<Assign>(&d)) {
      placed.push_back(apply(vms, task, *a, limit));
      return {true, false};
    }
    return {false, mode == QueueMode::HeadOnly};
  });
  return placed;
}

}  // namespace simlb
