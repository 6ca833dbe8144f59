#include "simlb/simulation.hpp"

#include <algorithm>
#include <memory>
#include <string>

#include "simlb/error.hpp"
#include "simlb/event_queue.hpp"

namespace simlb {

std::string_view to_string(ExecutionModel model) {
  return model == ExecutionModel::Reservation ? "reservation" : "proportional";
}

ExecutionModel parse_execution_model(std::string_view text) {
  if (text == "reservation") return ExecutionModel::Reservation;
  if (text == "proportional") return ExecutionModel::ProportionalShare;
  throw ConfigError("unknown execution model '" + std::string(text) + "'");
}

namespace {

enum class TaskPhase : std::uint8_t { Pending, Queued, Running, Finished };

class CloudSimulation {
 public:
  CloudSimulation(const SimulationParams& params, std::vector<Task> tasks,
                  std::span<const BatchArrival> schedule)
      : params_(params),
        model_(CloudModel::build(params.dcs, alternating_tiers(params.vms_per_dc),
                                 params.cost_rates)),
        tasks_(std::move(tasks)),
        phase_(tasks_.size(), TaskPhase::Pending),
        progress_(tasks_.size()),
        last_update_(model_.vms().size(), 0.0),
        schedule_(schedule.begin(), schedule.end()),
        usage_(model_.vms().size()) {
    if (params.balancer == BalancerKind::Sbdlb) {
      policy_ = std::make_unique<SbdlbBalancer>(
          NormalizationBounds::from_categories(params.categories, params.floor_fraction),
          params.task_threshold);
    } else {
      policy_ = std::make_unique<ThrottledBalancer>(model_.vms().size(), params.throttled_dispatch);
    }
    batch_offset_.reserve(schedule_.size() + 1);
    batch_offset_.push_back(0);
    for (const auto& b : schedule_) batch_offset_.push_back(batch_offset_.back() + b.tasks);
    if (batch_offset_.back() != static_cast<std::int64_t>(tasks_.size())) {
      throw ConfigError("schedule lists " + std::to_string(batch_offset_.back()) +
                        " tasks but " + std::to_string(tasks_.size()) + " were generated");
    }
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      if (tasks_[i].id != i) throw ConfigError("task ids must equal their index");
    }
    for (const VmState& vm : model_.vms()) {
      usage_[vm.id()] = {vm.id(), vm.dc(), vm.spec().tier, 0, 0};
    }
  }

  SimulationResult run(std::ostream* trace) {
    sim_.set_trace(trace);
    sim_.on(EventKind::BatchArrival, [this](const SimEvent& e) { on_batch(e); });
    sim_.on(EventKind::TaskArrival, [this](const SimEvent& e) { on_arrival(e); });
    sim_.on(EventKind::TaskCompletion, [this](const SimEvent& e) { on_completion_event(e); });
    sim_.on(EventKind::HourBoundary, [this](const SimEvent& e) { on_hour(e); });
    sim_.on(EventKind::SimulationEnd, [this](const SimEvent&) { sim_.stop(); });

    for (std::size_t b = 0; b < schedule_.size(); ++b) {
      sim_.schedule(schedule_[b].time, EventKind::BatchArrival, b);
    }
    if (params_.hour_events && !schedule_.empty()) {
      const SimTime last = schedule_.back().time;
      for (std::uint64_t h = 0; static_cast<double>(h) * params_.hour_length_sec <= last; ++h) {
        sim_.schedule(static_cast<double>(h) * params_.hour_length_sec, EventKind::HourBoundary,
                      h);
      }
    }
    if (params_.horizon) sim_.schedule(*params_.horizon, EventKind::SimulationEnd);

    const std::uint64_t processed = sim_.run();
    if (params_.check_invariants) verify_all();

    if (!params_.horizon) {
      // Unbounded runs must drain completely.
      if (!queue_.empty() || arrivals_ != completions_ || arrivals_ != tasks_.size()) {
        throw InvariantViolation("run ended with " + std::to_string(queue_.size()) +
                                 " queued tasks and " + std::to_string(arrivals_ - completions_ - queue_.size()) +
                                 " in flight");
      }
    }

    SimulationResult result;
    result.tasks = std::move(tasks_);
    result.vm_usage = std::move(usage_);
    for (const auto& dc : model_.data_centers()) result.dc_rates.push_back(dc.cost_rates);
    result.events_processed = processed;
    result.arrivals = arrivals_;
    result.completions = completions_;
    result.peak_queue_length = peak_queue_;
    result.end_time = sim_.now();
    return result;
  }

 private:
  void on_batch(const SimEvent& e) {
    const auto b = e.primary;
    for (auto id = batch_offset_[b]; id < batch_offset_[b + 1]; ++id) {
      sim_.schedule(e.time, EventKind::TaskArrival, static_cast<std::uint64_t>(id));
    }
  }

  void on_arrival(const SimEvent& e) {
    const TaskId id = e.primary;
    if (phase_[id] != TaskPhase::Pending) {
      throw InvariantViolation("task " + std::to_string(id) + " arrived twice");
    }
    ++arrivals_;
    const BalancerDecision d = policy_->select(model_.vms(), tasks_[id]);
    if (const auto* a = std::get_if<Assign>(&d)) {
      advance(a->vm, e.time);
      model_.vm(a->vm).allocate(id, a->demand, policy_->max_active_tasks());
      start(id, *a, e.time);
      reschedule(a->vm, e.time);
      if (params_.check_invariants) verify_vm(a->vm);
    } else {
      queue_.push(id);
      phase_[id] = TaskPhase::Queued;
      ++queued_;
      peak_queue_ = std::max(peak_queue_, queue_.size());
    }
    if (params_.check_invariants) verify_counts();
  }

  void on_completion_event(const SimEvent& e) {
    const TaskId id = e.primary;
    const auto vm = static_cast<VmId>(e.secondary);
    if (phase_[id] != TaskPhase::Running) {
      throw InvariantViolation("completion for task " + std::to_string(id) + " that is not running");
    }
    phase_[id] = TaskPhase::Finished;
    tasks_[id].finish = e.time;
    ++completions_;
    advance(vm, e.time);
    const auto placed = on_completion(id, vm, model_.vms(), queue_, *policy_, tasks_,
                                      params_.queue_mode);
    --running_;
    for (const auto& p : placed) {
      if (p.assign.vm != vm) throw InvariantViolation("reassessment placed a task off the freed vm");
      --queued_;
      start(p.task, p.assign, e.time);
    }
    reschedule(vm, e.time);
    if (params_.check_invariants) {
      verify_vm(vm);
      verify_counts();
    }
  }

  void on_hour(const SimEvent&) {
    if (params_.check_invariants) verify_all();
  }

  void start(TaskId id, const Assign& a, SimTime now) {
    Task& task = tasks_[id];
    task.start = now;
    task.vm = a.vm;
    phase_[id] = TaskPhase::Running;
    ++running_;
    VmUsage& u = usage_[a.vm];
    ++u.tasks;
    u.peak_active = std::max(u.peak_active, model_.vm(a.vm).active_tasks());
    Progress& p = progress_[id];
    p.remaining_mi = task.length_mi;
    p.scheduled = false;
    if (params_.execution == ExecutionModel::Reservation) {
      p.rate = a.demand.mips;
      p.seq = sim_.schedule(now + execution_duration(task.length_mi, a.demand),
                            EventKind::TaskCompletion, id, a.vm);
      p.scheduled = true;
    }
  }

  // Brings the remaining work of every task on `vm` up to `now`.
  void advance(VmId vm, SimTime now) {
    if (params_.execution == ExecutionModel::Reservation) return;
    const double dt = now - last_update_[vm];
    last_update_[vm] = now;
    if (dt <= 0) return;
    for (const auto& [task, demand] : model_.vm(vm).per_task_demand()) {
      Progress& p = progress_[task];
      p.remaining_mi = std::max(0.0, p.remaining_mi - p.rate * dt);
    }
  }

  // Recomputes proportional rates on `vm` and moves completion events.
  void reschedule(VmId vm, SimTime now) {
    if (params_.execution == ExecutionModel::Reservation) return;
    const VmState& state = model_.vm(vm);
    double reserved = 0.0;
    for (const auto& [task, demand] : state.per_task_demand()) reserved += demand.mips;
    for (const auto& [task, demand] : state.per_task_demand()) {
      Progress& p = progress_[task];
      const double rate = state.capacity().mips * demand.mips / reserved;
      if (p.scheduled && rate == p.rate) continue;
      if (p.scheduled) sim_.cancel(p.seq);
      p.rate = rate;
      p.seq = sim_.schedule(now + p.remaining_mi / rate, EventKind::TaskCompletion, task, vm);
      p.scheduled = true;
    }
  }

  // Only the VM touched by an event can change, so per-event checks cover
  // that VM plus the O(1) counters; verify_all() sweeps everything.
  void verify_vm(VmId id) const {
    const VmState& vm = model_.vm(id);
    vm.check_invariants();
    if (vm.active_tasks() > policy_->max_active_tasks()) {
      throw ThresholdExceeded("vm " + std::to_string(vm.id()) + " exceeds task threshold");
    }
  }

  void verify_counts() const {
    if (queued_ != queue_.size()) throw InvariantViolation("queued count disagrees with queue");
    if (arrivals_ != queued_ + running_ + completions_) {
      throw InvariantViolation("arrivals != queued + running + finished");
    }
  }

  void verify_all() const {
    verify_counts();
    std::size_t running = 0;
    for (const VmState& vm : model_.vms()) {
      verify_vm(vm.id());
      running += static_cast<std::size_t>(vm.active_tasks());
    }
    std::size_t queued = 0;
    std::size_t in_flight = 0;
    for (std::size_t i = 0; i < phase_.size(); ++i) {
      if (phase_[i] == TaskPhase::Queued) {
        ++queued;
        if (!queue_.contains(i)) throw InvariantViolation("queued task missing from wait queue");
      } else if (phase_[i] == TaskPhase::Running) {
        ++in_flight;
        if (!tasks_[i].vm || !model_.vm(*tasks_[i].vm).has_task(i)) {
          throw InvariantViolation("running task not held by its vm");
        }
      }
    }
    if (queued != queue_.size() || in_flight != running) {
      throw InvariantViolation("task phases disagree with queue and vm state");
    }
  }

  struct Progress {
    double remaining_mi = 0.0;
    double rate = 0.0;  // MIPS currently applied
    std::uint64_t seq = 0;
    bool scheduled = false;
  };

  SimulationParams params_;
  CloudModel model_;
  std::vector<Task> tasks_;
  std::vector<TaskPhase> phase_;
  std::vector<Progress> progress_;
  std::vector<SimTime> last_update_;
  std::vector<BatchArrival> schedule_;
  std::vector<std::int64_t> batch_offset_;
  std::vector<VmUsage> usage_;
  std::unique_ptr<LoadBalancer> policy_;
  WaitQueue queue_;
  Simulator sim_;
  std::uint64_t arrivals_ = 0;
  std::uint64_t completions_ = 0;
  std::size_t peak_queue_ = 0;
  std::size_t queued_ = 0;
  std::size_t running_ = 0;
};

}  // namespace

SimulationResult simulate(const SimulationParams& params, std::vector<Task> tasks,
                          std::span<const BatchArrival> schedule, std::ostream* trace) {
  CloudSimulation sim(params, std::move(tasks), schedule);
  return sim.run(trace);
}

}  // namespace simlb
