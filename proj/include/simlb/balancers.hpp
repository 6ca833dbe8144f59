#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "simlb/cloud_model.hpp"
#include "simlb/workload.hpp"

namespace simlb {

// Min-max range of task lengths mapped onto [floor * capacity, capacity].
struct NormalizationBounds {
  double mi_min = 0.1;
  double mi_max = 1e7;
  double floor_fraction = 0.05;

  void validate() const;
  // Global MI range of the configured category table.
  static NormalizationBounds from_categories(std::span<const TaskCategory> categories,
                                             double floor_fraction);
};

// Per-resource demand of a task on a VM of this spec:
//   (len - mi_min) / (mi_max - mi_min) * (C - floor*C) + floor*C
// where C is the VM's total capacity for that resource. Throws OutOfBounds if
// the length falls outside [mi_min, mi_max].
ResourceVector normalize_demand(double length_mi, const VmSpec& spec,
                                const NormalizationBounds& bounds);

inline constexpr double kInfeasibleScore = -1.0;

// nullopt: the VM is at the task threshold and is not a candidate.
// kInfeasibleScore: some demand component exceeds what is available.
// Otherwise available MIPS + RAM + BW.
std::optional<double> sbdlb_score(const VmState& vm, const ResourceVector& demand, int threshold);

struct Assign {
  VmId vm = 0;
  ResourceVector demand;
};

struct Enqueue {};

using BalancerDecision = std::variant<Assign, Enqueue>;

inline bool is_assign(const BalancerDecision& d) { return std::holds_alternative<Assign>(d); }

// Highest non-negative score wins, ties to the lowest VM id; Enqueue when every
// VM is excluded or infeasible.
BalancerDecision sbdlb_select(std::span<const VmState> vms, double length_mi,
                              const NormalizationBounds& bounds, int threshold);

class ThrottledTable {
 public:
  explicit ThrottledTable(std::size_t vm_count) : busy_(vm_count, false) {}

  std::size_t size() const { return busy_.size(); }
  bool busy(VmId vm) const { return busy_.at(vm); }
  void mark_busy(VmId vm) { busy_.at(vm) = true; }
  void mark_available(VmId vm) { busy_.at(vm) = false; }
  std::optional<VmId> first_available() const;

 private:
  std::vector<bool> busy_;
};

// First Available VM in ascending id order takes the task exclusively with
// its full capacity and becomes Busy. Enqueue when none is Available.
BalancerDecision throttled_select(ThrottledTable& table, std::span<const VmState> vms);

// FIFO of waiting task ids with no duplicates.
class WaitQueue {
 public:
  // Throws InvariantViolation if the task is already queued.
  void push(TaskId task);
  bool contains(TaskId task) const { return members_.contains(task); }
  bool empty() const { return order_.empty(); }
  std::size_t size() const { return order_.size(); }
  const std::deque<TaskId>& items() const { return order_; }

  // Removes every task for which `take` returns true, front to back, stopping
  // early when `take` asks to. Remaining tasks keep their relative order.
  template <typename Fn>
  void drain(Fn&& take);

 private:
  std::deque<TaskId> order_;
  std::unordered_set<TaskId> members_;
};

enum class QueueMode { Scan, HeadOnly };
enum class BalancerKind { Sbdlb, Throttled };

// How the throttled baseline handles a task when no VM is Available.
//   Pooled:     the task waits in the shared queue for whichever VM frees first.
//   Sequential: the index table is walked round-robin from the VM after the
//               last assignment; with every VM Busy the task is bound to the
//               next VM in sequence and waits for that VM only.
enum class ThrottledDispatch { Pooled, Sequential };

std::string_view to_string(QueueMode mode);
std::string_view to_string(BalancerKind kind);
std::string_view to_string(ThrottledDispatch dispatch);
QueueMode parse_queue_mode(std::string_view text);
BalancerKind parse_balancer(std::string_view text);
ThrottledDispatch parse_throttled_dispatch(std::string_view text);

// Seconds to run `length_mi` at the reserved MIPS. Throws InvariantViolation
// when the reservation has no MIPS.
double execution_duration(double length_mi, const ResourceVector& demand);

class LoadBalancer {
 public:
  virtual ~LoadBalancer() = default;

  virtual BalancerKind kind() const = 0;
  // Concurrent tasks a VM may hold under this policy.
  virtual int max_active_tasks() const = 0;

  // Decision over the whole VM population. A returned Assign has not been
  // applied to the VM yet; the caller allocates it.
  virtual BalancerDecision select(std::span<const VmState> vms, const Task& task) = 0;

  // Decision restricted to a single VM, for reassessment after that VM frees
  // resources.
  virtual BalancerDecision select_on(const VmState& vm, const Task& task) = 0;

  // Called after a task on `vm` released its resources.
  virtual void on_released(VmId vm) = 0;

  // Whether a waiting task may be placed on `vm` at all. Head-only
  // reassessment skips tasks that are not eligible instead of stopping.
  virtual bool eligible(VmId /*vm*/, const Task& /*task*/) const { return true; }
};

class SbdlbBalancer final : public LoadBalancer {
 public:
  SbdlbBalancer(NormalizationBounds bounds, int threshold);

  BalancerKind kind() const override { return BalancerKind::Sbdlb; }
  int max_active_tasks() const override { return threshold_; }
  BalancerDecision select(std::span<const VmState> vms, const Task& task) override;
  BalancerDecision select_on(const VmState& vm, const Task& task) override;
  void on_released(VmId) override {}

  const NormalizationBounds& bounds() const { return bounds_; }

 private:
  NormalizationBounds bounds_;
  int threshold_;
};

class ThrottledBalancer final : public LoadBalancer {
 public:
  explicit ThrottledBalancer(std::size_t vm_count,
                             ThrottledDispatch dispatch = ThrottledDispatch::Pooled);

  BalancerKind kind() const override { return BalancerKind::Throttled; }
  int max_active_tasks() const override { return 1; }
  BalancerDecision select(std::span<const VmState> vms, const Task& task) override;
  BalancerDecision select_on(const VmState& vm, const Task& task) override;
  void on_released(VmId vm) override { table_.mark_available(vm); }
  bool eligible(VmId vm, const Task& task) const override;

  const ThrottledTable& table() const { return table_; }
  ThrottledDispatch dispatch() const { return dispatch_; }
  // Sequential dispatch only: the VM a waiting task is bound to.
  std::optional<VmId> bound_vm(TaskId task) const;

 private:
  ThrottledTable table_;
  ThrottledDispatch dispatch_;
  VmId next_ = 0;
  std::unordered_map<TaskId, VmId> bound_;
};

struct Placement {
  TaskId task = 0;
  Assign assign;
};

// Releases `finished` from `vm`, then walks the wait queue front to back and
// places every task the policy accepts on the freed VM, allocating as it goes.
// In HeadOnly mode the walk stops at the first task that does not fit.
//
// Only `vm` is offered because every queued task was already rejected by all
// other VMs and their state has not loosened since; with that invariant the
// restricted choice equals a full select().
std::vector<Placement> on_completion(TaskId finished, VmId vm, std::span<VmState> vms,
                                     WaitQueue& queue, LoadBalancer& policy,
                                     std::span<const Task> tasks, QueueMode mode);

// Reference reassessment that offers every VM to every queued task. Same
// contract as on_completion without the single-VM shortcut; used to check it.
std::vector<Placement> reassess_all(std::span<VmState> vms, WaitQueue& queue,
                                    LoadBalancer& policy, std::span<const Task> tasks,
                                    QueueMode mode);

template <typename Fn>
void WaitQueue::drain(Fn&& take) {
  std::deque<TaskId> kept;
  auto it = order_.begin();
  for (; it != order_.end(); ++it) {
    const auto [remove, stop] = take(*it);
    if (remove) {
      members_.erase(*it);
    } else {
      kept.push_back(*it);
    }
    if (stop) {
      ++it;
      break;
    }
  }
  kept.insert(kept.end(), it, order_.end());
  order_ = std::move(kept);
}

}  // namespace simlb
