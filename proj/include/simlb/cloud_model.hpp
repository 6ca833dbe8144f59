#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace simlb {

using VmId = std::uint32_t;
using DcId = std::uint32_t;
using TaskId = std::uint64_t;

struct ResourceVector {
  double mips = 0.0;
  double ram_mb = 0.0;
  double bw_mbps = 0.0;

  ResourceVector& operator+=(const ResourceVector& o);
  ResourceVector& operator-=(const ResourceVector& o);
  ResourceVector operator*(double k) const { return {mips * k, ram_mb * k, bw_mbps * k}; }
  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
  friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) { return a -= b; }
  friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

  double sum() const { return mips + ram_mb + bw_mbps; }

  // Componentwise <= other, with a relative slack of kFitTolerance of `scale`
  // to absorb rounding in the normalization arithmetic.
  bool fits_within(const ResourceVector& other, const ResourceVector& scale) const;
};

inline constexpr double kFitTolerance = 1e-9;

// Dollar rates per unit. Only cpu_per_sec enters the headline cost metric.
struct CostRates {
  double cpu_per_sec = 3.0;
  double ram_per_mb = 0.004;
  double bw_per_mbps = 0.01;
  double storage_per_mb = 0.0001;

  void validate() const;
};

struct HostSpec {
  int ram_mb = 0;
  int storage_gb = 0;
  int bw_mbps = 0;
  int cores = 0;

  static HostSpec type1() { return {1024, 10, 1000, 4}; }
  static HostSpec type2() { return {2048, 20, 2000, 8}; }
  void validate() const;
  friend bool operator==(const HostSpec&, const HostSpec&) = default;
};

enum class VmTier : std::uint8_t { LowSpec, HighSpec };

std::string_view to_string(VmTier tier);

struct VmSpec {
  double mips_per_core = 0.0;
  int cores = 0;
  double ram_mb = 0.0;
  double bw_mbps = 0.0;
  int storage_gb = 0;
  VmTier tier = VmTier::LowSpec;

  static VmSpec low_spec() { return {500.0, 1, 1024.0, 1000.0, 10, VmTier::LowSpec}; }
  static VmSpec high_spec() { return {1000.0, 2, 2048.0, 2000.0, 20, VmTier::HighSpec}; }
  static VmSpec for_tier(VmTier tier) { return tier == VmTier::HighSpec ? high_spec() : low_spec(); }

  // Throws ConfigError unless every field is positive.
  void validate() const;
  friend bool operator==(const VmSpec&, const VmSpec&) = default;
};

// Total MIPS is per-core MIPS times cores; RAM and bandwidth are copied.
ResourceVector total_capacity(const VmSpec& spec);

// A VM's capacity and live reservations. `available` is always recomputed as
// capacity minus the sum of reservations in task-id order, so the value
// depends only on the set of active tasks, never on the order they arrived.
class VmState {
 public:
  VmState(VmId id, DcId dc, const VmSpec& spec);

  VmId id() const { return id_; }
  DcId dc() const { return dc_; }
  const VmSpec& spec() const { return spec_; }
  const ResourceVector& capacity() const { return capacity_; }
  const ResourceVector& available() const { return available_; }
  int active_tasks() const { return static_cast<int>(per_task_.size()); }
  const std::map<TaskId, ResourceVector>& per_task_demand() const { return per_task_; }
  bool has_task(TaskId task) const { return per_task_.contains(task); }

  bool can_fit(const ResourceVector& demand) const;

  // Throws ThresholdExceeded if active_tasks() >= max_active_tasks,
  // InsufficientResources if demand does not fit, InvariantViolation if the
  // task is already running here.
  void allocate(TaskId task, const ResourceVector& demand, int max_active_tasks);

  // Returns the demand that was held. Throws UnknownTask.
  ResourceVector release(TaskId task);

  // capacity - available == sum of demands, 0 <= available <= capacity.
  // Throws InvariantViolation describing the first failure.
  void check_invariants() const;

  friend bool operator==(const VmState&, const VmState&) = default;

 private:
  void recompute_available();

  VmId id_;
  DcId dc_;
  VmSpec spec_;
  ResourceVector capacity_;
  ResourceVector available_;
  std::map<TaskId, ResourceVector> per_task_;
};

// First-fit by host index on cores, RAM and storage. Returns the host index
// for each VM. Throws PlacementFailure naming the first VM that does not fit.
std::vector<std::size_t> place_vms(std::span<const HostSpec> hosts, std::span<const VmSpec> vms);

// Smallest Type-1/Type-2 host mix for the given VMs: one Type-2 per high-spec
// VM, low-spec VMs paired on Type-2 hosts, an odd one out on a Type-1.
std::vector<HostSpec> provision_hosts(std::span<const VmSpec> vms);

struct DataCenter {
  DcId id = 0;
  CostRates cost_rates;
  std::vector<HostSpec> hosts;
  std::vector<VmId> vms;                 // global ids, ascending
  std::vector<std::size_t> host_of_vm;   // parallel to vms
};

// A set of data centers with globally numbered VMs. VM ids are dense and
// assigned DC by DC, so vms()[id].id() == id.
class CloudModel {
 public:
  // tiers[i] is the tier of the i-th VM inside every DC.
  static CloudModel build(int dc_count, std::span<const VmTier> tiers, const CostRates& rates);

  std::span<const DataCenter> data_centers() const { return dcs_; }
  std::span<const VmState> vms() const { return vms_; }
  std::span<VmState> vms() { return vms_; }
  VmState& vm(VmId id) { return vms_.at(id); }
  const VmState& vm(VmId id) const { return vms_.at(id); }

 private:
  std::vector<DataCenter> dcs_;
  std::vector<VmState> vms_;
};

// Alternating low/high by VM index, starting with low.
std::vector<VmTier> alternating_tiers(int vms_per_dc);

}  // namespace simlb
