#include "simlb/cloud_model.hpp"

#include <cmath>
#include <string>

#include "simlb/csv.hpp"
#include "simlb/error.hpp"

namespace simlb {

ResourceVector& ResourceVector::operator+=(const ResourceVector& o) {
  mips += o.mips;
  ram_mb += o.ram_mb;
  bw_mbps += o.bw_mbps;
  return *this;
}

ResourceVector& ResourceVector::operator-=(const ResourceVector& o) {
  mips -= o.mips;
  ram_mb -= o.ram_mb;
  bw_mbps -= o.bw_mbps;
  return *this;
}

bool ResourceVector::fits_within(const ResourceVector& other, const ResourceVector& scale) const {
  return mips <= other.mips + kFitTolerance * scale.mips &&
         ram_mb <= other.ram_mb + kFitTolerance * scale.ram_mb &&
         bw_mbps <= other.bw_mbps + kFitTolerance * scale.bw_mbps;
}

void CostRates::validate() const {
  if (cpu_per_sec < 0 || ram_per_mb < 0 || bw_per_mbps < 0 || storage_per_mb < 0) {
    throw ConfigError("cost rates must be non-negative");
  }
}

void HostSpec::validate() const {
  if (ram_mb <= 0 || storage_gb <= 0 || bw_mbps <= 0 || cores <= 0) {
    throw ConfigError("host spec fields must be positive");
  }
}

std::string_view to_string(VmTier tier) {
  return tier == VmTier::HighSpec ? "high" : "low";
}

void VmSpec::validate() const {
  if (!(mips_per_core > 0) || cores <= 0 || !(ram_mb > 0) || !(bw_mbps > 0) || storage_gb <= 0) {
    throw ConfigError("vm spec fields must be positive");
  }
}

ResourceVector total_capacity(const VmSpec& spec) {
  spec.validate();
  return {spec.mips_per_core * spec.cores, spec.ram_mb, spec.bw_mbps};
}

VmState::VmState(VmId id, DcId dc, const VmSpec& spec)
    : id_(id), dc_(dc), spec_(spec), capacity_(total_capacity(spec)), available_(capacity_) {}

bool VmState::can_fit(const ResourceVector& demand) const {
  return demand.fits_within(available_, capacity_);
}

void VmState::allocate(TaskId task, const ResourceVector& demand, int max_active_tasks) {
  if (active_tasks() >= max_active_tasks) {
    throw ThresholdExceeded("vm " + std::to_string(id_) + " already runs " +
                            std::to_string(active_tasks()) + " tasks");
  }
  if (demand.mips < 0 || demand.ram_mb < 0 || demand.bw_mbps < 0) {
    throw InsufficientResources("negative demand for task " + std::to_string(task));
  }
  if (!can_fit(demand)) {
    throw InsufficientResources("task " + std::to_string(task) + " needs mips=" +
                                format_number(demand.mips) + " on vm " + std::to_string(id_) +
                                " with mips=" + format_number(available_.mips) + " available");
  }
  if (!per_task_.emplace(task, demand).second) {
    throw InvariantViolation("task " + std::to_string(task) + " already on vm " +
                             std::to_string(id_));
  }
  recompute_available();
}

ResourceVector VmState::release(TaskId task) {
  auto it = per_task_.find(task);
  if (it == per_task_.end()) {
    throw UnknownTask("task " + std::to_string(task) + " is not running on vm " +
                      std::to_string(id_));
  }
  const ResourceVector demand = it->second;
  per_task_.erase(it);
  recompute_available();
  return demand;
}

void VmState::recompute_available() {
  ResourceVector used;
  for (const auto& [id, demand] : per_task_) used += demand;
  available_ = capacity_ - used;
}

void VmState::check_invariants() const {
  ResourceVector used;
  for (const auto& [id, demand] : per_task_) used += demand;
  const ResourceVector held = capacity_ - available_;
  const auto near = [](double a, double b, double scale) {
    return std::abs(a - b) <= kFitTolerance * scale;
  };
  const std::string where = "vm " + std::to_string(id_) + ": ";
  if (!near(held.mips, used.mips, capacity_.mips) ||
      !near(held.ram_mb, used.ram_mb, capacity_.ram_mb) ||
      !near(held.bw_mbps, used.bw_mbps, capacity_.bw_mbps)) {
    throw InvariantViolation(where + "capacity - available != sum of task demands");
  }
  const ResourceVector zero;
  if (!zero.fits_within(available_, capacity_) || !available_.fits_within(capacity_, capacity_)) {
    throw InvariantViolation(where + "available outside [0, capacity]");
  }
}

std::vector<std::size_t> place_vms(std::span<const HostSpec> hosts, std::span<const VmSpec> vms) {
  struct Free {
    int cores;
    double ram;
    int storage;
  };
  std::vector<Free> free;
  free.reserve(hosts.size());
  for (const auto& h : hosts) {
    h.validate();
    free.push_back({h.cores, static_cast<double>(h.ram_mb), h.storage_gb});
  }
  std::vector<std::size_t> placement;
  placement.reserve(vms.size());
  for (std::size_t v = 0; v < vms.size(); ++v) {
    const VmSpec& spec = vms[v];
    spec.validate();
    bool placed = false;
    for (std::size_t h = 0; h < free.size(); ++h) {
      if (free[h].cores >= spec.cores && free[h].ram >= spec.ram_mb &&
          free[h].storage >= spec.storage_gb) {
        free[h].cores -= spec.cores;
        free[h].ram -= spec.ram_mb;
        free[h].storage -= spec.storage_gb;
        placement.push_back(h);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw PlacementFailure("vm " + std::to_string(v) + " (" + std::string(to_string(spec.tier)) +
                             ") does not fit on any of " + std::to_string(hosts.size()) + " hosts");
    }
  }
  return placement;
}

std::vector<HostSpec> provision_hosts(std::span<const VmSpec> vms) {
  const HostSpec small = HostSpec::type1();
  const HostSpec large = HostSpec::type2();
  std::size_t large_count = 0;
  std::size_t small_only = 0;
  for (const auto& spec : vms) {
    if (spec.cores <= small.cores && spec.ram_mb <= small.ram_mb &&
        spec.storage_gb <= small.storage_gb) {
      ++small_only;
    } else {
      ++large_count;
    }
  }
  // Two small VMs share one Type-2 host; an odd one gets a Type-1.
  large_count += small_only / 2;
  std::vector<HostSpec> hosts(large_count, large);
  if (small_only % 2 == 1) hosts.push_back(small);
  // Interleaved tiers can strand capacity under first-fit; grow until it fits.
  while (true) {
    try {
      place_vms(hosts, vms);
      return hosts;
    } catch (const PlacementFailure&) {
      hosts.push_back(large);
    }
  }
}

std::vector<VmTier> alternating_tiers(int vms_per_dc) {
  std::vector<VmTier> tiers;
  tiers.reserve(static_cast<std::size_t>(vms_per_dc));
  for (int i = 0; i < vms_per_dc; ++i) {
    tiers.push_back(i % 2 == 0 ? VmTier::LowSpec : VmTier::HighSpec);
  }
  return tiers;
}

CloudModel CloudModel::build(int dc_count, std::span<const VmTier> tiers, const CostRates& rates) {
  if (dc_count <= 0) throw ConfigError("dc count must be positive");
  if (tiers.empty()) throw ConfigError("vms per dc must be positive");
  rates.validate();
  std::vector<VmSpec> specs;
  specs.reserve(tiers.size());
  for (VmTier t : tiers) specs.push_back(VmSpec::for_tier(t));
  const std::vector<HostSpec> hosts = provision_hosts(specs);
  const std::vector<std::size_t> placement = place_vms(hosts, specs);

  CloudModel model;
  for (int d = 0; d < dc_count; ++d) {
    DataCenter dc;
    dc.id = static_cast<DcId>(d);
    dc.cost_rates = rates;
    dc.hosts = hosts;
    dc.host_of_vm = placement;
    for (const auto& spec : specs) {
      const auto id = static_cast<VmId>(model.vms_.size());
      model.vms_.emplace_back(id, dc.id, spec);
      dc.vms.push_back(id);
    }
    model.dcs_.push_back(std::move(dc));
  }
  return model;
}

}  // namespace simlb
