#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "simlb/cloud_model.hpp"
#include "simlb/error.hpp"

using namespace simlb;

TEST_SUITE("cloud_model") {
  TEST_CASE("total capacity multiplies per-core MIPS by cores") {
    CHECK(total_capacity(VmSpec::low_spec()) == ResourceVector{500, 1024, 1000});
    CHECK(total_capacity(VmSpec::high_spec()) == ResourceVector{2000, 2048, 2000});
  }

  TEST_CASE("vm spec with a zero field is rejected") {
    VmSpec bad{0.0, 1, 1024, 1000, 10, VmTier::LowSpec};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(VmState(0, 0, bad), ConfigError);
  }

  TEST_CASE("allocate subtracts componentwise") {
    VmState vm(0, 0, VmSpec::low_spec());
    vm.allocate(1, {100, 200, 300}, 3);
    CHECK(vm.available() == ResourceVector{400, 824, 700});
    CHECK(vm.active_tasks() == 1);
  }

  TEST_CASE("allocation beyond availability is rejected") {
    VmState vm(0, 0, VmSpec::low_spec());
    CHECK_THROWS_AS(vm.allocate(1, {600, 0, 0}, 3), InsufficientResources);
    CHECK(vm.active_tasks() == 0);
  }

  TEST_CASE("allocation at the task limit is rejected") {
    VmState vm(0, 0, VmSpec::high_spec());
    for (TaskId t = 0; t < 3; ++t) vm.allocate(t, {10, 10, 10}, 3);
    CHECK_THROWS_AS(vm.allocate(3, {10, 10, 10}, 3), ThresholdExceeded);
    CHECK_THROWS_AS(vm.allocate(0, {10, 10, 10}, 5), InvariantViolation);
  }

  TEST_CASE("allocate then release restores the exact state") {
    VmState vm(3, 1, VmSpec::high_spec());
    vm.allocate(1, {123.25, 17.5, 0.125}, 3);
    const VmState before = vm;
    vm.allocate(2, {300.1, 400.7, 512.3}, 3);
    CHECK(vm.release(2) == ResourceVector{300.1, 400.7, 512.3});
    CHECK(vm == before);
  }

  TEST_CASE("releasing an unknown task throws") {
    VmState vm(0, 0, VmSpec::low_spec());
    CHECK_THROWS_AS(vm.release(42), UnknownTask);
  }

  TEST_CASE("releasing the last task returns full capacity") {
    VmState vm(0, 0, VmSpec::low_spec());
    vm.allocate(7, {250, 500, 500}, 3);
    vm.release(7);
    CHECK(vm.active_tasks() == 0);
    CHECK(vm.available() == vm.capacity());
  }

  TEST_CASE("any allocation and release order returns to capacity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> frac(0.01, 0.33);
    for (int trial = 0; trial < 200; ++trial) {
      VmState vm(0, 0, VmSpec::high_spec());
      const ResourceVector cap = vm.capacity();
      std::array<TaskId, 3> ids{10, 20, 30};
      std::array<int, 3> order{0, 1, 2};
      std::shuffle(order.begin(), order.end(), rng);
      for (int i : order) {
        vm.allocate(ids[i], {cap.mips * frac(rng), cap.ram_mb * frac(rng), cap.bw_mbps * frac(rng)},
                    3);
        vm.check_invariants();
      }
      std::shuffle(order.begin(), order.end(), rng);
      for (int i : order) {
        vm.release(ids[i]);
        vm.check_invariants();
      }
      CHECK(vm.available() == cap);
    }
  }

  TEST_CASE("available depends only on the set of running tasks") {
    const std::vector<ResourceVector> demands{{0.1, 0.2, 0.3}, {123.4, 5.6, 7.8}, {99.9, 1e-3, 3.3}};
    VmState a(0, 0, VmSpec::high_spec());
    VmState b(0, 0, VmSpec::high_spec());
    for (TaskId t = 0; t < 3; ++t) a.allocate(t, demands[t], 3);
    for (TaskId t = 3; t-- > 0;) b.allocate(t, demands[t], 3);
    CHECK(a.available() == b.available());
  }

  TEST_CASE("first fit honours RAM as well as cores") {
    // Four 2-core high-spec VMs fit the 8 cores of a Type-2 host, but each
    // needs the host's whole 2048 MB, so the second one has nowhere to go.
    const std::vector<HostSpec> one_type2{HostSpec::type2()};
    const std::vector<VmSpec> four_high(4, VmSpec::high_spec());
    CHECK_THROWS_AS(place_vms(one_type2, four_high), PlacementFailure);
    const std::vector<VmSpec> one_high(1, VmSpec::high_spec());
    CHECK(place_vms(one_type2, one_high) == std::vector<std::size_t>{0});

    const std::vector<HostSpec> one_type1{HostSpec::type1()};
    const std::vector<VmSpec> three_high(3, VmSpec::high_spec());
    CHECK_THROWS_AS(place_vms(one_type1, three_high), PlacementFailure);
  }

  TEST_CASE("first fit fills hosts in index order") {
    const std::vector<HostSpec> hosts{HostSpec::type2(), HostSpec::type2()};
    const std::vector<VmSpec> vms{VmSpec::low_spec(), VmSpec::low_spec(), VmSpec::low_spec()};
    CHECK(place_vms(hosts, vms) == std::vector<std::size_t>{0, 0, 1});
  }

  TEST_CASE("no vms means an empty placement") {
    const std::vector<HostSpec> hosts{HostSpec::type1()};
    CHECK(place_vms(hosts, {}).empty());
  }

  TEST_CASE("provisioned hosts always fit the alternating mix") {
    for (int n = 1; n <= 80; ++n) {
      std::vector<VmSpec> specs;
      for (VmTier t : alternating_tiers(n)) specs.push_back(VmSpec::for_tier(t));
      const auto hosts = provision_hosts(specs);
      CHECK_NOTHROW(place_vms(hosts, specs));
    }
  }

  TEST_CASE("cloud model numbers vms densely across data centers") {
    const auto tiers = alternating_tiers(6);
    const CloudModel m = CloudModel::build(3, tiers, CostRates{});
    REQUIRE(m.vms().size() == 18);
    for (std::size_t i = 0; i < m.vms().size(); ++i) {
      CHECK(m.vms()[i].id() == i);
      CHECK(m.vms()[i].dc() == i / 6);
      CHECK(m.vms()[i].spec().tier == (i % 2 == 0 ? VmTier::LowSpec : VmTier::HighSpec));
    }
    CHECK(m.data_centers()[2].vms.front() == 12);
    CHECK_THROWS_AS(CloudModel::build(0, tiers, CostRates{}), ConfigError);
  }

  TEST_CASE("negative cost rates are rejected") {
    CostRates r;
    CHECK_NOTHROW(r.validate());
    r.cpu_per_sec = -1;
    CHECK_THROWS_AS(r.validate(), ConfigError);
  }
}
