// Copyright 2026 The lhzanneal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lhz/dynamics.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "lhz/instance.hpp"
#include "lhz/rng.hpp"
#include "lhz/schedule.hpp"
#include "lhz/spectrum.hpp"

namespace {

lhz::LogicalInstance random_logical(int n_logical, std::uint64_t key) {
    lhz::LogicalInstance inst;
    inst.n_logical = n_logical;
    inst.id = "dyn-fixture";
    auto eng = lhz::keyed_engine(key, 3);
    for (int k = 0; k < lhz::pair_count(n_logical); ++k) {
        inst.couplings.push_back(lhz::uniform_pm1(eng));
    }
    return inst;
}

lhz::PhysicalInstance random_physical(int n_logical, std::uint64_t key) {
    return lhz::map_logical_to_physical(random_logical(n_logical, key), 2.0);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("a sudden quench keeps the uniform superposition") {
    const auto logical = random_logical(4, 101);
    REQUIRE(lhz::logical_ground_bruteforce(logical).configs.size() == 2);
    const auto phys = lhz::map_logical_to_physical(logical, 2.0);
    const auto res = lhz::evolve(phys, lhz::Schedule::linear(1e-7, 2.0));
    // Both flips of the logical ground encode to the same physical state,
    // so the ground space is one basis state out of 2^6.
    CHECK(std::abs(res.fidelity - 1.0 / 64.0) < 1e-9);
    CHECK_FALSE(res.degenerate_final);
    CHECK(res.final_state.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("norm drift stays within the acceptance bound") {
    const auto phys = random_physical(4, 102);
    const auto res = lhz::evolve(phys, lhz::Schedule::linear(10.0, 2.0));
    CHECK(res.norm_drift < 1e-6);
    CHECK(res.annealing_time == 10.0);
    CHECK(res.steps_used >= 2000);
}

TEST_CASE("halving the step size leaves the fidelity unchanged") {
    const auto phys = random_physical(4, 103);
    const auto sched = lhz::Schedule::linear(10.0, 2.0);
    const auto coarse = lhz::evolve(phys, sched);
    lhz::EvolveOptions fine;
    fine.step_rate = 80.0;
    fine.min_steps = 4000;
    const auto refined = lhz::evolve(phys, sched, fine);
    CHECK(std::abs(coarse.fidelity - refined.fidelity) < 1e-6);
}

TEST_CASE("a slow sweep reaches the encoded ground state") {
    const auto phys = random_physical(4, 104);
    const auto trace = lhz::instantaneous_spectrum(phys, lhz::Schedule::linear(1.0, 2.0));
    const double gap = lhz::gap_summary(trace).min_gap;
    REQUIRE(gap > 0.3);
    const double t_adiabatic = 100.0 / (gap * gap);
    const auto res = lhz::evolve(phys, lhz::Schedule::linear(t_adiabatic, 2.0));
    CHECK(res.fidelity >= 0.99);
}

TEST_CASE("evolution is deterministic") {
    const auto phys = random_physical(4, 105);
    const auto sched = lhz::Schedule::linear(3.0, 2.0);
    const auto a = lhz::evolve(phys, sched);
    const auto b = lhz::evolve(phys, sched);
    CHECK(a.fidelity == b.fidelity);
    CHECK(a.norm_drift == b.norm_drift);
    CHECK((a.final_state - b.final_state).norm() == 0.0);
}

TEST_CASE("a zero-coupling instance has a degenerate final ground") {
    lhz::LogicalInstance flat;
    flat.n_logical = 4;
    flat.id = "flat";
    flat.couplings.assign(6, 0.0);
    const auto phys = lhz::map_logical_to_physical(flat, 2.0);
    const auto res = lhz::evolve(phys, lhz::Schedule::linear(1e-7, 2.0));
    CHECK(res.degenerate_final);
    // All 2^3 = 8 encodings share the zero final energy.
    CHECK(std::abs(res.fidelity - 8.0 / 64.0) < 1e-9);

    const lhz::StateVector uniform =
        lhz::StateVector::Constant(64, std::complex<double>(1.0 / 8.0, 0.0));
    const auto f = lhz::fidelity(uniform, phys);
    CHECK(f.ground_degeneracy == 8);
    CHECK(f.value == doctest::Approx(8.0 / 64.0).epsilon(1e-12));
    // Zero fields leave only the penalty: three satisfied plaquettes at
    // strength two.
    CHECK(f.ground_energy == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("fidelity rejects a state of the wrong dimension") {
    const auto phys = random_physical(4, 106);
    const lhz::StateVector bad = lhz::StateVector::Zero(32);
    CHECK_THROWS_AS(lhz::fidelity(bad, phys), std::invalid_argument);
}

TEST_CASE("group members agree with their standalone runs") {
    const std::vector<lhz::PhysicalInstance> group = {
        random_physical(4, 107), random_physical(4, 108), random_physical(4, 109)};
    const auto sched = lhz::Schedule::linear(5.0, 2.0);
    const auto fids = lhz::individual_fidelities(sched, group);
    REQUIRE(fids.size() == 3);
    double mean = 0.0;
    for (std::size_t i = 0; i < group.size(); ++i) {
        const auto solo = lhz::evolve(group[i], sched);
        CHECK(std::abs(fids[i] - solo.fidelity) < 1e-6);
        mean += fids[i];
    }
    mean /= 3.0;
    CHECK(lhz::group_fidelity(sched, group) == doctest::Approx(mean).epsilon(1e-15));
}

TEST_CASE("the bounded mean matches the exact mean when it completes") {
    const std::vector<lhz::PhysicalInstance> group = {random_physical(4, 110),
                                                      random_physical(4, 111)};
    const auto sched = lhz::Schedule::linear(5.0, 2.0);
    const auto bounded = lhz::group_fidelity_bounded(sched, group, 0.0);
    CHECK(bounded.completed);
    CHECK(bounded.value == doctest::Approx(lhz::group_fidelity(sched, group)).epsilon(1e-14));
}

TEST_CASE("the bounded mean aborts early with a valid upper bound") {
    const std::vector<lhz::PhysicalInstance> group = {
        random_physical(4, 112), random_physical(4, 113), random_physical(4, 114)};
    // A fast ramp keeps every member far from the target, so the first
    // member already caps the reachable mean below the bar.
    const auto sched = lhz::Schedule::linear(0.01, 2.0);
    const auto bounded = lhz::group_fidelity_bounded(sched, group, 0.999);
    CHECK_FALSE(bounded.completed);
    const double exact = lhz::group_fidelity(sched, group);
    CHECK(bounded.value >= exact);
    CHECK(bounded.value < 0.999);
}

TEST_CASE("an absurdly coarse grid fails the drift bound loudly") {
    const auto phys = random_physical(4, 115);
    lhz::EvolveOptions wild;
    wild.step_rate = 1e-3;
    wild.min_steps = 1;
    wild.max_retries = 1;
    CHECK_THROWS_AS(lhz::evolve(phys, lhz::Schedule::linear(1.0, 2.0), wild),
                    std::runtime_error);
}

TEST_CASE("empty groups are rejected") {
    const std::vector<lhz::PhysicalInstance> none;
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    CHECK_THROWS_AS(lhz::individual_fidelities(sched, none), std::invalid_argument);
    CHECK_THROWS_AS(lhz::group_fidelity_bounded(sched, none, 0.5), std::invalid_argument);
}

TEST_CASE("evolution records serialize the run statistics") {
    const auto phys = random_physical(4, 116);
    const auto res = lhz::evolve(phys, lhz::Schedule::linear(2.0, 2.0));
    const auto j = lhz::evolution_to_json("dyn-fixture", res);
    CHECK(j.at("instance_id").get<std::string>() == "dyn-fixture");
    CHECK(j.at("T").get<double>() == 2.0);
    CHECK(j.at("fidelity").get<double>() == res.fidelity);
    CHECK(j.at("steps_used").get<std::int64_t>() == res.steps_used);
}

}  // TEST_SUITE
