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

#include "lhz/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "lhz/instance.hpp"
#include "lhz/operators.hpp"
#include "lhz/rng.hpp"
#include "lhz/schedule.hpp"

namespace {

// One qubit, one field, no plaquettes: H(tau) = -(1-tau) sigma_x
// + tau*j sigma_z with levels +-sqrt((1-tau)^2 + (tau j)^2).
lhz::PhysicalInstance two_level(double j) {
    lhz::PhysicalInstance phys;
    phys.k_physical = 1;
    phys.n_logical = 2;
    phys.fields = {j};
    phys.constraint_strength = 2.0;
    phys.id = "two-level";
    return phys;
}

lhz::PhysicalInstance random_physical(int n_logical, std::uint64_t key) {
    lhz::LogicalInstance inst;
    inst.n_logical = n_logical;
    inst.id = "spectrum-fixture";
    auto eng = lhz::keyed_engine(key, 7);
    for (int k = 0; k < lhz::pair_count(n_logical); ++k) {
        inst.couplings.push_back(lhz::uniform_pm1(eng));
    }
    return lhz::map_logical_to_physical(inst, 2.0);
}

lhz::SpectrumTrace trace_from_gaps(const std::vector<double>& gaps) {
    const auto m = static_cast<Eigen::Index>(gaps.size());
    lhz::SpectrumTrace trace;
    trace.tau_grid.resize(gaps.size());
    trace.levels.resize(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        trace.tau_grid[static_cast<std::size_t>(i)] =
            static_cast<double>(i) / static_cast<double>(m - 1);
        trace.levels(i, 0) = 0.0;
        trace.levels(i, 1) = gaps[static_cast<std::size_t>(i)];
    }
    return trace;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("two-level spectrum matches the closed form") {
    const auto phys = two_level(1.0);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions opt;
    opt.solver = lhz::EigenSolver::dense;
    const auto trace = lhz::instantaneous_spectrum(phys, sched, opt);
    REQUIRE(trace.tau_grid.size() == 101);
    for (std::size_t i = 0; i < trace.tau_grid.size(); ++i) {
        const double tau = trace.tau_grid[i];
        const double r = std::sqrt((1.0 - tau) * (1.0 - tau) + tau * tau);
        const auto m = static_cast<Eigen::Index>(i);
        CHECK(trace.levels(m, 0) == doctest::Approx(-r).epsilon(1e-12));
        CHECK(trace.levels(m, 1) == doctest::Approx(r).epsilon(1e-12));
    }
    const auto summary = lhz::gap_summary(trace);
    CHECK(summary.min_gap == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(summary.position == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(summary.local_minima_count == 1);
    CHECK(summary.gap_trace.size() == 101);
}

TEST_CASE("gap minimum lands at the analytic crossing point") {
    // For j = 1/2 the squared gap is quadratic with vertex at
    // tau = 1/(1+j^2) = 0.8, a grid point of the 101-point scan.
    const auto phys = two_level(0.5);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    const auto trace = lhz::instantaneous_spectrum(phys, sched);
    const auto summary = lhz::gap_summary(trace);
    CHECK(summary.min_gap == doctest::Approx(2.0 * std::sqrt(0.2)).epsilon(1e-12));
    CHECK(summary.position == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(summary.local_minima_count == 1);
}

TEST_CASE("levels come back ascending on the full sweep grid") {
    const auto phys = random_physical(4, 11);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions opt;
    opt.m_points = 41;
    opt.l_levels = 4;
    const auto trace = lhz::instantaneous_spectrum(phys, sched, opt);
    CHECK(trace.tau_grid.front() == 0.0);
    CHECK(trace.tau_grid.back() == 1.0);
    CHECK(trace.levels.rows() == 41);
    CHECK(trace.levels.cols() == 4);
    for (Eigen::Index r = 0; r < trace.levels.rows(); ++r) {
        for (Eigen::Index c = 1; c < trace.levels.cols(); ++c) {
            CHECK(trace.levels(r, c) >= trace.levels(r, c - 1));
        }
    }
}

TEST_CASE("ties resolve to the leftmost minimum and refine by parabola") {
    const auto trace = trace_from_gaps({3.0, 1.0, 2.0, 1.0, 3.0});
    const auto summary = lhz::gap_summary(trace);
    CHECK(summary.min_gap == 1.0);
    // Parabola through (0,3), (0.25,1), (0.5,2).
    CHECK(summary.position == doctest::Approx(0.25 + 0.125 / 3.0).epsilon(1e-14));
    CHECK(summary.local_minima_count == 2);
}

TEST_CASE("a plateau run counts as one minimum") {
    const auto trace = trace_from_gaps({5.0, 1.0, 1.0, 1.0, 5.0, 2.0, 5.0});
    const auto summary = lhz::gap_summary(trace);
    CHECK(summary.min_gap == 1.0);
    CHECK(summary.local_minima_count == 2);
}

TEST_CASE("a monotone descent puts the global minimum on the boundary") {
    const auto trace = trace_from_gaps({5.0, 4.0, 3.0, 2.0, 1.0});
    const auto summary = lhz::gap_summary(trace);
    CHECK(summary.min_gap == 1.0);
    CHECK(summary.position == 1.0);
    CHECK(summary.local_minima_count == 1);
}

TEST_CASE("a non-global boundary dip is not counted") {
    const auto trace = trace_from_gaps({2.0, 1.0, 3.0, 2.7, 2.5});
    const auto summary = lhz::gap_summary(trace);
    CHECK(summary.min_gap == 1.0);
    CHECK(summary.position == doctest::Approx(0.25 - 0.125 / 3.0).epsilon(1e-14));
    CHECK(summary.local_minima_count == 1);
}

TEST_CASE("a flat trace still reports one minimum") {
    const auto trace = trace_from_gaps({1.0, 1.0, 1.0});
    const auto summary = lhz::gap_summary(trace);
    CHECK(summary.min_gap == 1.0);
    CHECK(summary.position == 0.0);
    CHECK(summary.local_minima_count == 1);
}

TEST_CASE("lanczos agrees with the dense solver on a small instance") {
    const auto phys = random_physical(4, 23);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions dense_opt;
    dense_opt.m_points = 65;
    dense_opt.solver = lhz::EigenSolver::dense;
    lhz::SpectrumOptions lz_opt = dense_opt;
    lz_opt.solver = lhz::EigenSolver::lanczos;
    const auto ref = lhz::instantaneous_spectrum(phys, sched, dense_opt);
    const auto got = lhz::instantaneous_spectrum(phys, sched, lz_opt);
    for (Eigen::Index r = 0; r < ref.levels.rows(); ++r) {
        CHECK(std::abs(got.levels(r, 0) - ref.levels(r, 0)) < 1e-8);
        CHECK(std::abs(got.levels(r, 1) - ref.levels(r, 1)) < 1e-8);
    }
}

TEST_CASE("the warm-started scan tracks dense probes at full size") {
    const auto phys = random_physical(5, 31);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions opt;
    opt.m_points = 33;
    const auto trace = lhz::instantaneous_spectrum(phys, sched, opt);
    for (int k : {0, 8, 16, 24, 32}) {
        const double tau = static_cast<double>(k) / 32.0;
        const Eigen::MatrixXd h = lhz::assemble_passage_dense(phys, tau, 2.0 * tau);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        CHECK(std::abs(trace.levels(k, 0) - es.eigenvalues()(0)) < 1e-7);
        CHECK(std::abs(trace.levels(k, 1) - es.eigenvalues()(1)) < 1e-7);
    }
}

TEST_CASE("the adiabatic bound matches an independent two-level oracle") {
    const auto phys = two_level(1.0);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions opt;
    opt.m_points = 65;
    opt.keep_vectors = true;
    opt.solver = lhz::EigenSolver::dense;
    const auto trace = lhz::instantaneous_spectrum(phys, sched, opt);
    const double bound = lhz::adiabatic_time_bound(phys, sched, trace);

    // dH/dtau = H_p - H_i = [[1, 1], [1, -1]] for the linear sweep.
    Eigen::Matrix2d dh;
    dh << 1.0, 1.0, 1.0, -1.0;
    double expect = 0.0;
    for (std::size_t i = 0; i < trace.tau_grid.size(); ++i) {
        const double tau = trace.tau_grid[i];
        Eigen::Matrix2d h;
        h << tau, -(1.0 - tau), -(1.0 - tau), -tau;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
        const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
        const double elem = std::abs(es.eigenvectors().col(1).dot(dh * es.eigenvectors().col(0)));
        expect = std::max(expect, elem / (gap * gap));
    }
    CHECK(bound == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("the adiabatic bound needs vectors and degenerates to infinity") {
    const auto phys = two_level(1.0);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions opt;
    opt.m_points = 33;
    const auto bare = lhz::instantaneous_spectrum(phys, sched, opt);
    CHECK_THROWS_AS(lhz::adiabatic_time_bound(phys, sched, bare), std::invalid_argument);

    opt.keep_vectors = true;
    auto trace = lhz::instantaneous_spectrum(phys, sched, opt);
    trace.levels(5, 1) = trace.levels(5, 0) + 5e-13;
    CHECK(std::isinf(lhz::adiabatic_time_bound(phys, sched, trace)));
}

TEST_CASE("csv export is one header plus one row per grid point") {
    const auto trace = trace_from_gaps({3.0, 2.0, 1.0, 2.0, 3.0});
    const std::string csv = lhz::spectrum_to_csv(trace);
    CHECK(csv.rfind("tau,level_0,level_1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    CHECK(csv.find("\n0,") != std::string::npos);
}

TEST_CASE("gap summaries serialize their three statistics") {
    const auto summary = lhz::gap_summary(trace_from_gaps({3.0, 1.0, 3.0}));
    const auto j = lhz::gap_summary_to_json(summary);
    CHECK(j.at("min_gap").get<double>() == 1.0);
    CHECK(j.at("position").get<double>() == 0.5);
    CHECK(j.at("local_minima_count").get<int>() == 1);
}

TEST_CASE("scan guards refuse coarse grids and oversized spaces") {
    const auto phys = two_level(1.0);
    const auto sched = lhz::Schedule::linear(1.0, 2.0);
    lhz::SpectrumOptions opt;
    opt.m_points = 32;
    CHECK_THROWS_AS(lhz::instantaneous_spectrum(phys, sched, opt), std::invalid_argument);
    opt.m_points = 33;
    opt.l_levels = 1;
    CHECK_THROWS_AS(lhz::instantaneous_spectrum(phys, sched, opt), std::invalid_argument);

    lhz::PhysicalInstance big;
    big.k_physical = 13;
    big.n_logical = 6;
    big.fields.assign(13, 0.0);
    big.constraint_strength = 2.0;
    CHECK_THROWS_AS(lhz::instantaneous_spectrum(big, sched, {}), std::invalid_argument);
}

TEST_CASE("trace validation rejects malformed grids") {
    auto trace = trace_from_gaps({3.0, 1.0, 3.0});
    trace.tau_grid.back() = 0.9;
    CHECK_THROWS_AS(trace.validate(), std::invalid_argument);
}

}  // TEST_SUITE
