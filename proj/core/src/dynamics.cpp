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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lhz/parallel.hpp"

namespace lhz {

namespace {

constexpr double kDriftLimit = 1e-6;

// s(tau) and c(tau) sampled at the 2M+1 half-step points of an M-step run.
struct ScheduleTable {
    std::vector<double> s;
    std::vector<double> c;
};

ScheduleTable tabulate(const Schedule& schedule, std::int64_t steps) {
    ScheduleTable tab;
    tab.s.resize(static_cast<std::size_t>(2 * steps + 1));
    tab.c.resize(tab.s.size());
    for (std::int64_t q = 0; q <= 2 * steps; ++q) {
        const double tau = static_cast<double>(q) / static_cast<double>(2 * steps);
        tab.s[static_cast<std::size_t>(q)] = schedule.value(tau);
        tab.c[static_cast<std::size_t>(q)] = schedule.constraint_ramp(tau);
    }
    return tab;
}

std::int64_t step_count(double t_anneal, double norm_estimate, const EvolveOptions& options) {
    const double raw = options.step_rate * t_anneal * norm_estimate;
    if (raw > 5e8) {
        throw std::invalid_argument("evolve: step count out of desk-scale range");
    }
    return std::max(options.min_steps, static_cast<std::int64_t>(std::ceil(raw)));
}

struct CoreResult {
    StateVector state;
    double norm_drift = 0.0;
    bool ok = false;
};

// One fixed-step RK4 pass over the tabulated schedule; bails out early the
// moment the norm drifts past the acceptance bound.
CoreResult evolve_core(const PassageGenerator& gen, const ScheduleTable& tab, std::int64_t steps,
                       double t_anneal) {
    const std::int64_t dim = gen.dim();
    const double h = t_anneal / static_cast<double>(steps);
    const std::complex<double> mih(0.0, -1.0);

    CoreResult res;
    res.state = StateVector::Constant(dim, std::complex<double>(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    StateVector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    for (std::int64_t m = 0; m < steps; ++m) {
        const std::size_t q = static_cast<std::size_t>(2 * m);
        gen.apply(tab.s[q], tab.c[q], res.state.data(), k1.data());
        tmp = res.state + (mih * (0.5 * h)) * k1;
        gen.apply(tab.s[q + 1], tab.c[q + 1], tmp.data(), k2.data());
        tmp = res.state + (mih * (0.5 * h)) * k2;
        gen.apply(tab.s[q + 1], tab.c[q + 1], tmp.data(), k3.data());
        tmp = res.state + (mih * h) * k3;
        gen.apply(tab.s[q + 2], tab.c[q + 2], tmp.data(), k4.data());
        res.state += (mih * (h / 6.0)) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double norm = res.state.norm();
        const double drift = std::abs(norm - 1.0);
        res.norm_drift = std::max(res.norm_drift, drift);
        if (drift >= kDriftLimit) {
            return res;
        }
        res.state /= norm;
    }
    res.ok = true;
    return res;
}

FidelityResult fidelity_against_diagonal(const StateVector& state, const std::vector<double>& diag) {
    if (state.size() != static_cast<Eigen::Index>(diag.size())) {
        throw std::invalid_argument("fidelity: state dimension mismatch");
    }
    FidelityResult res;
    res.ground_energy = *std::min_element(diag.begin(), diag.end());
    res.ground_degeneracy = 0;
    double overlap = 0.0;
    for (std::size_t b = 0; b < diag.size(); ++b) {
        if (diag[b] - res.ground_energy <= 1e-9) {
            ++res.ground_degeneracy;
            overlap += std::norm(state(static_cast<Eigen::Index>(b)));
        }
    }
    res.value = std::min(overlap, 1.0);
    return res;
}

}  // namespace

EvolutionResult evolve(const PhysicalInstance& phys, const Schedule& schedule,
                       const EvolveOptions& options) {
    if (!(schedule.annealing_time() > 0.0)) {
        throw std::invalid_argument("evolve: annealing time must be positive");
    }
    const PassageGenerator gen(phys);
    const double t_anneal = schedule.annealing_time();
    std::int64_t steps = step_count(t_anneal, gen.norm_estimate(), options);

    CoreResult core;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        const ScheduleTable tab = tabulate(schedule, steps);
        core = evolve_core(gen, tab, steps, t_anneal);
        if (core.ok) break;
        steps *= 2;
    }
    if (!core.ok) {
        throw std::runtime_error("evolve: norm drift exceeded 1e-6 for instance '" + phys.id +
                                 "' after step-doubling retries");
    }

    EvolutionResult res;
    res.norm_drift = core.norm_drift;
    res.steps_used = steps;
    res.annealing_time = t_anneal;
    const FidelityResult f = fidelity_against_diagonal(core.state, gen.final_diagonal());
    res.fidelity = f.value;
    res.degenerate_final = f.ground_degeneracy > 1;
    res.final_state = std::move(core.state);
    return res;
}

FidelityResult fidelity(const StateVector& state, const PhysicalInstance& phys) {
    const PassageGenerator gen(phys);
    return fidelity_against_diagonal(state, gen.final_diagonal());
}

std::vector<double> individual_fidelities(const Schedule& schedule,
                                          const std::vector<PhysicalInstance>& group,
                                          const EvolveOptions& options) {
    if (group.empty()) {
        throw std::invalid_argument("individual_fidelities: empty group");
    }
    const double t_anneal = schedule.annealing_time();

    // One step grid for the whole group lets the schedule tables be built
    // once; the grid is sized by the largest member so no instance runs
    // coarser than its own heuristic.
    std::vector<PassageGenerator> gens;
    gens.reserve(group.size());
    double max_norm = 0.0;
    for (const auto& phys : group) {
        gens.emplace_back(phys);
        max_norm = std::max(max_norm, gens.back().norm_estimate());
    }
    std::int64_t steps = step_count(t_anneal, max_norm, options);

    for (int attempt = 0;; ++attempt) {
        const ScheduleTable tab = tabulate(schedule, steps);
        std::vector<CoreResult> results(group.size());
        parallel_for(group.size(), [&](std::size_t i) {
            results[i] = evolve_core(gens[i], tab, steps, t_anneal);
        });
        std::string drifted;
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (!results[i].ok) {
                if (!drifted.empty()) drifted += ", ";
                drifted += group[i].id;
            }
        }
        if (drifted.empty()) {
            std::vector<double> fids(group.size());
            for (std::size_t i = 0; i < group.size(); ++i) {
                fids[i] = fidelity_against_diagonal(results[i].state, gens[i].final_diagonal()).value;
            }
            return fids;
        }
        if (attempt >= options.max_retries) {
            throw std::runtime_error("individual_fidelities: norm drift exceeded 1e-6 for instances: " +
                                     drifted);
        }
        steps *= 2;
    }
}

double group_fidelity(const Schedule& schedule, const std::vector<PhysicalInstance>& group,
                      const EvolveOptions& options) {
    const std::vector<double> fids = individual_fidelities(schedule, group, options);
    double sum = 0.0;
    for (double f : fids) sum += f;
    return sum / static_cast<double>(fids.size());
}

BoundedGroupFidelity group_fidelity_bounded(const Schedule& schedule,
                                            const std::vector<PhysicalInstance>& group,
                                            double fail_below, const EvolveOptions& options) {
    if (group.empty()) {
        throw std::invalid_argument("group_fidelity_bounded: empty group");
    }
    const double t_anneal = schedule.annealing_time();
    std::vector<PassageGenerator> gens;
    gens.reserve(group.size());
    double max_norm = 0.0;
    for (const auto& phys : group) {
        gens.emplace_back(phys);
        max_norm = std::max(max_norm, gens.back().norm_estimate());
    }
    const std::int64_t steps = step_count(t_anneal, max_norm, options);
    const ScheduleTable tab = tabulate(schedule, steps);

    const auto n = static_cast<double>(group.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < group.size(); ++i) {
        CoreResult core;
        std::int64_t member_steps = steps;
        for (int attempt = 0;; ++attempt) {
            core = attempt == 0 ? evolve_core(gens[i], tab, steps, t_anneal)
                                : evolve_core(gens[i], tabulate(schedule, member_steps), member_steps,
                                              t_anneal);
            if (core.ok) break;
            if (attempt >= options.max_retries) {
                throw std::runtime_error("group_fidelity_bounded: norm drift exceeded 1e-6 for instance: " +
                                         group[i].id);
            }
            member_steps *= 2;
        }
        sum += fidelity_against_diagonal(core.state, gens[i].final_diagonal()).value;
        const double reachable = (sum + (n - static_cast<double>(i + 1))) / n;
        if (reachable < fail_below) {
            return {reachable, false};
        }
    }
    return {sum / n, true};
}

nlohmann::json evolution_to_json(const std::string& instance_id, const EvolutionResult& result) {
    return {{"instance_id", instance_id},
            {"T", result.annealing_time},
            {"fidelity", result.fidelity},
            {"norm_drift", result.norm_drift},
            {"steps_used", result.steps_used}};
}

}  // namespace lhz
