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

#ifndef LHZ_OPTIMIZE_HPP
#define LHZ_OPTIMIZE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lhz/dynamics.hpp"
#include "lhz/instance.hpp"
#include "lhz/schedule.hpp"

namespace lhz {

struct DcrabConfig {
    int n_superiterations = 8;
    int n_frequencies_per_super = 1;  // triples; 2 free amplitudes each
    int inner_max_evaluations = 200;
    double simplex_initial_step = 0.1;
    std::uint64_t seed = 0;
    double target_fidelity = 0.9;
    // 0 means optimize on the whole group; otherwise a fixed seeded
    // subsample of this size drives the inner loop and the full group is
    // re-evaluated before the result is accepted.
    int objective_subsample = 0;
    double omega_min = 0.5;
    double omega_max = 10.0;
    RampMode ramp_mode = RampMode::decoupled;

    // Time-escalation grid.
    double t_initial = 1.0;
    double t_cap = 1000.0;
    double escalation_factor = 1.5;
    double bisection_relative_width = 0.10;

    // Integration cost knobs. Objective evaluations inside the simplex may
    // run at a cheaper rate; pass/fail decisions and reported fidelities
    // always use the validation rate.
    double objective_step_rate = 40.0;
    double validation_step_rate = 40.0;
    std::int64_t objective_min_steps = 2000;
    std::int64_t validation_min_steps = 2000;

    // Escalation-time futility gate: when > 0 and the incumbent objective
    // after a super-iteration is below futility_threshold * target, the
    // remaining super-iterations at this annealing time are skipped and the
    // walk escalates T sooner. 0 disables the gate.
    double futility_threshold = 0.0;

    void validate() const;  // throws std::invalid_argument
};

struct SuperIterationEntry {
    std::vector<BasisTerm> drawn;  // frequencies of this super-iteration
    double best_after = 0.0;
    bool accepted = false;
};

struct OptimizationRecord {
    Schedule best_schedule;
    double best_objective = 0.0;
    // True when best_objective is only an upper bound from an aborted
    // full-group evaluation (the schedule definitely misses the target).
    bool objective_is_bound = false;
    // (evaluation index, objective value) per objective call, in order.
    std::vector<std::pair<int, double>> objective_history;
    std::vector<SuperIterationEntry> superiteration_log;
    int evaluations = 0;
    double wall_time_seconds = 0.0;
};

struct EscalationResult {
    bool hard = false;       // T cap exceeded without reaching the target
    double t_final = 0.0;    // minimal passing T found (valid if !hard)
    OptimizationRecord record;
    std::vector<double> t_grid;  // annealing times tried, in order
};

struct NelderMeadOptions {
    int max_evaluations = 200;
    double initial_step = 0.1;
    double simplex_tolerance = 1e-12;  // spread of vertex values at stop
};

struct NelderMeadResult {
    std::vector<double> best_point;
    double best_value = 0.0;
    int evaluations = 0;
    std::vector<std::pair<int, double>> history;
};

// Derivative-free maximization with deterministic tie-breaking (equal
// values keep the incumbent ordering).
NelderMeadResult nelder_mead_maximize(const std::function<double(const std::vector<double>&)>& objective,
                                      const std::vector<double>& start,
                                      const NelderMeadOptions& options);

// dCRAB on an arbitrary objective: each super-iteration draws fresh
// frequencies, dresses the incumbent as the guess, and optimizes the new
// amplitudes with Nelder-Mead. The returned schedule is never worse than
// `initial` under `objective`, and the loop stops early once the target is
// met.
OptimizationRecord dcrab_optimize_objective(const std::function<double(const Schedule&)>& objective,
                                            const Schedule& initial, const DcrabConfig& cfg);

// Group-fidelity specialization. The simplex sees the mean fidelity of the
// configured subsample at cfg.objective_step_rate; the returned
// best_objective is the full group re-measured at the validation knobs
// (with the fail fast-path against the target), so escalation decisions
// and reports never rest on subsample values.
OptimizationRecord dcrab_optimize(const std::vector<PhysicalInstance>& group, double t_anneal,
                                  const DcrabConfig& cfg);

// Same, warm-started from an explicit initial schedule whose annealing
// time is taken as the working T.
OptimizationRecord dcrab_optimize(const std::vector<PhysicalInstance>& group,
                                  const Schedule& initial, const DcrabConfig& cfg);

// Starting from cfg.t_initial, multiplies T by cfg.escalation_factor,
// re-running dcrab_optimize warm-started from the previous best, until the
// validated group fidelity reaches the target or T exceeds cfg.t_cap
// (hard). A bisection pass then narrows the passing T to
// cfg.bisection_relative_width.
EscalationResult escalate_time(const std::vector<PhysicalInstance>& group, const DcrabConfig& cfg);

// Minimal T on the same escalation grid at which the plain linear ramp
// reaches `target`, bisection-refined identically. Hard when the cap is
// exceeded.
EscalationResult linear_required_time(const std::vector<PhysicalInstance>& group, double target,
                                      const DcrabConfig& cfg);

struct GroupSpeedup {
    int group_index = 0;
    bool present = false;
    double linear_t = 0.0;
    double optimized_t = 0.0;
    double factor = 0.0;     // linear_t / optimized_t
    double reduction = 0.0;  // 1 - optimized_t / linear_t
};

struct SpeedupReport {
    std::vector<GroupSpeedup> rows;
    int groups_counted = 0;
    double average_factor = 0.0;
    double average_reduction = 0.0;
};

// Per-group and average speed-up of optimized over linear annealing times.
// Groups with a non-finite or non-positive time on either side are marked
// absent and excluded from the averages.
SpeedupReport speedup_report(const std::vector<double>& optimized_times,
                             const std::vector<double>& linear_times);

// Columns group, linear_T, optimized_T, factor, reduction; absent groups
// emit empty value fields.
std::string speedup_to_csv(const SpeedupReport& report);

nlohmann::json optimization_record_to_json(const OptimizationRecord& record);

}  // namespace lhz

#endif  // LHZ_OPTIMIZE_HPP
