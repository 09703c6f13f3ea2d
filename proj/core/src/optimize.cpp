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

#include "lhz/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lhz/rng.hpp"

namespace lhz {

void DcrabConfig::validate() const {
    if (n_superiterations < 1 || n_frequencies_per_super < 1 || inner_max_evaluations < 1) {
        throw std::invalid_argument("DcrabConfig: iteration counts must be positive");
    }
    if (!(simplex_initial_step > 0.0)) {
        throw std::invalid_argument("DcrabConfig: simplex step must be positive");
    }
    if (!(target_fidelity > 0.0 && target_fidelity < 1.0)) {
        throw std::invalid_argument("DcrabConfig: target fidelity must be in (0, 1)");
    }
    if (objective_subsample < 0) {
        throw std::invalid_argument("DcrabConfig: subsample size cannot be negative");
    }
    if (!(omega_min > 0.0) || !(omega_max > omega_min)) {
        throw std::invalid_argument("DcrabConfig: frequency window must satisfy 0 < min < max");
    }
    if (!(t_initial > 0.0) || !(t_cap >= t_initial) || !(escalation_factor > 1.0)) {
        throw std::invalid_argument("DcrabConfig: escalation grid is ill-formed");
    }
    if (!(bisection_relative_width > 0.0 && bisection_relative_width < 1.0)) {
        throw std::invalid_argument("DcrabConfig: bisection width must be in (0, 1)");
    }
    if (!(objective_step_rate > 0.0) || !(validation_step_rate > 0.0) || objective_min_steps < 1 ||
        validation_min_steps < 1) {
        throw std::invalid_argument("DcrabConfig: integration knobs must be positive");
    }
    if (futility_threshold < 0.0 || futility_threshold >= 1.0) {
        throw std::invalid_argument("DcrabConfig: futility threshold must be in [0, 1)");
    }
}

NelderMeadResult nelder_mead_maximize(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) {
        throw std::invalid_argument("nelder_mead_maximize: empty start point");
    }

    NelderMeadResult res;
    res.best_value = -std::numeric_limits<double>::infinity();
    auto eval = [&](const std::vector<double>& x) {
        const double f = objective(x);
        res.history.emplace_back(res.evaluations++, f);
        if (f > res.best_value) {
            res.best_value = f;
            res.best_point = x;
        }
        return f;
    };

    // Vertices carry an age stamp so that sorting is stable under value
    // ties: the incumbent ordering wins.
    struct Vertex {
        std::vector<double> x;
        double f = 0.0;
        int age = 0;
    };
    int next_age = 0;
    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({start, eval(start), next_age++});
    for (std::size_t i = 0; i < n && res.evaluations < options.max_evaluations; ++i) {
        std::vector<double> x = start;
        x[i] += options.initial_step;
        simplex.push_back({x, eval(x), next_age++});
    }
    if (simplex.size() < n + 1) {
        return res;  // budget exhausted while seeding
    }

    auto order = [&] {
        std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) {
            if (a.f != b.f) return a.f > b.f;  // descending: best first
            return a.age < b.age;
        });
    };

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (res.evaluations < options.max_evaluations) {
        order();
        if (simplex.front().f - simplex.back().f <= options.simplex_tolerance) {
            break;
        }
        // Centroid of all but the worst vertex.
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
        }
        for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);
        Vertex& worst = simplex.back();
        const double f_best = simplex.front().f;
        const double f_second = simplex[n - 1].f;

        for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - worst.x[i]);
        const double fr = eval(xr);

        if (fr > f_best) {
            if (res.evaluations >= options.max_evaluations) break;
            for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + 2.0 * (centroid[i] - worst.x[i]);
            const double fe = eval(xe);
            worst = (fe > fr) ? Vertex{xe, fe, next_age++} : Vertex{xr, fr, next_age++};
        } else if (fr > f_second) {
            worst = Vertex{xr, fr, next_age++};
        } else {
            if (res.evaluations >= options.max_evaluations) break;
            bool contracted = false;
            if (fr > worst.f) {
                // Outside contraction, halfway towards the reflected point.
                for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + 0.5 * (xr[i] - centroid[i]);
                const double fc = eval(xc);
                if (fc > fr) {
                    worst = Vertex{xc, fc, next_age++};
                    contracted = true;
                }
            } else {
                // Inside contraction, halfway back towards the worst point.
                for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] - 0.5 * (centroid[i] - worst.x[i]);
                const double fc = eval(xc);
                if (fc > worst.f) {
                    worst = Vertex{xc, fc, next_age++};
                    contracted = true;
                }
            }
            if (!contracted) {
                for (std::size_t v = 1; v <= n && res.evaluations < options.max_evaluations; ++v) {
                    for (std::size_t i = 0; i < n; ++i) {
                        simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    }
                    simplex[v].f = eval(simplex[v].x);
                    simplex[v].age = next_age++;
                }
            }
        }
    }
    return res;
}

OptimizationRecord dcrab_optimize_objective(const std::function<double(const Schedule&)>& objective,
                                            const Schedule& initial, const DcrabConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    OptimizationRecord rec;
    rec.best_schedule = initial;
    auto tracked = [&](const Schedule& s) {
        const double f = objective(s);
        rec.objective_history.emplace_back(rec.evaluations++, f);
        return f;
    };
    rec.best_objective = tracked(initial);

    for (int si = 0; si < cfg.n_superiterations; ++si) {
        if (rec.best_objective >= cfg.target_fidelity) break;
        if (cfg.futility_threshold > 0.0 && si > 0 &&
            rec.best_objective < cfg.futility_threshold * cfg.target_fidelity) {
            break;
        }

        std::vector<BasisTerm> terms(static_cast<std::size_t>(cfg.n_frequencies_per_super));
        auto eng = keyed_engine(cfg.seed, static_cast<std::uint64_t>(si));
        for (auto& t : terms) {
            t.omega = uniform_range(eng, cfg.omega_min, cfg.omega_max);
        }

        const Schedule base =
            Schedule::dressed(std::make_shared<const Schedule>(rec.best_schedule), terms);
        const auto inner = [&](const std::vector<double>& amplitudes) {
            return tracked(base.with_amplitudes(amplitudes));
        };
        NelderMeadOptions nm;
        nm.max_evaluations = cfg.inner_max_evaluations;
        nm.initial_step = cfg.simplex_initial_step;
        const NelderMeadResult inner_res = nelder_mead_maximize(
            inner, std::vector<double>(2 * terms.size(), 0.0), nm);

        SuperIterationEntry entry;
        entry.drawn = terms;
        if (inner_res.best_value > rec.best_objective) {
            rec.best_schedule = base.with_amplitudes(inner_res.best_point);
            rec.best_objective = inner_res.best_value;
            entry.accepted = true;
        }
        entry.best_after = rec.best_objective;
        rec.superiteration_log.push_back(std::move(entry));
    }

    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

namespace {

EvolveOptions objective_evolve_options(const DcrabConfig& cfg) {
    EvolveOptions o;
    o.step_rate = cfg.objective_step_rate;
    o.min_steps = cfg.objective_min_steps;
    return o;
}

EvolveOptions validation_evolve_options(const DcrabConfig& cfg) {
    EvolveOptions o;
    o.step_rate = cfg.validation_step_rate;
    o.min_steps = cfg.validation_min_steps;
    return o;
}

double shared_constraint_strength(const std::vector<PhysicalInstance>& group) {
    if (group.empty()) {
        throw std::invalid_argument("optimize: empty group");
    }
    const double c = group.front().constraint_strength;
    for (const auto& phys : group) {
        if (phys.constraint_strength != c) {
            throw std::invalid_argument("optimize: group mixes constraint strengths");
        }
    }
    return c;
}

std::vector<PhysicalInstance> pick_subsample(const std::vector<PhysicalInstance>& group,
                                             int subsample, std::uint64_t seed) {
    if (subsample <= 0 || subsample >= static_cast<int>(group.size())) {
        return group;
    }
    // Seeded Fisher-Yates prefix; sorted afterwards to keep group order.
    std::vector<std::size_t> idx(group.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto eng = keyed_engine(seed, 0x73756273616d70ULL);
    const std::size_t take = static_cast<std::size_t>(subsample);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + uniform_index(eng, idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    std::vector<PhysicalInstance> picked;
    picked.reserve(idx.size());
    for (std::size_t i : idx) picked.push_back(group[i]);
    return picked;
}

// Drift refusals score the candidate as dead; validation calls stay strict.
double guarded_group_fidelity(const Schedule& schedule, const std::vector<PhysicalInstance>& group,
                              const EvolveOptions& options) {
    try {
        return group_fidelity(schedule, group, options);
    } catch (const std::runtime_error&) {
        return 0.0;
    }
}

}  // namespace

OptimizationRecord dcrab_optimize(const std::vector<PhysicalInstance>& group,
                                  const Schedule& initial, const DcrabConfig& cfg) {
    cfg.validate();
    shared_constraint_strength(group);
    const std::vector<PhysicalInstance> subsample =
        pick_subsample(group, cfg.objective_subsample, cfg.seed);
    const EvolveOptions obj_opts = objective_evolve_options(cfg);
    const auto objective = [&](const Schedule& s) {
        return guarded_group_fidelity(s, subsample, obj_opts);
    };

    OptimizationRecord rec = dcrab_optimize_objective(objective, initial, cfg);

    const bool needs_validation = subsample.size() != group.size() ||
                                  cfg.objective_step_rate != cfg.validation_step_rate ||
                                  cfg.objective_min_steps != cfg.validation_min_steps;
    if (needs_validation) {
        const EvolveOptions val_opts = validation_evolve_options(cfg);
        const BoundedGroupFidelity full =
            group_fidelity_bounded(rec.best_schedule, group, cfg.target_fidelity, val_opts);
        rec.best_objective = full.value;
        rec.objective_is_bound = !full.completed;
        rec.evaluations += 1;
    }
    return rec;
}

OptimizationRecord dcrab_optimize(const std::vector<PhysicalInstance>& group, double t_anneal,
                                  const DcrabConfig& cfg) {
    if (!(t_anneal > 0.0)) {
        throw std::invalid_argument("dcrab_optimize: annealing time must be positive");
    }
    const double c = shared_constraint_strength(group);
    return dcrab_optimize(group, Schedule::linear(t_anneal, c, cfg.ramp_mode), cfg);
}

namespace {

// Shared escalation walk: `attempt` runs the per-T work and returns the
// validated group fidelity plus a record. Grid points are t_initial *
// factor^n up to the cap, then a bisection narrows [last_fail,
// first_pass].
EscalationResult escalation_walk(
    const DcrabConfig& cfg,
    const std::function<OptimizationRecord(double t, const OptimizationRecord* warm)>& attempt) {
    EscalationResult out;
    double t = cfg.t_initial;
    double last_fail = 0.0;
    OptimizationRecord incumbent;
    bool have_incumbent = false;

    while (true) {
        if (t > cfg.t_cap * (1.0 + 1e-12)) {
            out.hard = true;
            if (have_incumbent) out.record = std::move(incumbent);
            return out;
        }
        OptimizationRecord rec = attempt(t, have_incumbent ? &incumbent : nullptr);
        out.t_grid.push_back(t);
        const bool pass = rec.best_objective >= cfg.target_fidelity;
        incumbent = std::move(rec);
        have_incumbent = true;
        if (pass) break;
        last_fail = t;
        t *= cfg.escalation_factor;
    }

    // incumbent now holds the record of the first passing T.
    double lo = last_fail;
    double hi = t;
    if (lo > 0.0) {
        while ((hi - lo) / hi > cfg.bisection_relative_width) {
            const double mid = 0.5 * (lo + hi);
            OptimizationRecord rec = attempt(mid, &incumbent);
            out.t_grid.push_back(mid);
            if (rec.best_objective >= cfg.target_fidelity) {
                hi = mid;
                incumbent = std::move(rec);
            } else {
                lo = mid;
            }
        }
    }
    out.hard = false;
    out.t_final = hi;
    out.record = std::move(incumbent);
    return out;
}

}  // namespace

EscalationResult escalate_time(const std::vector<PhysicalInstance>& group, const DcrabConfig& cfg) {
    cfg.validate();
    const double c = shared_constraint_strength(group);
    const std::vector<PhysicalInstance> subsample =
        pick_subsample(group, cfg.objective_subsample, cfg.seed);
    const EvolveOptions obj_opts = objective_evolve_options(cfg);
    return escalation_walk(cfg, [&](double t, const OptimizationRecord* warm) {
        // The rescaled incumbent must actually beat the plain ramp at the
        // new T to displace it as the inner loop's starting point; keeping
        // the ramp as the floor means the optimized walk can never need
        // more time than the linear one at equal integration knobs.
        Schedule initial = Schedule::linear(t, c, cfg.ramp_mode);
        if (warm != nullptr) {
            const Schedule rescaled = warm->best_schedule.with_time(t);
            if (guarded_group_fidelity(rescaled, subsample, obj_opts) >
                guarded_group_fidelity(initial, subsample, obj_opts)) {
                initial = rescaled;
            }
        }
        return dcrab_optimize(group, initial, cfg);
    });
}

EscalationResult linear_required_time(const std::vector<PhysicalInstance>& group, double target,
                                      const DcrabConfig& cfg) {
    if (!(target >= 0.0 && target < 1.0)) {
        throw std::invalid_argument("linear_required_time: target must be in [0, 1)");
    }
    DcrabConfig walk_cfg = cfg;
    walk_cfg.target_fidelity = std::max(target, 1e-12);
    walk_cfg.validate();
    const double c = shared_constraint_strength(group);
    const EvolveOptions val_opts = validation_evolve_options(cfg);

    // The linear walk needs only the mean fidelity, so a failing grid point
    // can stop as soon as the remaining members cannot lift the mean to the
    // target.
    const auto attempt = [&](double t, const OptimizationRecord*) {
        const Schedule ramp = Schedule::linear(t, c, cfg.ramp_mode);
        const BoundedGroupFidelity bg =
            group_fidelity_bounded(ramp, group, walk_cfg.target_fidelity, val_opts);
        OptimizationRecord rec;
        rec.best_schedule = ramp;
        rec.best_objective = bg.value;
        rec.objective_is_bound = !bg.completed;
        rec.objective_history.emplace_back(0, rec.best_objective);
        rec.evaluations = 1;
        return rec;
    };
    return escalation_walk(walk_cfg, attempt);
}

SpeedupReport speedup_report(const std::vector<double>& optimized_times,
                             const std::vector<double>& linear_times) {
    if (optimized_times.size() != linear_times.size()) {
        throw std::invalid_argument("speedup_report: time vectors must have equal length");
    }
    SpeedupReport report;
    double factor_sum = 0.0;
    double reduction_sum = 0.0;
    for (std::size_t g = 0; g < optimized_times.size(); ++g) {
        GroupSpeedup row;
        row.group_index = static_cast<int>(g);
        row.optimized_t = optimized_times[g];
        row.linear_t = linear_times[g];
        row.present = std::isfinite(row.optimized_t) && std::isfinite(row.linear_t) &&
                      row.optimized_t > 0.0 && row.linear_t > 0.0;
        if (row.present) {
            row.factor = row.linear_t / row.optimized_t;
            row.reduction = 1.0 - row.optimized_t / row.linear_t;
            factor_sum += row.factor;
            reduction_sum += row.reduction;
            ++report.groups_counted;
        }
        report.rows.push_back(row);
    }
    if (report.groups_counted > 0) {
        report.average_factor = factor_sum / report.groups_counted;
        report.average_reduction = reduction_sum / report.groups_counted;
    }
    return report;
}

std::string speedup_to_csv(const SpeedupReport& report) {
    std::string out = "group,linear_T,optimized_T,factor,reduction\n";
    char buf[160];
    for (const auto& row : report.rows) {
        if (row.present) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", row.group_index,
                          row.linear_t, row.optimized_t, row.factor, row.reduction);
        } else {
            std::snprintf(buf, sizeof buf, "%d,,,,\n", row.group_index);
        }
        out += buf;
    }
    char avg[160];
    std::snprintf(avg, sizeof avg, "average,,,%.17g,%.17g\n", report.average_factor,
                  report.average_reduction);
    out += avg;
    return out;
}

nlohmann::json optimization_record_to_json(const OptimizationRecord& record) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& [idx, value] : record.objective_history) {
        history.push_back({idx, value});
    }
    nlohmann::json supers = nlohmann::json::array();
    for (const auto& entry : record.superiteration_log) {
        nlohmann::json drawn = nlohmann::json::array();
        for (const auto& t : entry.drawn) {
            drawn.push_back({{"omega", t.omega}, {"a", t.a}, {"b", t.b}});
        }
        supers.push_back({{"drawn", std::move(drawn)},
                          {"best_after", entry.best_after},
                          {"accepted", entry.accepted}});
    }
    return {{"best_schedule", schedule_to_json(record.best_schedule)},
            {"best_objective", record.best_objective},
            {"objective_is_bound", record.objective_is_bound},
            {"objective_history", std::move(history)},
            {"superiteration_log", std::move(supers)},
            {"evaluations", record.evaluations},
            {"wall_time_seconds", record.wall_time_seconds}};
}

}  // namespace lhz
