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

// End-to-end acceptance gate. Each criterion prints exactly one
// "criterion N: PASS/FAIL (...)" line; the exit code is nonzero when any
// requested criterion fails. Criteria 5-6 write the desk cohort into the
// --state directory and criteria 7-8 read it back, so ctest can order the
// expensive stages while keeping every run reproducible from seeds alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lhz/cohort.hpp"
#include "lhz/dynamics.hpp"
#include "lhz/instance.hpp"
#include "lhz/operators.hpp"
#include "lhz/optimize.hpp"
#include "lhz/protocol_library.hpp"
#include "lhz/schedule.hpp"
#include "lhz/spectrum.hpp"

namespace {

constexpr double kConstraint = 2.0;
constexpr double kGroupTarget = 0.9;
// Smallest minimum gap admitted into the grouped desk cohort. Below this
// the linear reference time outgrows a single-workstation budget, the same
// reason the full-scale pipeline caps escalation at T = 1000 and discards
// the instances that hit the cap.
constexpr double kDeskGapFloor = 0.25;

struct CriterionResult {
    int id = 0;
    bool pass = false;
    std::string detail;
};

lhz::EvolveOptions validation_options() {
    lhz::EvolveOptions opts;
    opts.step_rate = 10.0;
    opts.min_steps = 800;
    return opts;
}

// Desk-profile optimizer: three dressing rounds of one frequency each, a
// seeded eight-member subsample behind the simplex, and integration rates
// backed by the step-halving margins measured in criterion 2.
lhz::DcrabConfig desk_optimizer(std::uint64_t seed) {
    lhz::DcrabConfig cfg;
    cfg.n_superiterations = 3;
    cfg.n_frequencies_per_super = 1;
    cfg.inner_max_evaluations = 30;
    cfg.target_fidelity = kGroupTarget;
    cfg.objective_subsample = 8;
    cfg.objective_step_rate = 6.0;
    cfg.objective_min_steps = 400;
    cfg.validation_step_rate = 10.0;
    cfg.validation_min_steps = 800;
    cfg.futility_threshold = 0.5;
    cfg.t_initial = 1.0;
    cfg.t_cap = 400.0;
    cfg.seed = seed;
    return cfg;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------
// State directory plumbing.

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string read_state_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("missing state file " + path.string() +
                                 "; run the cohort stage (criteria 5,6) first");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json grouping_to_json(const lhz::Grouping& grouping) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : grouping.groups) {
        groups.push_back({{"begin", g.begin},
                          {"end", g.end},
                          {"kept", g.kept},
                          {"sigma", g.sigma},
                          {"gap_min", g.gap_min},
                          {"gap_max", g.gap_max}});
    }
    return {{"quota", grouping.quota},
            {"balance_passes", grouping.balance_passes},
            {"equal_count_max_sigma", grouping.equal_count_max_sigma},
            {"balanced_max_sigma", grouping.balanced_max_sigma},
            {"groups", std::move(groups)},
            {"unassigned", grouping.unassigned}};
}

lhz::Grouping grouping_from_json(const nlohmann::json& j) {
    lhz::Grouping grouping;
    grouping.quota = j.at("quota").get<int>();
    grouping.balance_passes = j.at("balance_passes").get<int>();
    grouping.equal_count_max_sigma = j.at("equal_count_max_sigma").get<double>();
    grouping.balanced_max_sigma = j.at("balanced_max_sigma").get<double>();
    grouping.unassigned = j.at("unassigned").get<std::vector<std::size_t>>();
    for (const auto& g : j.at("groups")) {
        lhz::GroupRange range;
        range.begin = g.at("begin").get<std::size_t>();
        range.end = g.at("end").get<std::size_t>();
        range.kept = g.at("kept").get<std::vector<std::size_t>>();
        range.sigma = g.at("sigma").get<double>();
        range.gap_min = g.at("gap_min").get<double>();
        range.gap_max = g.at("gap_max").get<double>();
        grouping.groups.push_back(std::move(range));
    }
    return grouping;
}

lhz::Cohort cohort_from_manifest(const std::string& jsonl) {
    lhz::Cohort cohort;
    std::istringstream lines(jsonl);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const nlohmann::json row = nlohmann::json::parse(line);
        lhz::CohortMember member;
        member.logical = lhz::instance_from_json(row);
        member.gap.min_gap = row.at("min_gap").get<double>();
        member.gap.position = row.at("position").get<double>();
        member.gap.local_minima_count = row.at("local_minima_count").get<int>();
        cohort.seed = row.at("seed").get<std::uint64_t>();
        cohort.members.push_back(std::move(member));
    }
    return cohort;
}

lhz::Cohort drop_below_gap(const lhz::Cohort& cohort, double floor) {
    lhz::Cohort out;
    out.seed = cohort.seed;
    out.filter_log = cohort.filter_log;
    for (const auto& m : cohort.members) {
        if (m.gap.min_gap >= floor) {
            out.members.push_back(m);
        } else {
            out.filter_log.emplace_back(m.logical.id, "t-cap");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 1: the encoded logical ground is the in-code-space minimizer.

bool plaquettes_satisfied(const lhz::PhysicalInstance& phys, std::size_t basis) {
    for (const auto& p : phys.plaquettes) {
        int product = 1;
        for (int k : p.members) {
            product *= ((basis >> k) & 1u) != 0 ? -1 : 1;
        }
        if (product != 1) return false;
    }
    return true;
}

std::size_t basis_of_physical(const std::vector<int>& config) {
    std::size_t b = 0;
    for (std::size_t k = 0; k < config.size(); ++k) {
        if (config[k] == -1) b |= std::size_t{1} << k;
    }
    return b;
}

CriterionResult criterion_1() {
    int total = 0;
    int matches = 0;
    int violating = 0;
    int unexplained = 0;
    for (int n : {3, 4, 5}) {
        const auto instances = lhz::sample_instances(200, n, 1000 + static_cast<std::uint64_t>(n));
        for (const auto& inst : instances) {
            const auto phys = lhz::map_logical_to_physical(inst, kConstraint);
            const lhz::PassageGenerator gen(phys);
            const std::vector<double> diag = gen.final_diagonal();

            std::size_t argmin = 0;
            std::size_t best_sat = diag.size();
            for (std::size_t b = 0; b < diag.size(); ++b) {
                if (diag[b] < diag[argmin]) argmin = b;
                if (plaquettes_satisfied(phys, b) &&
                    (best_sat == diag.size() || diag[b] < diag[best_sat])) {
                    best_sat = b;
                }
            }

            const auto ground = lhz::logical_ground_bruteforce(inst);
            std::set<std::size_t> encoded;
            for (const auto& config : ground.configs) {
                encoded.insert(basis_of_physical(lhz::encode_configuration(config)));
            }

            const bool match = encoded.count(best_sat) != 0;
            const bool global_violates = !plaquettes_satisfied(phys, argmin);
            ++total;
            if (match) ++matches;
            if (global_violates) ++violating;
            if (!match && !global_violates) ++unexplained;
        }
    }
    const double rate = static_cast<double>(matches) / total;
    CriterionResult res;
    res.id = 1;
    res.pass = rate >= 0.99 && unexplained == 0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "oracle agreement %d/%d, %d constraint-violating exceptions, %d unexplained",
                  matches, total, violating, unexplained);
    res.detail = buf;
    return res;
}

// ---------------------------------------------------------------------------
// Criteria 2-4 share one fixture set: retained instances with a clear gap.

const std::vector<lhz::CohortMember>& dynamics_fixtures() {
    static const std::vector<lhz::CohortMember> fixtures = [] {
        const auto instances = lhz::sample_instances(150, 5, 2027);
        lhz::Cohort raw;
        for (const auto& inst : instances) raw.members.push_back({inst, {}});
        const auto retained = lhz::filter_instances(raw, {});
        std::vector<lhz::LogicalInstance> logicals;
        for (const auto& m : retained.members) logicals.push_back(m.logical);
        const auto cohort = lhz::build_cohort(logicals, kConstraint, 2027);
        std::vector<lhz::CohortMember> picked;
        for (const auto& m : cohort.members) {
            if (m.gap.min_gap > 0.45) picked.push_back(m);
            if (picked.size() == 20) break;
        }
        if (picked.size() < 20) {
            throw std::runtime_error("fixture screening found fewer than 20 wide-gap instances");
        }
        return picked;
    }();
    return fixtures;
}

CriterionResult criterion_2() {
    double max_drift = 0.0;
    double max_df = 0.0;
    for (const auto& m : dynamics_fixtures()) {
        const auto phys = lhz::map_logical_to_physical(m.logical, kConstraint);
        const auto sched = lhz::Schedule::linear(10.0, kConstraint);
        lhz::EvolveOptions coarse = validation_options();
        lhz::EvolveOptions fine = coarse;
        fine.step_rate = 2.0 * coarse.step_rate;
        fine.min_steps = 2 * coarse.min_steps;
        const auto a = lhz::evolve(phys, sched, coarse);
        const auto b = lhz::evolve(phys, sched, fine);
        max_drift = std::max({max_drift, a.norm_drift, b.norm_drift});
        max_df = std::max(max_df, std::abs(a.fidelity - b.fidelity));
    }
    CriterionResult res;
    res.id = 2;
    res.pass = max_drift < 1e-6 && max_df < 1e-6;
    char buf[120];
    std::snprintf(buf, sizeof buf, "max norm drift %.2e, max step-halving dF %.2e over 20 fixtures",
                  max_drift, max_df);
    res.detail = buf;
    return res;
}

CriterionResult criterion_3() {
    double min_f = 1.0;
    for (const auto& m : dynamics_fixtures()) {
        const auto phys = lhz::map_logical_to_physical(m.logical, kConstraint);
        const double t_adiabatic = 100.0 / (m.gap.min_gap * m.gap.min_gap);
        const auto r =
            lhz::evolve(phys, lhz::Schedule::linear(t_adiabatic, kConstraint), validation_options());
        min_f = std::min(min_f, r.fidelity);
        std::fprintf(stderr, "  [c3] gap %.3f T %.0f F %.5f\n", m.gap.min_gap, t_adiabatic,
                     r.fidelity);
    }
    CriterionResult res;
    res.id = 3;
    res.pass = min_f >= 0.99;
    char buf[100];
    std::snprintf(buf, sizeof buf, "min fidelity %.5f at T = 100/gap^2 over 20 fixtures", min_f);
    res.detail = buf;
    return res;
}

CriterionResult criterion_4() {
    double worst = 0.0;
    bool unique = true;
    const auto& fixtures = dynamics_fixtures();
    for (std::size_t i = 0; i < 5; ++i) {
        const auto phys = lhz::map_logical_to_physical(fixtures[i].logical, kConstraint);
        const auto r =
            lhz::evolve(phys, lhz::Schedule::linear(1e-7, kConstraint), validation_options());
        worst = std::max(worst, std::abs(r.fidelity - 1.0 / 1024.0));
        unique = unique && !r.degenerate_final;
    }
    CriterionResult res;
    res.id = 4;
    res.pass = worst <= 1e-9 && unique;
    char buf[100];
    std::snprintf(buf, sizeof buf, "max |F - 1/1024| = %.2e over 5 quenches, unique grounds: %s",
                  worst, unique ? "yes" : "no");
    res.detail = buf;
    return res;
}

// ---------------------------------------------------------------------------
// Criteria 5-6: desk cohort statistics and grouping; writes pipeline state.

std::vector<CriterionResult> cohort_stage(const std::filesystem::path& state_dir) {
    std::filesystem::create_directories(state_dir);

    constexpr int kSampleSize = 3000;
    std::fprintf(stderr, "[cohort] sampling and filtering %d instances\n", kSampleSize);
    const auto instances = lhz::sample_instances(kSampleSize, 5, 2028);
    lhz::Cohort raw;
    raw.seed = 2028;
    for (const auto& inst : instances) raw.members.push_back({inst, {}});
    const auto retained = lhz::filter_instances(raw, {});
    std::vector<lhz::LogicalInstance> logicals;
    for (const auto& m : retained.members) logicals.push_back(m.logical);

    std::fprintf(stderr, "[cohort] scanning %zu spectra on 101-point grids\n", logicals.size());
    auto cohort = lhz::build_cohort(logicals, kConstraint, 2028);
    cohort.filter_log = retained.filter_log;

    int multi = 0;
    for (const auto& m : cohort.members) {
        if (m.gap.local_minima_count > 1) ++multi;
    }
    const double multi_frac = static_cast<double>(multi) / cohort.members.size();

    CriterionResult c5;
    c5.id = 5;
    c5.pass = cohort.members.size() >= 2000 && multi_frac <= 0.02;
    {
        char buf[140];
        std::snprintf(buf, sizeof buf,
                      "%d of %zu retained instances with multiple gap minima (%.2f%%)", multi,
                      cohort.members.size(), 100.0 * multi_frac);
        c5.detail = buf;
    }

    const auto sorted = lhz::sort_by_gap(cohort);
    auto [train, test] = lhz::split_train_test(sorted, 2029);
    const auto train_floored = drop_below_gap(train, kDeskGapFloor);
    const auto test_floored = drop_below_gap(test, kDeskGapFloor);
    std::fprintf(stderr, "[cohort] floored halves: train %zu, test %zu members\n",
                 train_floored.members.size(), test_floored.members.size());

    const auto grouping = lhz::balance_groups(train_floored, 6, 50);
    bool intervals_ok = true;
    for (std::size_t g = 1; g < grouping.groups.size(); ++g) {
        if (grouping.groups[g].gap_min < grouping.groups[g - 1].gap_max) intervals_ok = false;
    }

    CriterionResult c6;
    c6.id = 6;
    c6.pass = grouping.balanced_max_sigma < grouping.equal_count_max_sigma && intervals_ok;
    {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "balanced max sigma %.4f vs equal-count %.4f, intervals %s",
                      grouping.balanced_max_sigma, grouping.equal_count_max_sigma,
                      intervals_ok ? "ordered and disjoint" : "OVERLAP");
        c6.detail = buf;
    }

    const auto test_grouping = lhz::assign_test_groups(test_floored, grouping, 50);

    write_text(state_dir / "train.jsonl", lhz::cohort_manifest_jsonl(train_floored, &grouping, "train"));
    write_text(state_dir / "test.jsonl",
               lhz::cohort_manifest_jsonl(test_floored, &test_grouping, "test"));
    write_text(state_dir / "train_grouping.json", grouping_to_json(grouping).dump(2) + "\n");
    write_text(state_dir / "test_grouping.json", grouping_to_json(test_grouping).dump(2) + "\n");
    write_text(state_dir / "gap_histogram.csv",
               lhz::histogram_to_csv(lhz::gap_histogram(train_floored, grouping)));
    return {c5, c6};
}

// ---------------------------------------------------------------------------
// Criteria 7-8: group schedule optimization, speed-up, and generalization.

std::vector<CriterionResult> pipeline_stage(const std::filesystem::path& state_dir) {
    const auto train = cohort_from_manifest(read_state_file(state_dir / "train.jsonl"));
    const auto test = cohort_from_manifest(read_state_file(state_dir / "test.jsonl"));
    const auto grouping =
        grouping_from_json(nlohmann::json::parse(read_state_file(state_dir / "train_grouping.json")));
    const auto test_grouping =
        grouping_from_json(nlohmann::json::parse(read_state_file(state_dir / "test_grouping.json")));

    const std::size_t n_groups = grouping.groups.size();
    std::vector<double> t_opt(n_groups, 0.0);
    std::vector<double> t_lin(n_groups, 0.0);
    std::vector<lhz::EscalationResult> walks(n_groups);
    bool all_found = true;

    for (std::size_t g = 0; g < n_groups; ++g) {
        const auto group = lhz::group_instances(train, grouping, static_cast<int>(g), kConstraint);
        const auto cfg = desk_optimizer(7000 + g);
        std::fprintf(stderr, "[pipeline] group %zu (gaps %.3f..%.3f): optimizing\n", g,
                     grouping.groups[g].gap_min, grouping.groups[g].gap_max);
        walks[g] = lhz::escalate_time(group, cfg);
        std::fprintf(stderr, "[pipeline] group %zu: optimized T %.3f (hard: %d), walking linear\n",
                     g, walks[g].t_final, walks[g].hard ? 1 : 0);
        const auto lin = lhz::linear_required_time(group, kGroupTarget, cfg);
        std::fprintf(stderr, "[pipeline] group %zu: linear T %.3f (hard: %d)\n", g, lin.t_final,
                     lin.hard ? 1 : 0);
        if (walks[g].hard || lin.hard) {
            all_found = false;
            continue;
        }
        t_opt[g] = walks[g].t_final;
        t_lin[g] = lin.t_final;
    }

    const auto report = lhz::speedup_report(t_opt, t_lin);
    write_text(state_dir / "speedup.csv", lhz::speedup_to_csv(report));
    {
        nlohmann::json protocols = nlohmann::json::array();
        for (std::size_t g = 0; g < n_groups; ++g) {
            protocols.push_back({{"group", g},
                                 {"t_optimized", t_opt[g]},
                                 {"t_linear", t_lin[g]},
                                 {"record", lhz::optimization_record_to_json(walks[g].record)}});
        }
        write_text(state_dir / "protocols.json", protocols.dump(2) + "\n");
    }

    double min_factor = 1e300;
    for (const auto& row : report.rows) {
        if (row.present) min_factor = std::min(min_factor, row.factor);
    }

    CriterionResult c7;
    c7.id = 7;
    c7.pass = all_found && report.groups_counted == static_cast<int>(n_groups) &&
              min_factor >= 1.0 && report.average_factor >= 2.0;
    {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "average speed-up %.2f over %d groups, smallest group factor %.2f",
                      report.average_factor, report.groups_counted, min_factor);
        c7.detail = buf;
    }

    double max_gap_diff = 0.0;
    std::vector<double> pooled;
    for (std::size_t g = 0; g < n_groups && all_found; ++g) {
        const double train_mean = walks[g].record.best_objective;
        const auto test_group =
            lhz::group_instances(test, test_grouping, static_cast<int>(g), kConstraint);
        const auto fids = lhz::individual_fidelities(walks[g].record.best_schedule, test_group,
                                                     validation_options());
        const double test_mean = mean(fids);
        max_gap_diff = std::max(max_gap_diff, std::abs(train_mean - test_mean));
        pooled.insert(pooled.end(), fids.begin(), fids.end());
        std::fprintf(stderr, "[pipeline] group %zu: train F %.4f test F %.4f\n", g, train_mean,
                     test_mean);
    }
    double above_half = 0.0;
    if (!pooled.empty()) {
        for (double f : pooled) {
            if (f >= 0.5) above_half += 1.0;
        }
        above_half /= static_cast<double>(pooled.size());
    }

    CriterionResult c8;
    c8.id = 8;
    c8.pass = all_found && max_gap_diff <= 0.05 && above_half >= 0.95;
    {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "max |train-test| group fidelity gap %.4f, %.1f%% of test fidelities >= 0.5",
                      max_gap_diff, 100.0 * above_half);
        c8.detail = buf;
    }
    return {c7, c8};
}

// ---------------------------------------------------------------------------
// Criterion 9: protocol library saturation on a fixture stream.

CriterionResult criterion_9() {
    std::fprintf(stderr, "[library] screening the stream fixture\n");
    const auto instances = lhz::sample_instances(800, 5, 2030);
    lhz::Cohort raw;
    for (const auto& inst : instances) raw.members.push_back({inst, {}});
    const auto retained = lhz::filter_instances(raw, {});
    std::vector<lhz::LogicalInstance> logicals;
    for (const auto& m : retained.members) logicals.push_back(m.logical);
    const auto cohort = lhz::build_cohort(logicals, kConstraint, 2030);

    std::vector<lhz::LogicalInstance> stream;
    for (const auto& m : cohort.members) {
        if (m.gap.min_gap >= 0.3) stream.push_back(m.logical);
        if (stream.size() == 300) break;
    }
    if (stream.size() < 300) {
        throw std::runtime_error("stream screening found fewer than 300 workable instances");
    }

    lhz::LibraryConfig lib_cfg;
    lib_cfg.stream_seed = 2030;
    lib_cfg.constraint_strength = kConstraint;
    const auto opt = desk_optimizer(9001);

    std::fprintf(stderr, "[library] growing over 300 instances\n");
    const auto lib = lhz::build_library(stream, lib_cfg, opt);
    int last_growth = -1;
    for (std::size_t i = 0; i < lib.growth_log.size(); ++i) {
        if (lib.growth_log[i].grew) last_growth = static_cast<int>(i);
    }

    std::vector<lhz::LogicalInstance> duplicates;
    for (int i = 0; i < 60; ++i) {
        auto copy = stream[0];
        copy.id = "dup-" + std::to_string(i);
        duplicates.push_back(std::move(copy));
    }
    const auto dup_lib = lhz::build_library(duplicates, lib_cfg, opt);

    CriterionResult res;
    res.id = 9;
    res.pass = lib.saturated && lib.entries.size() <= 30 && dup_lib.entries.size() == 1;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "library size %zu (last growth at instance %d, saturated: %s); duplicate-stream size %zu",
                  lib.entries.size(), last_growth, lib.saturated ? "yes" : "no",
                  dup_lib.entries.size());
    res.detail = buf;
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 10: optimizer determinism, monotonicity, and convergence.

CriterionResult criterion_10() {
    lhz::PhysicalInstance two_level;
    two_level.k_physical = 1;
    two_level.n_logical = 2;
    two_level.fields = {0.8};
    two_level.constraint_strength = kConstraint;
    two_level.id = "two-level";
    const std::vector<lhz::PhysicalInstance> group = {two_level};

    lhz::DcrabConfig cfg;
    cfg.n_superiterations = 4;
    cfg.inner_max_evaluations = 60;
    cfg.seed = 424242;
    cfg.target_fidelity = 0.999999;

    const auto r1 = lhz::dcrab_optimize(group, 5.0, cfg);
    const auto r2 = lhz::dcrab_optimize(group, 5.0, cfg);

    double max_dev = std::abs(r1.best_objective - r2.best_objective);
    const bool same_shape = r1.objective_history.size() == r2.objective_history.size();
    if (same_shape) {
        for (std::size_t i = 0; i < r1.objective_history.size(); ++i) {
            max_dev = std::max(max_dev, std::abs(r1.objective_history[i].second -
                                                 r2.objective_history[i].second));
        }
    }

    double best_so_far = -1e300;
    for (const auto& entry : r1.objective_history) {
        best_so_far = std::max(best_so_far, entry.second);
    }
    bool monotone = best_so_far <= r1.best_objective + 1e-15;
    double prev = -1e300;
    for (const auto& entry : r1.superiteration_log) {
        if (entry.best_after < prev - 1e-15) monotone = false;
        prev = entry.best_after;
    }

    const auto quad = [](const std::vector<double>& x) {
        const double dx = x[0] - 0.3;
        const double dy = x[1] + 0.2;
        return 1.0 - dx * dx - dy * dy;
    };
    lhz::NelderMeadOptions nm;
    nm.max_evaluations = 300;
    const auto nm_res = lhz::nelder_mead_maximize(quad, {0.0, 0.0}, nm);
    const double nm_err =
        std::max(std::abs(nm_res.best_point[0] - 0.3), std::abs(nm_res.best_point[1] + 0.2));

    CriterionResult res;
    res.id = 10;
    res.pass = same_shape && max_dev <= 1e-12 && monotone && nm_err <= 1e-3;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "rerun deviation %.1e, monotone best-so-far: %s, simplex error %.1e", max_dev,
                  monotone ? "yes" : "no", nm_err);
    res.detail = buf;
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    std::string criteria_arg;
    std::filesystem::path state_dir;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criteria") == 0 && i + 1 < argc) {
            criteria_arg = argv[++i];
        } else if (std::strcmp(argv[i], "--state") == 0 && i + 1 < argc) {
            state_dir = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance --criteria 1,2,... [--state DIR]\n");
            return 2;
        }
    }
    if (criteria_arg.empty()) {
        std::fprintf(stderr, "usage: acceptance --criteria 1,2,... [--state DIR]\n");
        return 2;
    }

    std::set<int> wanted;
    std::istringstream parts(criteria_arg);
    std::string token;
    while (std::getline(parts, token, ',')) {
        const int id = std::stoi(token);
        if (id < 1 || id > 10) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        wanted.insert(id);
    }
    if ((wanted.count(5) || wanted.count(6) || wanted.count(7) || wanted.count(8)) &&
        state_dir.empty()) {
        std::fprintf(stderr, "criteria 5-8 need --state DIR\n");
        return 2;
    }

    std::vector<CriterionResult> results;
    const auto run_stage = [&](std::initializer_list<int> ids, auto&& stage) {
        bool requested = false;
        for (int id : ids) requested = requested || wanted.count(id) != 0;
        if (!requested) return;
        try {
            for (auto& r : stage()) {
                if (wanted.count(r.id)) results.push_back(std::move(r));
            }
        } catch (const std::exception& e) {
            for (int id : ids) {
                if (wanted.count(id)) {
                    results.push_back({id, false, std::string("exception: ") + e.what()});
                }
            }
        }
    };

    const auto single = [](CriterionResult (*fn)()) {
        return [fn]() { return std::vector<CriterionResult>{fn()}; };
    };
    run_stage({1}, single(&criterion_1));
    run_stage({2}, single(&criterion_2));
    run_stage({3}, single(&criterion_3));
    run_stage({4}, single(&criterion_4));
    run_stage({5, 6}, [&] { return cohort_stage(state_dir); });
    run_stage({7, 8}, [&] { return pipeline_stage(state_dir); });
    run_stage({9}, single(&criterion_9));
    run_stage({10}, single(&criterion_10));

    std::sort(results.begin(), results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("criterion %d: %s (%s)\n", r.id, r.pass ? "PASS" : "FAIL", r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}
