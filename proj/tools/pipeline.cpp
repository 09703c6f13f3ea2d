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

#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lhz/cohort.hpp"
#include "lhz/dynamics.hpp"
#include "lhz/instance.hpp"
#include "lhz/optimize.hpp"
#include "lhz/protocol_library.hpp"
#include "lhz/rng.hpp"
#include "lhz/schedule.hpp"
#include "lhz/spectrum.hpp"

namespace lhztool {
namespace {

// Stage indices feeding lhz::mix_key for per-stage seed derivation.
constexpr std::uint64_t kSplitStream = 2;
constexpr std::uint64_t kOptimizeStream = 100;
constexpr std::uint64_t kLibraryStream = 200;

void append_log(const StageContext& ctx, const std::string& line) {
    std::ofstream log(ctx.out / "run_log.txt", std::ios::app);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    log << stamp << " " << line << "\n";
}

void write_artifact(const StageContext& ctx, const std::string& name, const std::string& content) {
    const auto path = ctx.out / name;
    if (std::filesystem::exists(path) && !ctx.overwrite) {
        throw ValidationError(path.string() + " already exists; pass --overwrite to replace it");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    append_log(ctx, "wrote " + name);
}

std::string read_artifact(const StageContext& ctx, const std::string& name,
                          const std::string& producing_stage) {
    const auto path = ctx.out / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingArtifactError("artifact " + name + " not found in " + ctx.out.string() +
                                   "; run the " + producing_stage + " stage first");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string csv_header(const StageContext& ctx) {
    return "# config_hash=" + config_hash(ctx.config) + " seed=" + std::to_string(ctx.config.seed) +
           "\n";
}

nlohmann::json meta_row(const StageContext& ctx, const std::string& artifact) {
    return {{"artifact", artifact},
            {"config_hash", config_hash(ctx.config)},
            {"seed", ctx.config.seed}};
}

void check_hash(const StageContext& ctx, const nlohmann::json& meta, const std::string& name) {
    if (meta.value("config_hash", std::string()) != config_hash(ctx.config)) {
        throw ValidationError("artifact " + name +
                              " was produced under a different configuration; rerun the "
                              "pipeline from the sample stage or pass --overwrite upstream");
    }
}

// Parses a JSONL manifest: meta line first, then one member per line.
// Members carrying a discard_reason are returned separately.
struct ParsedManifest {
    lhz::Cohort retained;
    std::vector<std::pair<std::string, std::string>> discards;
};

ParsedManifest parse_manifest(const StageContext& ctx, const std::string& name,
                              const std::string& producing_stage, bool expect_gaps) {
    const std::string body = read_artifact(ctx, name, producing_stage);
    ParsedManifest parsed;
    std::istringstream lines(body);
    std::string line;
    bool meta_seen = false;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const nlohmann::json row = nlohmann::json::parse(line);
        if (!meta_seen && row.contains("artifact")) {
            check_hash(ctx, row, name);
            meta_seen = true;
            continue;
        }
        if (row.contains("discard_reason")) {
            parsed.discards.emplace_back(row.at("id").get<std::string>(),
                                         row.at("discard_reason").get<std::string>());
            parsed.retained.filter_log.push_back(parsed.discards.back());
            continue;
        }
        lhz::CohortMember member;
        member.logical = lhz::instance_from_json(row);
        if (expect_gaps) {
            member.gap.min_gap = row.at("min_gap").get<double>();
            member.gap.position = row.at("position").get<double>();
            member.gap.local_minima_count = row.at("local_minima_count").get<int>();
        }
        parsed.retained.seed = row.value("seed", std::uint64_t{0});
        parsed.retained.members.push_back(std::move(member));
    }
    if (!meta_seen) {
        throw ValidationError("artifact " + name + " lacks its metadata line");
    }
    return parsed;
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

lhz::EvolveOptions validation_options(const RunConfig& cfg) {
    lhz::EvolveOptions opts;
    opts.step_rate = cfg.dcrab.validation_step_rate;
    opts.min_steps = cfg.dcrab.validation_min_steps;
    return opts;
}

lhz::DcrabConfig stage_dcrab(const RunConfig& cfg, std::uint64_t stream) {
    lhz::DcrabConfig d = cfg.dcrab;
    d.seed = lhz::mix_key(cfg.seed, stream);
    d.target_fidelity = cfg.target_fidelity;
    d.ramp_mode = cfg.ramp();
    return d;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0
                     : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& out) {
    std::ifstream in(out / "run_config.json", std::ios::binary);
    if (!in) {
        throw MissingArtifactError("artifact run_config.json not found in " + out.string() +
                                   "; run the sample stage first");
    }
    const auto j = nlohmann::json::parse(in);
    std::vector<std::string> unknown;
    RunConfig cfg = run_config_from_json(j, unknown);
    if (!unknown.empty()) {
        std::string msg = "run_config.json has unknown fields:";
        for (const auto& k : unknown) msg += " " + k;
        throw ValidationError(msg);
    }
    return cfg;
}

void cmd_sample(const StageContext& ctx) {
    std::filesystem::create_directories(ctx.out);
    nlohmann::json cfg_json = run_config_to_json(ctx.config);
    cfg_json["config_hash"] = config_hash(ctx.config);
    write_artifact(ctx, "run_config.json", cfg_json.dump(2) + "\n");

    const auto instances =
        lhz::sample_instances(ctx.config.sample_size, ctx.config.n_logical, ctx.config.seed);
    std::string body = meta_row(ctx, "sample").dump() + "\n";
    for (const auto& inst : instances) body += lhz::instance_to_json(inst).dump() + "\n";
    write_artifact(ctx, "sample.jsonl", body);
    std::fprintf(stderr, "sampled %zu instances\n", instances.size());
}

void cmd_spectra(const StageContext& ctx) {
    const auto parsed = parse_manifest(ctx, "sample.jsonl", "sample", false);

    lhz::Cohort raw;
    raw.seed = ctx.config.seed;
    raw.members = parsed.retained.members;
    lhz::FilterPolicy policy;
    policy.constraint_strength = ctx.config.constraint_strength;
    const auto retained = lhz::filter_instances(raw, policy);

    std::vector<lhz::LogicalInstance> logicals;
    for (const auto& m : retained.members) logicals.push_back(m.logical);
    std::fprintf(stderr, "scanning %zu spectra (%d-point grids)\n", logicals.size(),
                 ctx.config.m_points);
    lhz::SpectrumOptions options;
    options.m_points = ctx.config.m_points;
    auto cohort = lhz::build_cohort(logicals, ctx.config.constraint_strength, ctx.config.seed,
                                    options, ctx.config.ramp());
    cohort.filter_log = retained.filter_log;

    std::unordered_map<std::string, const lhz::CohortMember*> by_id;
    for (const auto& m : raw.members) by_id[m.logical.id] = &m;
    std::string body = meta_row(ctx, "spectra").dump() + "\n";
    body += lhz::cohort_manifest_jsonl(cohort, nullptr, "");
    for (const auto& [id, reason] : cohort.filter_log) {
        body += lhz::member_manifest_json(*by_id.at(id), ctx.config.seed, -1, "", reason).dump() +
                "\n";
    }
    write_artifact(ctx, "spectra.jsonl", body);

    int multi = 0;
    for (const auto& m : cohort.members) {
        if (m.gap.local_minima_count > 1) ++multi;
    }
    nlohmann::json summary = {
        {"config_hash", config_hash(ctx.config)},
        {"seed", ctx.config.seed},
        {"sampled", raw.members.size()},
        {"retained", cohort.members.size()},
        {"discarded", cohort.filter_log.size()},
        {"multiple_minimum_fraction",
         cohort.members.empty() ? 0.0
                                : static_cast<double>(multi) /
                                      static_cast<double>(cohort.members.size())}};
    write_artifact(ctx, "spectra_summary.json", summary.dump(2) + "\n");
}

void cmd_group(const StageContext& ctx) {
    const auto parsed = parse_manifest(ctx, "spectra.jsonl", "spectra", true);
    lhz::Cohort cohort = parsed.retained;
    cohort.seed = ctx.config.seed;

    const auto sorted = lhz::sort_by_gap(cohort);
    auto [train, test] = lhz::split_train_test(sorted, lhz::mix_key(ctx.config.seed, kSplitStream));
    const auto grouping =
        lhz::balance_groups(train, ctx.config.n_groups, ctx.config.quota, ctx.config.balance());
    const auto test_grouping = lhz::assign_test_groups(test, grouping, ctx.config.quota);

    write_artifact(ctx, "train.jsonl",
                   meta_row(ctx, "train").dump() + "\n" +
                       lhz::cohort_manifest_jsonl(train, &grouping, "train"));
    write_artifact(ctx, "test.jsonl",
                   meta_row(ctx, "test").dump() + "\n" +
                       lhz::cohort_manifest_jsonl(test, &test_grouping, "test"));
    nlohmann::json groupings = {{"config_hash", config_hash(ctx.config)},
                                {"seed", ctx.config.seed},
                                {"train", grouping_to_json(grouping)},
                                {"test", grouping_to_json(test_grouping)}};
    write_artifact(ctx, "grouping.json", groupings.dump(2) + "\n");
    write_artifact(ctx, "gap_histogram.csv",
                   csv_header(ctx) + lhz::histogram_to_csv(lhz::gap_histogram(train, grouping)));
    std::fprintf(stderr, "train %zu / test %zu members, max sigma %.4f -> %.4f\n",
                 train.members.size(), test.members.size(), grouping.equal_count_max_sigma,
                 grouping.balanced_max_sigma);
}

void cmd_optimize(const StageContext& ctx, int only_group) {
    const auto train = parse_manifest(ctx, "train.jsonl", "group", true).retained;
    const auto groupings =
        nlohmann::json::parse(read_artifact(ctx, "grouping.json", "group"));
    check_hash(ctx, groupings, "grouping.json");
    const auto grouping = grouping_from_json(groupings.at("train"));

    nlohmann::json out_groups = nlohmann::json::array();
    for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
        if (only_group >= 0 && static_cast<std::size_t>(only_group) != g) continue;
        auto members = lhz::group_instances(train, grouping, static_cast<int>(g),
                                            ctx.config.constraint_strength);
        const auto cfg_g = stage_dcrab(ctx.config, kOptimizeStream + g);
        std::fprintf(stderr, "group %zu (gaps %.3f..%.3f): escalating\n", g,
                     grouping.groups[g].gap_min, grouping.groups[g].gap_max);

        // Hard escalations discard the members the cap attempt cannot serve
        // ("t-cap") and resume on the survivors.
        std::vector<std::string> discarded;
        lhz::EscalationResult optimized;
        bool hard = false;
        while (true) {
            optimized = lhz::escalate_time(members, cfg_g);
            if (!optimized.hard) break;
            const auto fids = lhz::individual_fidelities(optimized.record.best_schedule, members,
                                                         validation_options(ctx.config));
            std::vector<lhz::PhysicalInstance> kept;
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (fids[i] >= ctx.config.target_fidelity) {
                    kept.push_back(members[i]);
                } else {
                    discarded.push_back(members[i].id);
                }
            }
            if (kept.empty() || kept.size() == members.size()) {
                hard = true;
                break;
            }
            std::fprintf(stderr, "group %zu: %zu members hit the time cap, resuming on %zu\n", g,
                         members.size() - kept.size(), kept.size());
            members = std::move(kept);
        }

        nlohmann::json entry = {{"group", g},
                                {"gap_min", grouping.groups[g].gap_min},
                                {"gap_max", grouping.groups[g].gap_max},
                                {"hard", hard},
                                {"discarded", discarded}};
        if (!hard) {
            const auto linear = lhz::linear_required_time(members, ctx.config.target_fidelity,
                                                          cfg_g);
            entry["t_optimized"] = optimized.t_final;
            entry["t_linear"] = linear.hard ? nlohmann::json() : nlohmann::json(linear.t_final);
            entry["schedule"] = lhz::schedule_to_json(optimized.record.best_schedule);
            entry["record"] = lhz::optimization_record_to_json(optimized.record);
            std::fprintf(stderr, "group %zu: optimized T %.3f, linear T %s\n", g,
                         optimized.t_final,
                         linear.hard ? "cap" : std::to_string(linear.t_final).c_str());
        }
        out_groups.push_back(std::move(entry));
    }

    nlohmann::json protocols = {{"config_hash", config_hash(ctx.config)},
                                {"seed", ctx.config.seed},
                                {"groups", std::move(out_groups)}};
    write_artifact(ctx, "protocols.json", protocols.dump(2) + "\n");
}

void cmd_evaluate(const StageContext& ctx) {
    const auto train = parse_manifest(ctx, "train.jsonl", "group", true).retained;
    const auto test = parse_manifest(ctx, "test.jsonl", "group", true).retained;
    const auto groupings = nlohmann::json::parse(read_artifact(ctx, "grouping.json", "group"));
    check_hash(ctx, groupings, "grouping.json");
    const auto grouping = grouping_from_json(groupings.at("train"));
    const auto test_grouping = grouping_from_json(groupings.at("test"));
    const auto protocols = nlohmann::json::parse(read_artifact(ctx, "protocols.json", "optimize"));
    check_hash(ctx, protocols, "protocols.json");

    std::string train_csv = csv_header(ctx) + "group,instance_id,fidelity\n";
    std::string test_csv = csv_header(ctx) + "group,instance_id,fidelity\n";
    std::string means_csv =
        csv_header(ctx) + "group,gap_min,gap_max,t_optimized,train_mean,test_mean\n";

    const auto opts = validation_options(ctx.config);
    for (const auto& entry : protocols.at("groups")) {
        const int g = entry.at("group").get<int>();
        char prefix[64];
        if (entry.at("hard").get<bool>()) {
            std::snprintf(prefix, sizeof prefix, "%d,%.6f,%.6f,,,\n",
                          g, entry.at("gap_min").get<double>(), entry.at("gap_max").get<double>());
            means_csv += prefix;
            continue;
        }
        const auto schedule = lhz::schedule_from_json(entry.at("schedule"));
        const std::set<std::string> dropped(entry.at("discarded").begin(),
                                            entry.at("discarded").end());

        auto train_members =
            lhz::group_instances(train, grouping, g, ctx.config.constraint_strength);
        train_members.erase(std::remove_if(train_members.begin(), train_members.end(),
                                           [&](const lhz::PhysicalInstance& p) {
                                               return dropped.count(p.id) != 0;
                                           }),
                            train_members.end());
        const auto test_members =
            lhz::group_instances(test, test_grouping, g, ctx.config.constraint_strength);

        std::fprintf(stderr, "group %d: evaluating %zu train / %zu test members\n", g,
                     train_members.size(), test_members.size());
        const auto train_f = lhz::individual_fidelities(schedule, train_members, opts);
        const auto test_f = lhz::individual_fidelities(schedule, test_members, opts);
        for (std::size_t i = 0; i < train_members.size(); ++i) {
            char row[128];
            std::snprintf(row, sizeof row, "%d,%s,%.10f\n", g, train_members[i].id.c_str(),
                          train_f[i]);
            train_csv += row;
        }
        for (std::size_t i = 0; i < test_members.size(); ++i) {
            char row[128];
            std::snprintf(row, sizeof row, "%d,%s,%.10f\n", g, test_members[i].id.c_str(),
                          test_f[i]);
            test_csv += row;
        }
        char row[160];
        std::snprintf(row, sizeof row, "%d,%.6f,%.6f,%.6f,%.10f,%.10f\n", g,
                      entry.at("gap_min").get<double>(), entry.at("gap_max").get<double>(),
                      entry.at("t_optimized").get<double>(), mean(train_f), mean(test_f));
        means_csv += row;
    }

    write_artifact(ctx, "fidelities_train.csv", train_csv);
    write_artifact(ctx, "fidelities_test.csv", test_csv);
    write_artifact(ctx, "fidelity_means.csv", means_csv);
}

void cmd_speedup(const StageContext& ctx) {
    const auto protocols = nlohmann::json::parse(read_artifact(ctx, "protocols.json", "optimize"));
    check_hash(ctx, protocols, "protocols.json");

    std::size_t n = 0;
    for (const auto& entry : protocols.at("groups")) {
        n = std::max(n, static_cast<std::size_t>(entry.at("group").get<int>()) + 1);
    }
    std::vector<double> t_opt(n, 0.0);
    std::vector<double> t_lin(n, 0.0);
    for (const auto& entry : protocols.at("groups")) {
        if (entry.at("hard").get<bool>() || entry.at("t_linear").is_null()) continue;
        const auto g = static_cast<std::size_t>(entry.at("group").get<int>());
        t_opt[g] = entry.at("t_optimized").get<double>();
        t_lin[g] = entry.at("t_linear").get<double>();
    }
    const auto report = lhz::speedup_report(t_opt, t_lin);
    write_artifact(ctx, "speedup.csv", csv_header(ctx) + lhz::speedup_to_csv(report));
    std::fprintf(stderr, "average speed-up %.3f over %d groups\n", report.average_factor,
                 report.groups_counted);
}

void cmd_library(const StageContext& ctx) {
    const auto parsed = parse_manifest(ctx, "spectra.jsonl", "spectra", true);
    std::vector<lhz::LogicalInstance> stream;
    for (const auto& m : parsed.retained.members) {
        if (static_cast<int>(stream.size()) >= ctx.config.library_stream_size) break;
        stream.push_back(m.logical);
    }
    if (stream.empty()) {
        throw ValidationError("spectra.jsonl retained no instances to stream");
    }

    lhz::LibraryConfig lib_cfg;
    lib_cfg.f_minus = ctx.config.f_minus;
    lib_cfg.f_plus = ctx.config.f_plus;
    lib_cfg.saturation_window = ctx.config.saturation_window;
    lib_cfg.stream_seed = ctx.config.seed;
    lib_cfg.constraint_strength = ctx.config.constraint_strength;
    lib_cfg.best_match_first = ctx.config.best_match_first;

    std::fprintf(stderr, "growing library over %zu instances\n", stream.size());
    const auto lib =
        lhz::build_library(stream, lib_cfg, stage_dcrab(ctx.config, kLibraryStream));

    nlohmann::json lib_json = lhz::library_to_json(lib);
    lib_json["config_hash"] = config_hash(ctx.config);
    write_artifact(ctx, "library.json", lib_json.dump(2) + "\n");

    std::string growth = csv_header(ctx) +
                         "instance_index,instance_id,matched_entry,fidelity,grew,hard,library_size\n";
    for (std::size_t i = 0; i < lib.growth_log.size(); ++i) {
        const auto& e = lib.growth_log[i];
        char row[192];
        std::snprintf(row, sizeof row, "%zu,%s,%d,%.10f,%d,%d,%d\n", i, e.instance_id.c_str(),
                      e.matched_entry, e.fidelity, e.grew ? 1 : 0, e.hard ? 1 : 0, e.library_size);
        growth += row;
    }
    write_artifact(ctx, "library_growth.csv", growth);
    std::fprintf(stderr, "library size %zu, saturated: %s\n", lib.entries.size(),
                 lib.saturated ? "yes" : "no");
}

}  // namespace lhztool
