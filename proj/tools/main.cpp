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

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "pipeline.hpp"
#include "run_config.hpp"

namespace {

lhztool::RunConfig resolve_config(const std::string& config_path, const std::string& profile,
                                  bool profile_given, std::uint64_t seed, bool seed_given) {
    lhztool::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            throw lhztool::ValidationError("config file not found: " + config_path);
        }
        nlohmann::json j = nlohmann::json::parse(in);
        if (profile_given) j["profile"] = profile;
        std::vector<std::string> unknown;
        cfg = lhztool::run_config_from_json(j, unknown);
        if (!unknown.empty()) {
            std::string msg = "unknown config fields:";
            for (const auto& k : unknown) msg += "\n  - " + k;
            throw lhztool::ValidationError(msg);
        }
    } else {
        cfg = lhztool::profile_by_name(profile);
    }
    if (seed_given) cfg.seed = seed;

    const auto violations = cfg.validate();
    if (!violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw lhztool::ValidationError(msg);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Annealing-protocol discovery pipeline for parity-encoded spin glasses"};
    app.require_subcommand(1);

    std::string config_path;
    std::string profile = "desk";
    std::string out = "lhz-run";
    std::uint64_t seed = 0;
    bool overwrite = false;
    int only_group = -1;

    const auto config_opt =
        app.add_option("--config", config_path, "JSON configuration file");
    const auto profile_opt =
        app.add_option("--profile", profile, "configuration preset (desk or paper)")
            ->check(CLI::IsMember({"desk", "paper"}));
    const auto seed_opt = app.add_option("--seed", seed, "master seed override");
    app.add_option("--out", out, "run directory for artifacts")->capture_default_str();
    app.add_flag("--overwrite", overwrite, "replace existing artifacts");

    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"sample", "draw the instance sample and write the run configuration"},
        {"spectra", "filter the sample and scan every minimum spectral gap"},
        {"group", "split train/test and build gap-balanced groups"},
        {"optimize", "escalate annealing times and optimize group schedules"},
        {"evaluate", "per-instance and averaged fidelities on train and test"},
        {"speedup", "per-group and average optimized-vs-linear time factors"},
        {"library", "grow the reusable protocol library over the stream"},
    };
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        if (name == "optimize") {
            sub->add_option("--group", only_group, "optimize a single group index");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    const std::string verb = app.get_subcommands().front()->get_name();

    try {
        lhztool::StageContext ctx;
        ctx.out = out;
        ctx.overwrite = overwrite;
        const bool flags_given =
            config_opt->count() > 0 || profile_opt->count() > 0 || seed_opt->count() > 0;
        if (verb == "sample") {
            ctx.config = resolve_config(config_path, profile, profile_opt->count() > 0, seed,
                                        seed_opt->count() > 0);
        } else {
            ctx.config = lhztool::load_run_config(ctx.out);
            if (flags_given) {
                const auto flag_cfg = resolve_config(config_path, profile,
                                                     profile_opt->count() > 0, seed,
                                                     seed_opt->count() > 0);
                if (lhztool::config_hash(flag_cfg) != lhztool::config_hash(ctx.config)) {
                    throw lhztool::ValidationError(
                        "flags resolve to a different configuration than the one stored in " +
                        ctx.out.string() + "/run_config.json");
                }
            }
        }

        if (verb == "sample") lhztool::cmd_sample(ctx);
        else if (verb == "spectra") lhztool::cmd_spectra(ctx);
        else if (verb == "group") lhztool::cmd_group(ctx);
        else if (verb == "optimize") lhztool::cmd_optimize(ctx, only_group);
        else if (verb == "evaluate") lhztool::cmd_evaluate(ctx);
        else if (verb == "speedup") lhztool::cmd_speedup(ctx);
        else if (verb == "library") lhztool::cmd_library(ctx);
        return 0;
    } catch (const lhztool::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const lhztool::MissingArtifactError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
