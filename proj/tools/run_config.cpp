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

#include "run_config.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lhztool {

lhz::RampMode RunConfig::ramp() const {
    if (ramp_mode == "decoupled") return lhz::RampMode::decoupled;
    if (ramp_mode == "nested") return lhz::RampMode::nested;
    throw std::invalid_argument("unknown ramp_mode " + ramp_mode);
}

lhz::BalanceMethod RunConfig::balance() const {
    if (balance_method == "greedy") return lhz::BalanceMethod::greedy;
    if (balance_method == "optimal") return lhz::BalanceMethod::optimal;
    throw std::invalid_argument("unknown balance_method " + balance_method);
}

std::vector<std::string> RunConfig::validate() const {
    std::vector<std::string> bad;
    const auto check = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };
    check(profile == "desk" || profile == "paper", "profile: must be desk or paper");
    check(n_logical >= 3 && n_logical <= 5,
          "n_logical: must be in [3, 5] (the spectrum scanner refuses dimensions past 2^12)");
    check(sample_size >= 1, "sample_size: must be positive");
    check(n_groups >= 1, "n_groups: must be positive");
    check(quota >= 2, "quota: must be at least 2");
    check(constraint_strength > 0.0, "constraint_strength: must be positive");
    check(ramp_mode == "decoupled" || ramp_mode == "nested",
          "ramp_mode: must be decoupled or nested");
    check(balance_method == "greedy" || balance_method == "optimal",
          "balance_method: must be greedy or optimal");
    check(m_points >= 33, "m_points: must be at least 33");
    check(target_fidelity > 0.0 && target_fidelity < 1.0, "target_fidelity: must be in (0, 1)");
    check(f_minus > 0.0 && f_minus < f_plus && f_plus < 1.0,
          "f_minus/f_plus: need 0 < f_minus < f_plus < 1");
    check(saturation_window >= 1, "saturation_window: must be positive");
    check(library_stream_size >= 1, "library_stream_size: must be positive");
    check(dcrab.n_superiterations >= 1, "dcrab.n_superiterations: must be positive");
    check(dcrab.n_frequencies_per_super >= 1, "dcrab.n_frequencies_per_super: must be positive");
    check(dcrab.inner_max_evaluations >= 1, "dcrab.inner_max_evaluations: must be positive");
    check(dcrab.simplex_initial_step > 0.0, "dcrab.simplex_initial_step: must be positive");
    check(dcrab.objective_subsample >= 0, "dcrab.objective_subsample: must be non-negative");
    check(dcrab.omega_min > 0.0 && dcrab.omega_min < dcrab.omega_max,
          "dcrab.omega_min/omega_max: need 0 < omega_min < omega_max");
    check(dcrab.t_initial > 0.0, "dcrab.t_initial: must be positive");
    check(dcrab.t_cap >= dcrab.t_initial, "dcrab.t_cap: must be at least t_initial");
    check(dcrab.escalation_factor > 1.0, "dcrab.escalation_factor: must exceed 1");
    check(dcrab.bisection_relative_width > 0.0 && dcrab.bisection_relative_width < 1.0,
          "dcrab.bisection_relative_width: must be in (0, 1)");
    check(dcrab.objective_step_rate > 0.0, "dcrab.objective_step_rate: must be positive");
    check(dcrab.validation_step_rate > 0.0, "dcrab.validation_step_rate: must be positive");
    check(dcrab.objective_min_steps >= 1, "dcrab.objective_min_steps: must be positive");
    check(dcrab.validation_min_steps >= 1, "dcrab.validation_min_steps: must be positive");
    check(dcrab.futility_threshold >= 0.0 && dcrab.futility_threshold < 1.0,
          "dcrab.futility_threshold: must be in [0, 1)");
    return bad;
}

RunConfig desk_profile() {
    RunConfig cfg;
    cfg.profile = "desk";
    cfg.dcrab.n_superiterations = 3;
    cfg.dcrab.n_frequencies_per_super = 1;
    cfg.dcrab.inner_max_evaluations = 30;
    cfg.dcrab.objective_subsample = 8;
    cfg.dcrab.objective_step_rate = 6.0;
    cfg.dcrab.objective_min_steps = 400;
    cfg.dcrab.validation_step_rate = 10.0;
    cfg.dcrab.validation_min_steps = 800;
    cfg.dcrab.futility_threshold = 0.5;
    cfg.dcrab.t_initial = 1.0;
    cfg.dcrab.t_cap = 400.0;
    return cfg;
}

RunConfig paper_profile() {
    RunConfig cfg;
    cfg.profile = "paper";
    cfg.sample_size = 40000;
    cfg.quota = 400;
    cfg.library_stream_size = 1000;
    cfg.dcrab = lhz::DcrabConfig{};
    return cfg;
}

RunConfig profile_by_name(const std::string& name) {
    if (name == "desk") return desk_profile();
    if (name == "paper") return paper_profile();
    throw std::invalid_argument("unknown profile " + name);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    return {{"profile", cfg.profile},
            {"n_logical", cfg.n_logical},
            {"sample_size", cfg.sample_size},
            {"n_groups", cfg.n_groups},
            {"quota", cfg.quota},
            {"constraint_strength", cfg.constraint_strength},
            {"ramp_mode", cfg.ramp_mode},
            {"balance_method", cfg.balance_method},
            {"m_points", cfg.m_points},
            {"target_fidelity", cfg.target_fidelity},
            {"f_minus", cfg.f_minus},
            {"f_plus", cfg.f_plus},
            {"saturation_window", cfg.saturation_window},
            {"library_stream_size", cfg.library_stream_size},
            {"best_match_first", cfg.best_match_first},
            {"seed", cfg.seed},
            {"dcrab",
             {{"n_superiterations", cfg.dcrab.n_superiterations},
              {"n_frequencies_per_super", cfg.dcrab.n_frequencies_per_super},
              {"inner_max_evaluations", cfg.dcrab.inner_max_evaluations},
              {"simplex_initial_step", cfg.dcrab.simplex_initial_step},
              {"objective_subsample", cfg.dcrab.objective_subsample},
              {"omega_min", cfg.dcrab.omega_min},
              {"omega_max", cfg.dcrab.omega_max},
              {"t_initial", cfg.dcrab.t_initial},
              {"t_cap", cfg.dcrab.t_cap},
              {"escalation_factor", cfg.dcrab.escalation_factor},
              {"bisection_relative_width", cfg.dcrab.bisection_relative_width},
              {"objective_step_rate", cfg.dcrab.objective_step_rate},
              {"validation_step_rate", cfg.dcrab.validation_step_rate},
              {"objective_min_steps", cfg.dcrab.objective_min_steps},
              {"validation_min_steps", cfg.dcrab.validation_min_steps},
              {"futility_threshold", cfg.dcrab.futility_threshold}}}};
}

RunConfig run_config_from_json(const nlohmann::json& j, std::vector<std::string>& unknown) {
    RunConfig cfg = profile_by_name(j.value("profile", std::string("desk")));

    static const std::set<std::string> known = {
        "profile",         "n_logical",         "sample_size",
        "n_groups",        "quota",             "constraint_strength",
        "ramp_mode",       "balance_method",    "m_points",
        "target_fidelity", "f_minus",           "f_plus",
        "saturation_window", "library_stream_size", "best_match_first",
        "seed",            "dcrab",             "config_hash"};
    static const std::set<std::string> known_dcrab = {
        "n_superiterations",  "n_frequencies_per_super", "inner_max_evaluations",
        "simplex_initial_step", "objective_subsample",   "omega_min",
        "omega_max",          "t_initial",               "t_cap",
        "escalation_factor",  "bisection_relative_width", "objective_step_rate",
        "validation_step_rate", "objective_min_steps",   "validation_min_steps",
        "futility_threshold"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) unknown.push_back(key);
    }

    cfg.n_logical = j.value("n_logical", cfg.n_logical);
    cfg.sample_size = j.value("sample_size", cfg.sample_size);
    cfg.n_groups = j.value("n_groups", cfg.n_groups);
    cfg.quota = j.value("quota", cfg.quota);
    cfg.constraint_strength = j.value("constraint_strength", cfg.constraint_strength);
    cfg.ramp_mode = j.value("ramp_mode", cfg.ramp_mode);
    cfg.balance_method = j.value("balance_method", cfg.balance_method);
    cfg.m_points = j.value("m_points", cfg.m_points);
    cfg.target_fidelity = j.value("target_fidelity", cfg.target_fidelity);
    cfg.f_minus = j.value("f_minus", cfg.f_minus);
    cfg.f_plus = j.value("f_plus", cfg.f_plus);
    cfg.saturation_window = j.value("saturation_window", cfg.saturation_window);
    cfg.library_stream_size = j.value("library_stream_size", cfg.library_stream_size);
    cfg.best_match_first = j.value("best_match_first", cfg.best_match_first);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("dcrab")) {
        const auto& d = j.at("dcrab");
        for (const auto& [key, value] : d.items()) {
            if (!known_dcrab.count(key)) unknown.push_back("dcrab." + key);
        }
        auto& c = cfg.dcrab;
        c.n_superiterations = d.value("n_superiterations", c.n_superiterations);
        c.n_frequencies_per_super = d.value("n_frequencies_per_super", c.n_frequencies_per_super);
        c.inner_max_evaluations = d.value("inner_max_evaluations", c.inner_max_evaluations);
        c.simplex_initial_step = d.value("simplex_initial_step", c.simplex_initial_step);
        c.objective_subsample = d.value("objective_subsample", c.objective_subsample);
        c.omega_min = d.value("omega_min", c.omega_min);
        c.omega_max = d.value("omega_max", c.omega_max);
        c.t_initial = d.value("t_initial", c.t_initial);
        c.t_cap = d.value("t_cap", c.t_cap);
        c.escalation_factor = d.value("escalation_factor", c.escalation_factor);
        c.bisection_relative_width =
            d.value("bisection_relative_width", c.bisection_relative_width);
        c.objective_step_rate = d.value("objective_step_rate", c.objective_step_rate);
        c.validation_step_rate = d.value("validation_step_rate", c.validation_step_rate);
        c.objective_min_steps = d.value("objective_min_steps", c.objective_min_steps);
        c.validation_min_steps = d.value("validation_min_steps", c.validation_min_steps);
        c.futility_threshold = d.value("futility_threshold", c.futility_threshold);
    }
    return cfg;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = run_config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lhztool
