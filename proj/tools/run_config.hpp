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

#ifndef LHZANNEAL_TOOLS_RUN_CONFIG_HPP
#define LHZANNEAL_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lhz/cohort.hpp"
#include "lhz/optimize.hpp"
#include "lhz/schedule.hpp"

namespace lhztool {

// Resolved pipeline configuration. Every stage artifact embeds
// config_hash(*this) so mixed-config pipelines are rejected instead of
// producing quietly inconsistent results.
struct RunConfig {
    std::string profile = "desk";
    int n_logical = 5;
    int sample_size = 4000;
    int n_groups = 6;
    int quota = 50;
    double constraint_strength = 2.0;
    std::string ramp_mode = "decoupled";
    std::string balance_method = "greedy";
    int m_points = 101;
    double target_fidelity = 0.9;

    // Protocol-library stage.
    double f_minus = 0.66;
    double f_plus = 0.9;
    int saturation_window = 50;
    int library_stream_size = 300;
    bool best_match_first = false;

    std::uint64_t seed = 1;
    // Template for per-stage optimizer settings; the seed field is ignored
    // and replaced by a (seed, stage) derived key.
    lhz::DcrabConfig dcrab;

    lhz::RampMode ramp() const;
    lhz::BalanceMethod balance() const;

    // Empty when the configuration is usable; otherwise one message per
    // violated field.
    std::vector<std::string> validate() const;
};

RunConfig desk_profile();
RunConfig paper_profile();
RunConfig profile_by_name(const std::string& name);

nlohmann::json run_config_to_json(const RunConfig& cfg);

// Starts from the preset named by the "profile" field (desk when absent)
// and applies every present field on top. Unknown keys are collected into
// `unknown` so the caller can reject them with a full list.
RunConfig run_config_from_json(const nlohmann::json& j, std::vector<std::string>& unknown);

// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace lhztool

#endif  // LHZANNEAL_TOOLS_RUN_CONFIG_HPP
