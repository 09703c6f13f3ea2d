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

#ifndef LHZANNEAL_TOOLS_PIPELINE_HPP
#define LHZANNEAL_TOOLS_PIPELINE_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include "run_config.hpp"

namespace lhztool {

// Exit code 1: bad configuration or a refused overwrite.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit code 2: a required upstream artifact is absent.
struct MissingArtifactError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageContext {
    RunConfig config;
    std::filesystem::path out;
    bool overwrite = false;
};

// Stage entry points, one per CLI verb. Artifacts land in ctx.out; every
// file embeds the config hash and refuses to replace an existing version
// unless ctx.overwrite is set. Timestamps go only to the run_log.txt
// sidecar so reruns stay byte-identical.
void cmd_sample(const StageContext& ctx);
void cmd_spectra(const StageContext& ctx);
void cmd_group(const StageContext& ctx);
void cmd_optimize(const StageContext& ctx, int only_group);
void cmd_evaluate(const StageContext& ctx);
void cmd_speedup(const StageContext& ctx);
void cmd_library(const StageContext& ctx);

// Stored configuration of an existing run directory; throws
// MissingArtifactError when the directory has none.
RunConfig load_run_config(const std::filesystem::path& out);

}  // namespace lhztool

#endif  // LHZANNEAL_TOOLS_PIPELINE_HPP
