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

#ifndef LHZ_PROTOCOL_LIBRARY_HPP
#define LHZ_PROTOCOL_LIBRARY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lhz/dynamics.hpp"
#include "lhz/instance.hpp"
#include "lhz/optimize.hpp"
#include "lhz/schedule.hpp"

namespace lhz {

struct LibraryConfig {
    double f_minus = 0.66;  // reuse threshold
    double f_plus = 0.9;    // threshold a fresh optimization must reach
    int saturation_window = 50;
    std::uint64_t stream_seed = 0;  // provenance of the instance stream
    double constraint_strength = 2.0;
    // false: try entries oldest-first and stop at the first one clearing
    // f_minus; true: evaluate all entries and take the best match.
    bool best_match_first = false;

    void validate() const;  // throws std::invalid_argument
};

struct LibraryEntry {
    Schedule protocol;  // carries its annealing time
    std::string parent_id;
};

// Decision taken for one consumed stream instance.
struct GrowthEvent {
    std::string instance_id;
    int matched_entry = -1;  // -1: no entry cleared f_minus
    // Fidelity under the decisive protocol: the matched entry, or the newly
    // optimized one, or the best cap attempt for a hard skip.
    double fidelity = 0.0;
    bool grew = false;
    bool hard = false;  // skipped: escalation hit the time cap
    int library_size = 0;  // size after this instance
};

struct ProtocolLibrary {
    LibraryConfig config;
    std::vector<LibraryEntry> entries;
    std::vector<GrowthEvent> growth_log;
    bool saturated = false;
};

// Greedy library growth over an instance stream: the first instance (and
// every later one that no entry serves with fidelity >= f_minus) gets a
// fresh single-instance optimization escalated until it clears f_plus, and
// the result is appended. Hard instances (time cap) are logged and skipped
// without growth. Per-instance optimizer seeds are derived from
// (opt_cfg.seed, stream position). saturated reports whether the final
// saturation_window instances added no entry.
ProtocolLibrary build_library(const std::vector<LogicalInstance>& stream,
                              const LibraryConfig& cfg, const DcrabConfig& opt_cfg);

struct ClassifyResult {
    int matched_entry = -1;          // first entry meeting the threshold
    std::vector<double> fidelities;  // fidelity under every entry, in order
};

// Evolves the instance under every library protocol and reports the first
// entry whose fidelity reaches the threshold; no match leaves -1.
ClassifyResult classify_instance(const LogicalInstance& inst, const ProtocolLibrary& lib,
                                 double threshold, const EvolveOptions& options = {});

nlohmann::json library_to_json(const ProtocolLibrary& lib);
ProtocolLibrary library_from_json(const nlohmann::json& j);

}  // namespace lhz

#endif  // LHZ_PROTOCOL_LIBRARY_HPP
