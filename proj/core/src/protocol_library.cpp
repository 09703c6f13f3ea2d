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

#include "lhz/protocol_library.hpp"

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "lhz/parallel.hpp"
#include "lhz/rng.hpp"

namespace lhz {

void LibraryConfig::validate() const {
    if (!(0.0 < f_minus && f_minus < f_plus && f_plus < 1.0)) {
        throw std::invalid_argument("LibraryConfig: thresholds need 0 < f_minus < f_plus < 1");
    }
    if (saturation_window < 1) {
        throw std::invalid_argument("LibraryConfig: saturation window must be positive");
    }
    if (!(constraint_strength > 0.0)) {
        throw std::invalid_argument("LibraryConfig: constraint strength must be positive");
    }
}

namespace {

EvolveOptions match_options(const DcrabConfig& opt_cfg) {
    EvolveOptions o;
    o.step_rate = opt_cfg.validation_step_rate;
    o.min_steps = opt_cfg.validation_min_steps;
    return o;
}

}  // namespace

ProtocolLibrary build_library(const std::vector<LogicalInstance>& stream,
                              const LibraryConfig& cfg, const DcrabConfig& opt_cfg) {
    cfg.validate();
    opt_cfg.validate();
    if (stream.empty()) {
        throw std::invalid_argument("build_library: empty stream");
    }

    ProtocolLibrary lib;
    lib.config = cfg;
    const EvolveOptions opts = match_options(opt_cfg);

    for (std::size_t pos = 0; pos < stream.size(); ++pos) {
        const LogicalInstance& inst = stream[pos];
        const PhysicalInstance phys = map_logical_to_physical(inst, cfg.constraint_strength);

        GrowthEvent event;
        event.instance_id = inst.id;

        if (!lib.entries.empty()) {
            if (cfg.best_match_first) {
                std::vector<double> fids(lib.entries.size(), 0.0);
                parallel_for(lib.entries.size(), [&](std::size_t e) {
                    fids[e] = evolve(phys, lib.entries[e].protocol, opts).fidelity;
                });
                std::size_t best = 0;
                for (std::size_t e = 1; e < fids.size(); ++e) {
                    if (fids[e] > fids[best]) best = e;
                }
                if (fids[best] >= cfg.f_minus) {
                    event.matched_entry = static_cast<int>(best);
                    event.fidelity = fids[best];
                }
            } else {
                for (std::size_t e = 0; e < lib.entries.size(); ++e) {
                    const double f = evolve(phys, lib.entries[e].protocol, opts).fidelity;
                    if (f >= cfg.f_minus) {
                        event.matched_entry = static_cast<int>(e);
                        event.fidelity = f;
                        break;
                    }
                }
            }
        }

        if (event.matched_entry < 0) {
            DcrabConfig single = opt_cfg;
            single.target_fidelity = cfg.f_plus;
            single.seed = mix_key(opt_cfg.seed, static_cast<std::uint64_t>(pos));
            const EscalationResult esc = escalate_time({phys}, single);
            event.fidelity = esc.record.best_objective;
            if (esc.hard) {
                event.hard = true;
            } else {
                lib.entries.push_back(LibraryEntry{esc.record.best_schedule, inst.id});
                event.grew = true;
            }
        }
        event.library_size = static_cast<int>(lib.entries.size());
        lib.growth_log.push_back(std::move(event));
    }

    const auto window = static_cast<std::size_t>(cfg.saturation_window);
    if (lib.growth_log.size() >= window) {
        bool grew_recently = false;
        for (std::size_t i = lib.growth_log.size() - window; i < lib.growth_log.size(); ++i) {
            if (lib.growth_log[i].grew) grew_recently = true;
        }
        lib.saturated = !grew_recently;
    }
    return lib;
}

ClassifyResult classify_instance(const LogicalInstance& inst, const ProtocolLibrary& lib,
                                 double threshold, const EvolveOptions& options) {
    if (lib.entries.empty()) {
        throw std::invalid_argument("classify_instance: empty library");
    }
    const PhysicalInstance phys = map_logical_to_physical(inst, lib.config.constraint_strength);
    ClassifyResult res;
    res.fidelities.assign(lib.entries.size(), 0.0);
    parallel_for(lib.entries.size(), [&](std::size_t e) {
        res.fidelities[e] = evolve(phys, lib.entries[e].protocol, options).fidelity;
    });
    for (std::size_t e = 0; e < res.fidelities.size(); ++e) {
        if (res.fidelities[e] >= threshold) {
            res.matched_entry = static_cast<int>(e);
            break;
        }
    }
    return res;
}

nlohmann::json library_to_json(const ProtocolLibrary& lib) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : lib.entries) {
        entries.push_back({{"protocol", schedule_to_json(e.protocol)},
                           {"T", e.protocol.annealing_time()},
                           {"parent_id", e.parent_id}});
    }
    nlohmann::json log = nlohmann::json::array();
    for (const auto& ev : lib.growth_log) {
        nlohmann::json item = {{"instance_id", ev.instance_id},
                               {"fidelity", ev.fidelity},
                               {"grew", ev.grew},
                               {"hard", ev.hard},
                               {"library_size", ev.library_size}};
        if (ev.matched_entry >= 0) {
            item["matched_entry"] = ev.matched_entry;
        } else {
            item["matched_entry"] = nullptr;
        }
        log.push_back(std::move(item));
    }
    return {{"config",
             {{"f_minus", lib.config.f_minus},
              {"f_plus", lib.config.f_plus},
              {"saturation_window", lib.config.saturation_window},
              {"stream_seed", lib.config.stream_seed},
              {"constraint_strength", lib.config.constraint_strength},
              {"best_match_first", lib.config.best_match_first}}},
            {"entries", std::move(entries)},
            {"growth_log", std::move(log)},
            {"saturated", lib.saturated}};
}

ProtocolLibrary library_from_json(const nlohmann::json& j) {
    try {
        ProtocolLibrary lib;
        const auto& c = j.at("config");
        lib.config.f_minus = c.at("f_minus").get<double>();
        lib.config.f_plus = c.at("f_plus").get<double>();
        lib.config.saturation_window = c.at("saturation_window").get<int>();
        lib.config.stream_seed = c.at("stream_seed").get<std::uint64_t>();
        lib.config.constraint_strength = c.at("constraint_strength").get<double>();
        lib.config.best_match_first = c.at("best_match_first").get<bool>();
        lib.config.validate();
        for (const auto& e : j.at("entries")) {
            lib.entries.push_back(LibraryEntry{schedule_from_json(e.at("protocol")),
                                               e.at("parent_id").get<std::string>()});
        }
        for (const auto& g : j.at("growth_log")) {
            GrowthEvent ev;
            ev.instance_id = g.at("instance_id").get<std::string>();
            const auto& matched = g.at("matched_entry");
            ev.matched_entry = matched.is_null() ? -1 : matched.get<int>();
            ev.fidelity = g.at("fidelity").get<double>();
            ev.grew = g.at("grew").get<bool>();
            ev.hard = g.at("hard").get<bool>();
            ev.library_size = g.at("library_size").get<int>();
            lib.growth_log.push_back(std::move(ev));
        }
        lib.saturated = j.at("saturated").get<bool>();
        return lib;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("library_from_json: ") + e.what());
    }
}

}  // namespace lhz
