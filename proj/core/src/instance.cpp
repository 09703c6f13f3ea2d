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

#include "lhz/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lhz {

int pair_count(int n_logical) {
    return n_logical * (n_logical - 1) / 2;
}

int pair_index(int n_logical, int i, int j) {
    if (i < 0 || j <= i || j >= n_logical) {
        throw std::out_of_range("pair_index: need 0 <= i < j < n_logical");
    }
    // Rows before i contribute (N-1) + (N-2) + ... + (N-i) entries.
    return i * (2 * n_logical - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_from_index(int n_logical, int k) {
    if (k < 0 || k >= pair_count(n_logical)) {
        throw std::out_of_range("pair_from_index: index outside pair range");
    }
    int i = 0;
    int row = n_logical - 1;
    while (k >= row) {
        k -= row;
        --row;
        ++i;
    }
    return {i, i + 1 + k};
}

double LogicalInstance::coupling(int i, int j) const {
    if (i > j) std::swap(i, j);
    return couplings[static_cast<std::size_t>(pair_index(n_logical, i, j))];
}

double LogicalInstance::energy(std::span<const int> config) const {
    if (static_cast<int>(config.size()) != n_logical) {
        throw std::invalid_argument("energy: configuration size mismatch");
    }
    double e = 0.0;
    std::size_t k = 0;
    for (int i = 0; i < n_logical; ++i) {
        for (int j = i + 1; j < n_logical; ++j, ++k) {
            e += couplings[k] * config[static_cast<std::size_t>(i)] * config[static_cast<std::size_t>(j)];
        }
    }
    return e;
}

void LogicalInstance::validate() const {
    if (n_logical < 2) {
        throw std::invalid_argument("LogicalInstance: need at least two spins");
    }
    if (couplings.size() != static_cast<std::size_t>(pair_count(n_logical))) {
        throw std::invalid_argument("LogicalInstance: coupling vector has wrong size");
    }
    for (double j : couplings) {
        if (!std::isfinite(j) || j < -1.0 || j > 1.0) {
            throw std::invalid_argument("LogicalInstance: coupling outside [-1, 1]");
        }
    }
}

std::vector<Plaquette> enumerate_plaquettes(int n_logical) {
    if (n_logical < 3) {
        throw std::invalid_argument("enumerate_plaquettes: need at least three logical spins");
    }
    const int n = n_logical;
    std::vector<Plaquette> out;
    out.reserve(static_cast<std::size_t>(pair_count(n) - n + 1));
    // Three-body constraints close the triangles (i, i+1, i+2) at the layout
    // boundary.
    for (int i = 0; i + 2 < n; ++i) {
        out.push_back({{pair_index(n, i, i + 1), pair_index(n, i, i + 2),
                        pair_index(n, i + 1, i + 2)}});
    }
    // Four-body constraints tile the remaining interior cells.
    for (int i = 0; i + 2 < n; ++i) {
        for (int j = i + 2; j + 1 < n; ++j) {
            out.push_back({{pair_index(n, i, j), pair_index(n, i, j + 1),
                            pair_index(n, i + 1, j), pair_index(n, i + 1, j + 1)}});
        }
    }
    return out;
}

PhysicalInstance map_logical_to_physical(const LogicalInstance& inst, double constraint_strength) {
    inst.validate();
    if (inst.n_logical < 3) {
        throw std::invalid_argument("map_logical_to_physical: need at least three logical spins");
    }
    if (!std::isfinite(constraint_strength) || constraint_strength <= 0.0) {
        throw std::invalid_argument("map_logical_to_physical: constraint strength must be positive");
    }
    PhysicalInstance phys;
    phys.n_logical = inst.n_logical;
    phys.k_physical = pair_count(inst.n_logical);
    phys.fields = inst.couplings;
    phys.plaquettes = enumerate_plaquettes(inst.n_logical);
    phys.constraint_strength = constraint_strength;
    phys.id = inst.id;
    return phys;
}

std::vector<int> encode_configuration(std::span<const int> logical_config) {
    const int n = static_cast<int>(logical_config.size());
    std::vector<int> phys(static_cast<std::size_t>(pair_count(n)));
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++k) {
            phys[k] = logical_config[static_cast<std::size_t>(i)] * logical_config[static_cast<std::size_t>(j)];
        }
    }
    return phys;
}

bool decode_configuration(std::span<const int> physical_config, int n_logical,
                          std::vector<int>& logical_out) {
    if (static_cast<int>(physical_config.size()) != pair_count(n_logical)) {
        throw std::invalid_argument("decode_configuration: physical size mismatch");
    }
    logical_out.assign(static_cast<std::size_t>(n_logical), 1);
    // First pair row fixes every spin relative to s_0 = +1.
    for (int j = 1; j < n_logical; ++j) {
        logical_out[static_cast<std::size_t>(j)] =
            physical_config[static_cast<std::size_t>(pair_index(n_logical, 0, j))];
    }
    const std::vector<int> re = encode_configuration(logical_out);
    return std::equal(re.begin(), re.end(), physical_config.begin());
}

GroundSearchResult logical_ground_bruteforce(const LogicalInstance& inst) {
    inst.validate();
    if (inst.n_logical > 20) {
        throw std::invalid_argument("logical_ground_bruteforce: exhaustive search capped at 20 spins");
    }
    const int n = inst.n_logical;
    GroundSearchResult res;
    res.energy = std::numeric_limits<double>::infinity();
    std::vector<int> config(static_cast<std::size_t>(n));
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t b = 0; b < total; ++b) {
        for (int i = 0; i < n; ++i) {
            config[static_cast<std::size_t>(i)] = (b >> i) & 1 ? -1 : 1;
        }
        const double e = inst.energy(config);
        if (e < res.energy - 1e-12) {
            res.energy = e;
            res.configs.clear();
            res.configs.push_back(config);
        } else if (e <= res.energy + 1e-12) {
            res.configs.push_back(config);
        }
    }
    return res;
}

nlohmann::json instance_to_json(const LogicalInstance& inst) {
    nlohmann::json couplings = nlohmann::json::array();
    std::size_t k = 0;
    for (int i = 0; i < inst.n_logical; ++i) {
        for (int j = i + 1; j < inst.n_logical; ++j, ++k) {
            couplings.push_back({i, j, inst.couplings[k]});
        }
    }
    return {{"id", inst.id},
            {"n_logical", inst.n_logical},
            {"seed", inst.seed},
            {"couplings", std::move(couplings)}};
}

LogicalInstance instance_from_json(const nlohmann::json& j) {
    LogicalInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.n_logical = j.at("n_logical").get<int>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    if (inst.n_logical < 2) {
        throw std::invalid_argument("instance_from_json: need at least two spins");
    }
    inst.couplings.assign(static_cast<std::size_t>(pair_count(inst.n_logical)), 0.0);
    std::vector<bool> seen(inst.couplings.size(), false);
    for (const auto& entry : j.at("couplings")) {
        if (!entry.is_array() || entry.size() != 3) {
            throw std::invalid_argument("instance_from_json: coupling entry must be [i, j, value]");
        }
        const int i = entry[0].get<int>();
        const int jj = entry[1].get<int>();
        const std::size_t k = static_cast<std::size_t>(pair_index(inst.n_logical, i, jj));
        if (seen[k]) {
            throw std::invalid_argument("instance_from_json: duplicate coupling entry");
        }
        seen[k] = true;
        inst.couplings[k] = entry[2].get<double>();
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
        throw std::invalid_argument("instance_from_json: missing coupling entry");
    }
    inst.validate();
    return inst;
}

}  // namespace lhz
