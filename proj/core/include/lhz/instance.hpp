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

#ifndef LHZ_INSTANCE_HPP
#define LHZ_INSTANCE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lhz {

// Index conventions
// -----------------
// Logical spins are indexed 0..N-1. Physical qubits carry the parity of one
// logical pair (i,j), i<j, and are numbered row-major over those pairs:
// (0,1)->0, (0,2)->1, ..., (0,N-1)->N-2, (1,2)->N-1, ...
// In any 2^K basis index b, bit k (least significant = qubit 0) encodes the
// z-eigenvalue of physical qubit k as z_k = +1 for bit 0 and z_k = -1 for
// bit 1.

int pair_count(int n_logical);
int pair_index(int n_logical, int i, int j);
std::pair<int, int> pair_from_index(int n_logical, int k);

// A fully connected Ising spin-glass instance on N logical spins with
// couplings J_ij in [-1,1].
struct LogicalInstance {
    int n_logical = 0;
    std::vector<double> couplings;  // row-major over pairs i<j, size N(N-1)/2
    std::uint64_t seed = 0;
    std::string id;

    double coupling(int i, int j) const;
    // Energy sum_{i<j} J_ij s_i s_j of a +-1 configuration.
    double energy(std::span<const int> config) const;
    // Throws std::invalid_argument if the shape or coupling range is wrong.
    void validate() const;
};

// A 3- or 4-qubit parity constraint. The product of z over the members is
// +1 for every encoded logical configuration.
struct Plaquette {
    std::vector<int> members;
};

// Parity-encoded image of a LogicalInstance: K = N(N-1)/2 physical qubits
// with local fields J_k and N_c = K-N+1 plaquette constraints of strength C.
struct PhysicalInstance {
    int k_physical = 0;
    int n_logical = 0;
    std::vector<double> fields;  // J_k, pair order as above
    std::vector<Plaquette> plaquettes;
    double constraint_strength = 2.0;
    std::string id;

    int constraint_count() const { return static_cast<int>(plaquettes.size()); }
};

// All plaquettes of the N-spin parity layout: N-2 three-body constraints on
// the first pair row and (N-2)(N-3)/2 four-body ones, N_c = K-N+1 in total.
// Requires n_logical >= 3.
std::vector<Plaquette> enumerate_plaquettes(int n_logical);

PhysicalInstance map_logical_to_physical(const LogicalInstance& inst, double constraint_strength);

// Physical +-1 configuration (s_i * s_j per pair) of a logical one.
std::vector<int> encode_configuration(std::span<const int> logical_config);

// Inverse of encode_configuration up to global spin flip; the returned
// logical configuration has s_0 = +1. Returns false if the physical
// configuration is not an encoding (some plaquette violated).
bool decode_configuration(std::span<const int> physical_config, int n_logical,
                          std::vector<int>& logical_out);

struct GroundSearchResult {
    double energy = 0.0;
    std::vector<std::vector<int>> configs;  // all minimizers, +-1 entries
};

// Exhaustive minimum of the logical energy over all 2^N configurations.
// Refuses n_logical > 20.
GroundSearchResult logical_ground_bruteforce(const LogicalInstance& inst);

// Instance file format: {"id", "n_logical", "seed", "couplings": [[i,j,J],...]}
// with 0-based i<j in row-major order.
nlohmann::json instance_to_json(const LogicalInstance& inst);
LogicalInstance instance_from_json(const nlohmann::json& j);

}  // namespace lhz

#endif  // LHZ_INSTANCE_HPP
