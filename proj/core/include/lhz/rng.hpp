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

#ifndef LHZ_RNG_HPP
#define LHZ_RNG_HPP

#include <cstdint>
#include <random>

namespace lhz {

// Seeding convention used throughout the project.
//
// All randomness is drawn from std::mt19937_64 engines whose state is derived
// from a (seed, stream index) pair via splitmix64 mixing, and uniform doubles
// are produced from the top 53 bits of the raw engine output. This avoids
// std::uniform_real_distribution, whose output is not pinned down by the
// standard, so identical seeds give identical samples on every platform.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mixes a base seed and a stream index into one 64-bit key.
inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ index;
    std::uint64_t b = splitmix64(s);
    return b;
}

inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(mix_key(seed, index));
}

// Uniform on [0,1) with exactly 53 random mantissa bits.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform on [-1,1).
inline double uniform_pm1(std::mt19937_64& eng) {
    return 2.0 * uniform01(eng) - 1.0;
}

// Uniform on [lo,hi).
inline double uniform_range(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

// Uniform integer on [0,n) for n >= 1, derived from the same 53-bit stream.
inline std::size_t uniform_index(std::mt19937_64& eng, std::size_t n) {
    const auto k = static_cast<std::size_t>(uniform01(eng) * static_cast<double>(n));
    return k < n ? k : n - 1;
}

}  // namespace lhz

#endif  // LHZ_RNG_HPP
