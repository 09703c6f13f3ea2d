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

#ifndef LHZ_COHORT_HPP
#define LHZ_COHORT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lhz/instance.hpp"
#include "lhz/schedule.hpp"
#include "lhz/spectrum.hpp"

namespace lhz {

struct CohortMember {
    LogicalInstance logical;
    GapSummary gap;
};

// A sample of instances with their gap statistics. filter_log records every
// discarded instance as an (id, reason) pair.
struct Cohort {
    std::vector<CohortMember> members;
    std::vector<std::pair<std::string, std::string>> filter_log;
    std::uint64_t seed = 0;
};

// One contiguous slice [begin, end) of a gap-sorted cohort. kept lists the
// member indices surviving the quota trim; sigma and the gap interval are
// taken over the kept members.
struct GroupRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<std::size_t> kept;
    double sigma = 0.0;
    double gap_min = 0.0;
    double gap_max = 0.0;
};

struct Grouping {
    std::vector<GroupRange> groups;
    int quota = 0;
    int balance_passes = 0;
    // max_i sigma_i of the equal-count initialization and after balancing,
    // both over untrimmed groups. Interval-assigned test groupings leave
    // these zero.
    double equal_count_max_sigma = 0.0;
    double balanced_max_sigma = 0.0;
    // Member indices falling between adjacent group intervals during test
    // assignment; always empty for trained groupings.
    std::vector<std::size_t> unassigned;
};

// Couplings i.i.d. uniform on [-1,1] from an mt19937_64 keyed by
// (seed, instance index); ids are "s<seed>-i<index>".
std::vector<LogicalInstance> sample_instances(int count, int n_logical, std::uint64_t seed);

// Maps every instance at the given constraint strength, scans the spectrum
// along the plain linear passage, and stores the gap summary. Member order
// follows the input.
Cohort build_cohort(const std::vector<LogicalInstance>& instances, double constraint_strength,
                    std::uint64_t seed, const SpectrumOptions& options = {},
                    RampMode ramp_mode = RampMode::decoupled);

struct FilterPolicy {
    double constraint_strength = 2.0;
    double degeneracy_tolerance = 1e-9;
    // Instance ids flagged hard by time escalation; discarded as "t-cap".
    std::vector<std::string> hard_ids;
};

// Drops members whose end-of-sweep ground space is degenerate within the
// tolerance ("degenerate-final-ground"), whose ground configuration is not
// an encoding of any logical state ("constraint-violating-ground"), or
// whose id is listed in policy.hard_ids ("t-cap"). Every discard is
// appended to the returned cohort's filter_log.
Cohort filter_instances(const Cohort& cohort, const FilterPolicy& policy = {});

// Ascending min gap, ties broken by id.
Cohort sort_by_gap(const Cohort& cohort);

enum class BalanceMethod {
    greedy,   // equal-count start plus boundary shifts to a fixed point
    optimal,  // exact contiguous minimax-sigma partition via DP
};

// Contiguous gap-balanced partition of a sorted cohort into n_groups
// slices, each trimmed to the quota by a uniform stride over its members.
// Boundary moves never drop a slice below the quota. Throws
// std::invalid_argument on an unsorted or too-small cohort.
Grouping balance_groups(const Cohort& cohort, int n_groups, int quota,
                        BalanceMethod method = BalanceMethod::greedy);

// Disjoint random halves of a cohort via a seeded shuffle; both halves come
// back gap-sorted. The filter log stays with the training half.
std::pair<Cohort, Cohort> split_train_test(const Cohort& sample, std::uint64_t seed);

// Assigns gap-sorted test members to the training groups' gap intervals and
// trims each test group to the quota. Members between adjacent intervals
// are recorded as unassigned. An under-quota or empty test group throws
// std::runtime_error asking for a larger sample.
Grouping assign_test_groups(const Cohort& test, const Grouping& training, int quota);

struct GapHistogram {
    std::vector<double> bin_edges;  // size bins+1, spans [min gap, max gap]
    std::vector<int> counts;        // size bins
    std::vector<std::pair<double, double>> group_intervals;
};

GapHistogram gap_histogram(const Cohort& cohort, const Grouping& grouping, int bins = 40);

// Two sections: bin_lo,bin_hi,count rows, then group,gap_min,gap_max rows.
std::string histogram_to_csv(const GapHistogram& histogram);

// Physical images of one group's kept members at the given constraint
// strength, in kept order.
std::vector<PhysicalInstance> group_instances(const Cohort& cohort, const Grouping& grouping,
                                              int group_index, double constraint_strength);

// One manifest line: {id, seed, couplings, min_gap, position,
// local_minima_count, group, split, discard_reason?}. group < 0 emits null;
// empty split or reason strings omit the field.
nlohmann::json member_manifest_json(const CohortMember& member, std::uint64_t seed, int group,
                                    const std::string& split, const std::string& discard_reason);

// JSON-lines manifest of every member, newline-terminated. Group indices
// come from the grouping's kept lists (null when absent or untrimmed);
// members named in cohort.filter_log carry their discard reason.
std::string cohort_manifest_jsonl(const Cohort& cohort, const Grouping* grouping,
                                  const std::string& split);

}  // namespace lhz

#endif  // LHZ_COHORT_HPP
