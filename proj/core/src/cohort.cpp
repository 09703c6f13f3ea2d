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

#include "lhz/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lhz/operators.hpp"
#include "lhz/parallel.hpp"
#include "lhz/rng.hpp"

namespace lhz {

std::vector<LogicalInstance> sample_instances(int count, int n_logical, std::uint64_t seed) {
    if (count < 1) {
        throw std::invalid_argument("sample_instances: count must be positive");
    }
    const int n_pairs = pair_count(n_logical);
    std::vector<LogicalInstance> out(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        auto eng = keyed_engine(seed, static_cast<std::uint64_t>(t));
        LogicalInstance inst;
        inst.n_logical = n_logical;
        inst.seed = seed;
        inst.couplings.resize(static_cast<std::size_t>(n_pairs));
        for (auto& j : inst.couplings) j = uniform_pm1(eng);
        char buf[48];
        std::snprintf(buf, sizeof buf, "s%llu-i%d", static_cast<unsigned long long>(seed), t);
        inst.id = buf;
        inst.validate();
        out[static_cast<std::size_t>(t)] = std::move(inst);
    }
    return out;
}

Cohort build_cohort(const std::vector<LogicalInstance>& instances, double constraint_strength,
                    std::uint64_t seed, const SpectrumOptions& options, RampMode ramp_mode) {
    Cohort cohort;
    cohort.seed = seed;
    cohort.members.resize(instances.size());
    const Schedule ramp = Schedule::linear(1.0, constraint_strength, ramp_mode);
    parallel_for(instances.size(), [&](std::size_t i) {
        const PhysicalInstance phys = map_logical_to_physical(instances[i], constraint_strength);
        const SpectrumTrace trace = instantaneous_spectrum(phys, ramp, options);
        cohort.members[i] = CohortMember{instances[i], gap_summary(trace)};
    });
    return cohort;
}

Cohort filter_instances(const Cohort& cohort, const FilterPolicy& policy) {
    if (!(policy.degeneracy_tolerance >= 0.0)) {
        throw std::invalid_argument("filter_instances: tolerance must be non-negative");
    }
    const std::unordered_set<std::string> hard(policy.hard_ids.begin(), policy.hard_ids.end());
    std::vector<std::string> reasons(cohort.members.size());
    parallel_for(cohort.members.size(), [&](std::size_t i) {
        const CohortMember& m = cohort.members[i];
        const PhysicalInstance phys =
            map_logical_to_physical(m.logical, policy.constraint_strength);
        const PassageGenerator gen(phys);
        const std::vector<double> diag = gen.final_diagonal();
        std::size_t argmin = 0;
        for (std::size_t b = 1; b < diag.size(); ++b) {
            if (diag[b] < diag[argmin]) argmin = b;
        }
        int near = 0;
        for (double d : diag) {
            if (d <= diag[argmin] + policy.degeneracy_tolerance) ++near;
        }
        if (near >= 2) {
            reasons[i] = "degenerate-final-ground";
            return;
        }
        std::vector<int> physical_config(static_cast<std::size_t>(phys.k_physical));
        for (int k = 0; k < phys.k_physical; ++k) {
            physical_config[static_cast<std::size_t>(k)] = ((argmin >> k) & 1u) != 0 ? -1 : 1;
        }
        std::vector<int> logical;
        if (!decode_configuration(physical_config, phys.n_logical, logical)) {
            reasons[i] = "constraint-violating-ground";
            return;
        }
        if (hard.count(m.logical.id) != 0) {
            reasons[i] = "t-cap";
        }
    });

    Cohort out;
    out.seed = cohort.seed;
    out.filter_log = cohort.filter_log;
    for (std::size_t i = 0; i < cohort.members.size(); ++i) {
        if (reasons[i].empty()) {
            out.members.push_back(cohort.members[i]);
        } else {
            out.filter_log.emplace_back(cohort.members[i].logical.id, reasons[i]);
        }
    }
    return out;
}

Cohort sort_by_gap(const Cohort& cohort) {
    Cohort out = cohort;
    std::sort(out.members.begin(), out.members.end(),
              [](const CohortMember& a, const CohortMember& b) {
                  if (a.gap.min_gap != b.gap.min_gap) return a.gap.min_gap < b.gap.min_gap;
                  return a.logical.id < b.logical.id;
              });
    return out;
}

namespace {

bool is_gap_sorted(const Cohort& cohort) {
    for (std::size_t i = 1; i < cohort.members.size(); ++i) {
        if (cohort.members[i - 1].gap.min_gap > cohort.members[i].gap.min_gap) return false;
    }
    return true;
}

std::vector<double> gap_vector(const Cohort& cohort) {
    std::vector<double> gaps;
    gaps.reserve(cohort.members.size());
    for (const auto& m : cohort.members) gaps.push_back(m.gap.min_gap);
    return gaps;
}

// Population standard deviation over [a,b) from prefix sums.
class RangeSigma {
  public:
    explicit RangeSigma(const std::vector<double>& x)
        : s1_(x.size() + 1, 0.0), s2_(x.size() + 1, 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            s1_[i + 1] = s1_[i] + x[i];
            s2_[i + 1] = s2_[i] + x[i] * x[i];
        }
    }
    double operator()(std::size_t a, std::size_t b) const {
        const double n = static_cast<double>(b - a);
        const double mean = (s1_[b] - s1_[a]) / n;
        const double var = (s2_[b] - s2_[a]) / n - mean * mean;
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }

  private:
    std::vector<double> s1_, s2_;
};

double max_sigma(const RangeSigma& sigma, const std::vector<std::size_t>& bounds) {
    double worst = 0.0;
    for (std::size_t g = 0; g + 1 < bounds.size(); ++g) {
        worst = std::max(worst, sigma(bounds[g], bounds[g + 1]));
    }
    return worst;
}

// Exact minimax-sigma contiguous partition into n_groups slices of at
// least q members each.
std::vector<std::size_t> optimal_bounds(const RangeSigma& sigma, std::size_t m,
                                        std::size_t n_groups, std::size_t q) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dp(n_groups + 1, std::vector<double>(m + 1, inf));
    std::vector<std::vector<std::size_t>> arg(n_groups + 1, std::vector<std::size_t>(m + 1, 0));
    dp[0][0] = 0.0;
    for (std::size_t g = 1; g <= n_groups; ++g) {
        for (std::size_t i = g * q; i + (n_groups - g) * q <= m; ++i) {
            for (std::size_t j = (g - 1) * q; j + q <= i; ++j) {
                if (dp[g - 1][j] == inf) continue;
                const double v = std::max(dp[g - 1][j], sigma(j, i));
                if (v < dp[g][i]) {
                    dp[g][i] = v;
                    arg[g][i] = j;
                }
            }
        }
    }
    std::vector<std::size_t> bounds(n_groups + 1);
    bounds[n_groups] = m;
    for (std::size_t g = n_groups; g > 0; --g) {
        bounds[g - 1] = arg[g][bounds[g]];
    }
    return bounds;
}

// Uniform-stride thinning of [begin, end) down to the quota; sigma and the
// gap interval are recomputed over the kept members.
void trim_range(GroupRange& range, const std::vector<double>& gaps, int quota,
                const char* who, std::size_t group_index) {
    const std::size_t n_g = range.end - range.begin;
    const auto q = static_cast<std::size_t>(quota);
    if (n_g < q) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: group %zu holds %zu members, below quota %d", who,
                      group_index, n_g, quota);
        throw std::invalid_argument(buf);
    }
    range.kept.clear();
    range.kept.reserve(q);
    for (std::size_t j = 0; j < q; ++j) {
        range.kept.push_back(range.begin + ((2 * j + 1) * n_g) / (2 * q));
    }
    double mean = 0.0;
    for (std::size_t i : range.kept) mean += gaps[i];
    mean /= static_cast<double>(q);
    double var = 0.0;
    for (std::size_t i : range.kept) {
        const double d = gaps[i] - mean;
        var += d * d;
    }
    range.sigma = std::sqrt(var / static_cast<double>(q));
    range.gap_min = gaps[range.kept.front()];
    range.gap_max = gaps[range.kept.back()];
}

}  // namespace

Grouping balance_groups(const Cohort& cohort, int n_groups, int quota, BalanceMethod method) {
    const std::size_t m = cohort.members.size();
    if (n_groups < 1 || quota < 1) {
        throw std::invalid_argument("balance_groups: n_groups and quota must be positive");
    }
    if (m < static_cast<std::size_t>(n_groups) * static_cast<std::size_t>(quota)) {
        throw std::invalid_argument("balance_groups: cohort smaller than n_groups * quota");
    }
    if (!is_gap_sorted(cohort)) {
        throw std::invalid_argument("balance_groups: cohort must be gap-sorted");
    }

    const std::vector<double> gaps = gap_vector(cohort);
    const RangeSigma sigma(gaps);
    const auto n_g = static_cast<std::size_t>(n_groups);

    std::vector<std::size_t> bounds(n_g + 1);
    for (std::size_t g = 0; g <= n_g; ++g) bounds[g] = (m * g) / n_g;
    const double equal_max = max_sigma(sigma, bounds);

    Grouping out;
    out.quota = quota;
    out.equal_count_max_sigma = equal_max;

    double current = equal_max;
    const auto q = static_cast<std::size_t>(quota);
    if (method == BalanceMethod::optimal) {
        bounds = optimal_bounds(sigma, m, n_g, q);
        current = max_sigma(sigma, bounds);
    } else {
        // Shift one member across a boundary whenever that strictly lowers
        // the worst sigma; sweep all boundaries until a full pass changes
        // nothing. No shift may drop a group below the trim quota.
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t b = 1; b < n_g; ++b) {
                double best_val = current;
                int best_dir = 0;
                if (bounds[b] - bounds[b - 1] >= q + 1) {
                    --bounds[b];
                    const double v = max_sigma(sigma, bounds);
                    ++bounds[b];
                    if (v < best_val) {
                        best_val = v;
                        best_dir = -1;
                    }
                }
                if (bounds[b + 1] - bounds[b] >= q + 1) {
                    ++bounds[b];
                    const double v = max_sigma(sigma, bounds);
                    --bounds[b];
                    if (v < best_val) {
                        best_val = v;
                        best_dir = +1;
                    }
                }
                if (best_dir != 0) {
                    if (best_dir < 0) {
                        --bounds[b];
                    } else {
                        ++bounds[b];
                    }
                    current = best_val;
                    changed = true;
                }
            }
            if (changed) ++out.balance_passes;
        }
    }
    out.balanced_max_sigma = current;
    if (current > equal_max) {
        throw std::logic_error("balance_groups: balancing increased the worst sigma");
    }

    for (std::size_t g = 0; g < n_g; ++g) {
        GroupRange range;
        range.begin = bounds[g];
        range.end = bounds[g + 1];
        trim_range(range, gaps, quota, "balance_groups", g);
        out.groups.push_back(std::move(range));
    }
    return out;
}

std::pair<Cohort, Cohort> split_train_test(const Cohort& sample, std::uint64_t seed) {
    const std::size_t m = sample.members.size();
    if (m < 2) {
        throw std::invalid_argument("split_train_test: need at least two members");
    }
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    auto eng = keyed_engine(seed, 0x73706c6974ULL);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::size_t j = i + uniform_index(eng, m - i);
        std::swap(idx[i], idx[j]);
    }
    const std::size_t n_train = (m + 1) / 2;
    Cohort train;
    Cohort test;
    train.seed = sample.seed;
    test.seed = sample.seed;
    train.filter_log = sample.filter_log;
    for (std::size_t i = 0; i < m; ++i) {
        (i < n_train ? train : test).members.push_back(sample.members[idx[i]]);
    }
    return {sort_by_gap(train), sort_by_gap(test)};
}

Grouping assign_test_groups(const Cohort& test, const Grouping& training, int quota) {
    if (quota < 1) {
        throw std::invalid_argument("assign_test_groups: quota must be positive");
    }
    if (training.groups.empty()) {
        throw std::invalid_argument("assign_test_groups: empty training grouping");
    }
    if (!is_gap_sorted(test)) {
        throw std::invalid_argument("assign_test_groups: cohort must be gap-sorted");
    }
    const std::vector<double> gaps = gap_vector(test);
    Grouping out;
    out.quota = quota;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < training.groups.size(); ++g) {
        const double lo = training.groups[g].gap_min;
        const double hi = training.groups[g].gap_max;
        while (pos < gaps.size() && gaps[pos] < lo) {
            out.unassigned.push_back(pos);
            ++pos;
        }
        GroupRange range;
        range.begin = pos;
        while (pos < gaps.size() && gaps[pos] <= hi) ++pos;
        range.end = pos;
        if (range.end - range.begin < static_cast<std::size_t>(quota)) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "assign_test_groups: test group %zu holds %zu members, below quota %d; "
                          "enlarge the sample",
                          g, range.end - range.begin, quota);
            throw std::runtime_error(buf);
        }
        trim_range(range, gaps, quota, "assign_test_groups", g);
        out.groups.push_back(std::move(range));
    }
    while (pos < gaps.size()) {
        out.unassigned.push_back(pos);
        ++pos;
    }
    return out;
}

GapHistogram gap_histogram(const Cohort& cohort, const Grouping& grouping, int bins) {
    if (bins < 1) {
        throw std::invalid_argument("gap_histogram: bins must be positive");
    }
    if (cohort.members.empty()) {
        throw std::invalid_argument("gap_histogram: empty cohort");
    }
    const std::vector<double> gaps = gap_vector(cohort);
    const auto [lo_it, hi_it] = std::minmax_element(gaps.begin(), gaps.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    GapHistogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int k = 0; k <= bins; ++k) {
        h.bin_edges[static_cast<std::size_t>(k)] = lo + width * k;
    }
    h.bin_edges.back() = hi;
    for (double g : gaps) {
        int k = width > 0.0 ? static_cast<int>((g - lo) / width) : 0;
        if (k >= bins) k = bins - 1;
        if (k < 0) k = 0;
        ++h.counts[static_cast<std::size_t>(k)];
    }
    for (const auto& range : grouping.groups) {
        h.group_intervals.emplace_back(range.gap_min, range.gap_max);
    }
    return h;
}

std::string histogram_to_csv(const GapHistogram& histogram) {
    std::string out = "bin_lo,bin_hi,count\n";
    char buf[128];
    for (std::size_t k = 0; k < histogram.counts.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", histogram.bin_edges[k],
                      histogram.bin_edges[k + 1], histogram.counts[k]);
        out += buf;
    }
    out += "group,gap_min,gap_max\n";
    for (std::size_t g = 0; g < histogram.group_intervals.size(); ++g) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", g, histogram.group_intervals[g].first,
                      histogram.group_intervals[g].second);
        out += buf;
    }
    return out;
}

std::vector<PhysicalInstance> group_instances(const Cohort& cohort, const Grouping& grouping,
                                              int group_index, double constraint_strength) {
    if (group_index < 0 || group_index >= static_cast<int>(grouping.groups.size())) {
        throw std::out_of_range("group_instances: group index out of range");
    }
    std::vector<PhysicalInstance> out;
    const GroupRange& range = grouping.groups[static_cast<std::size_t>(group_index)];
    out.reserve(range.kept.size());
    for (std::size_t i : range.kept) {
        out.push_back(map_logical_to_physical(cohort.members.at(i).logical, constraint_strength));
    }
    return out;
}

nlohmann::json member_manifest_json(const CohortMember& member, std::uint64_t seed, int group,
                                    const std::string& split, const std::string& discard_reason) {
    nlohmann::json j = instance_to_json(member.logical);
    j["seed"] = seed;
    j["min_gap"] = member.gap.min_gap;
    j["position"] = member.gap.position;
    j["local_minima_count"] = member.gap.local_minima_count;
    if (group >= 0) {
        j["group"] = group;
    } else {
        j["group"] = nullptr;
    }
    if (!split.empty()) j["split"] = split;
    if (!discard_reason.empty()) j["discard_reason"] = discard_reason;
    return j;
}

std::string cohort_manifest_jsonl(const Cohort& cohort, const Grouping* grouping,
                                  const std::string& split) {
    std::vector<int> group_of(cohort.members.size(), -1);
    if (grouping != nullptr) {
        for (std::size_t g = 0; g < grouping->groups.size(); ++g) {
            for (std::size_t i : grouping->groups[g].kept) {
                if (i < group_of.size()) group_of[i] = static_cast<int>(g);
            }
        }
    }
    std::unordered_map<std::string, std::string> reason_of;
    for (const auto& [id, reason] : cohort.filter_log) reason_of.emplace(id, reason);

    std::string out;
    for (std::size_t i = 0; i < cohort.members.size(); ++i) {
        const auto it = reason_of.find(cohort.members[i].logical.id);
        const std::string reason = it == reason_of.end() ? std::string() : it->second;
        out += member_manifest_json(cohort.members[i], cohort.seed, group_of[i], split, reason)
                   .dump();
        out += '\n';
    }
    return out;
}

}  // namespace lhz
