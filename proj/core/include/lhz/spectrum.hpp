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

#ifndef LHZ_SPECTRUM_HPP
#define LHZ_SPECTRUM_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

#include "lhz/operators.hpp"
#include "lhz/schedule.hpp"

namespace lhz {

// The L lowest instantaneous eigenvalues on a uniform tau grid. Levels are
// reported sorted per grid point, not adiabatically connected.
struct SpectrumTrace {
    std::vector<double> tau_grid;  // size M, 0 and 1 included
    Eigen::MatrixXd levels;        // M x L, each row ascending
    // Lowest-two eigenvectors per grid point, kept only on request.
    bool has_vectors = false;
    Eigen::MatrixXd ground_vectors;   // dim x M
    Eigen::MatrixXd excited_vectors;  // dim x M

    void validate() const;
};

struct GapSummary {
    double min_gap = 0.0;          // min over gap_trace
    double position = 0.0;         // tau* of the global minimum, refined
    int local_minima_count = 1;
    std::vector<double> gap_trace;  // levels[:,1] - levels[:,0]
};

enum class EigenSolver {
    automatic,  // Lanczos for 2-level scans at large dim, dense otherwise
    dense,
    lanczos,
};

struct SpectrumOptions {
    int m_points = 101;
    int l_levels = 2;
    EigenSolver solver = EigenSolver::automatic;
    bool keep_vectors = false;
};

// Eigenvalues of H(s(tau), c(tau)) on a uniform grid. The Lanczos path is
// warm-started from the previous grid point and falls back to the dense
// solver under the automatic policy; with solver=lanczos a non-converged
// point throws std::runtime_error naming the tau value. Dimensions above
// 2^12 and m_points < 33 are refused.
SpectrumTrace instantaneous_spectrum(const PhysicalInstance& phys, const Schedule& schedule,
                                     const SpectrumOptions& options = {});

// Minimum-gap statistics of a trace. The global minimum takes the leftmost
// grid point on ties and its position is refined by a parabola through the
// three surrounding points; local minima are counted on plateau runs wider
// than `plateau_tol`, and a boundary minimum is counted only when it is the
// global one.
GapSummary gap_summary(const SpectrumTrace& trace, double plateau_tol = 1e-10);

// Adiabatic-condition estimate max_tau |<m|dH/dtau|n>| / gap(tau)^2 with
// the derivative taken analytically from the schedule. Requires a trace
// with vectors kept; returns +infinity if the gap drops below 1e-12.
double adiabatic_time_bound(const PhysicalInstance& phys, const Schedule& schedule,
                            const SpectrumTrace& trace);

// Columns tau, level_0..level_{L-1}, full double precision.
std::string spectrum_to_csv(const SpectrumTrace& trace);
nlohmann::json gap_summary_to_json(const GapSummary& summary);

}  // namespace lhz

#endif  // LHZ_SPECTRUM_HPP
