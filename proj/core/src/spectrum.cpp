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

#include "lhz/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lhz {

namespace {

constexpr int kMaxQubits = 12;  // desk-scale guard, dim <= 2^12

Eigen::MatrixXd dense_passage(const PassageGenerator& gen, double a_x, double a_j, double a_c) {
    const std::int64_t dim = gen.dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const auto& dj = gen.problem_diagonal();
    const auto& dc = gen.constraint_diagonal();
    for (std::int64_t r = 0; r < dim; ++r) {
        h(r, r) = a_j * dj[static_cast<std::size_t>(r)] + a_c * dc[static_cast<std::size_t>(r)];
        for (int k = 0; k < gen.qubits(); ++k) {
            h(r, r ^ (std::int64_t{1} << k)) = -a_x;
        }
    }
    return h;
}

struct LanczosOutcome {
    bool converged = false;
    Eigen::VectorXd values;   // nev ascending
    Eigen::MatrixXd vectors;  // dim x nev
};

// Lanczos with full reorthogonalization for the nev lowest eigenpairs.
// Convergence is declared when the Ritz values stagnate between checks and
// the residual norms |beta * s_last| are small relative to the operator
// norm bound.
LanczosOutcome lanczos_lowest(const PassageGenerator& gen, double a_x, double a_j, double a_c,
                              int nev, const Eigen::VectorXd& start) {
    const std::int64_t dim = gen.dim();
    const int max_iter = static_cast<int>(std::min<std::int64_t>(dim, 160));
    const double scale = std::max(1.0, gen.norm_estimate());

    std::vector<Eigen::VectorXd> v;
    v.reserve(static_cast<std::size_t>(max_iter) + 1);
    std::vector<double> alpha;
    std::vector<double> beta;

    Eigen::VectorXd v0 = start;
    double n0 = v0.norm();
    if (!(n0 > 0.0) || !std::isfinite(n0)) {
        v0 = Eigen::VectorXd::Ones(dim);
        n0 = v0.norm();
    }
    v.push_back(v0 / n0);

    Eigen::VectorXd w(dim);
    Eigen::VectorXd prev_ritz = Eigen::VectorXd::Constant(nev, std::numeric_limits<double>::max());
    LanczosOutcome out;

    for (int j = 0; j < max_iter; ++j) {
        gen.apply_general_real(a_x, a_j, a_c, v[static_cast<std::size_t>(j)].data(), w.data());
        const double a = w.dot(v[static_cast<std::size_t>(j)]);
        alpha.push_back(a);
        w -= a * v[static_cast<std::size_t>(j)];
        if (j > 0) w -= beta[static_cast<std::size_t>(j) - 1] * v[static_cast<std::size_t>(j) - 1];
        for (const auto& vi : v) {
            w -= w.dot(vi) * vi;
        }
        const double nb = w.norm();
        beta.push_back(nb);

        const bool breakdown = nb < 1e-12 * scale;
        if (static_cast<int>(alpha.size()) >= std::max(2 * nev, 8) && (j % 4 == 3 || breakdown || j == max_iter - 1)) {
            const int m = static_cast<int>(alpha.size());
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                t(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < m) {
                    t(i, i + 1) = beta[static_cast<std::size_t>(i)];
                    t(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            bool settled = true;
            for (int e = 0; e < nev; ++e) {
                if (std::abs(es.eigenvalues()(e) - prev_ritz(e)) > 1e-12 * scale) settled = false;
                prev_ritz(e) = es.eigenvalues()(e);
            }
            bool small_residual = true;
            for (int e = 0; e < nev; ++e) {
                if (nb * std::abs(es.eigenvectors()(m - 1, e)) > 1e-10 * scale) small_residual = false;
            }
            if ((settled && small_residual) || breakdown) {
                out.converged = true;
                out.values = es.eigenvalues().head(nev);
                out.vectors = Eigen::MatrixXd::Zero(dim, nev);
                for (int e = 0; e < nev; ++e) {
                    for (int i = 0; i < m; ++i) {
                        out.vectors.col(e) += es.eigenvectors()(i, e) * v[static_cast<std::size_t>(i)];
                    }
                    out.vectors.col(e).normalize();
                }
                return out;
            }
        }

        if (breakdown) {
            // Invariant subspace hit before convergence; continue in a
            // fresh direction orthogonal to the basis so far.
            std::uint64_t state = 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(j);
            for (std::int64_t b = 0; b < dim; ++b) {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                w(b) = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
            }
            for (const auto& vi : v) {
                w -= w.dot(vi) * vi;
            }
            const double nw = w.norm();
            if (nw < 1e-14) break;
            v.push_back(w / nw);
            beta.back() = 0.0;
        } else {
            v.push_back(w / nb);
        }
    }
    return out;
}

}  // namespace

void SpectrumTrace::validate() const {
    const auto m = static_cast<Eigen::Index>(tau_grid.size());
    if (m < 3) {
        throw std::invalid_argument("SpectrumTrace: need at least three grid points");
    }
    if (levels.rows() != m || levels.cols() < 2) {
        throw std::invalid_argument("SpectrumTrace: level matrix shape mismatch");
    }
    if (tau_grid.front() != 0.0 || tau_grid.back() != 1.0) {
        throw std::invalid_argument("SpectrumTrace: grid must span [0, 1]");
    }
    for (std::size_t i = 1; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] > tau_grid[i - 1])) {
            throw std::invalid_argument("SpectrumTrace: grid must be strictly increasing");
        }
    }
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 1; c < levels.cols(); ++c) {
            if (!(levels(r, c) >= levels(r, c - 1))) {
                throw std::invalid_argument("SpectrumTrace: levels must be ascending per row");
            }
        }
    }
    if (has_vectors && (ground_vectors.cols() != m || excited_vectors.cols() != m)) {
        throw std::invalid_argument("SpectrumTrace: vector storage shape mismatch");
    }
}

SpectrumTrace instantaneous_spectrum(const PhysicalInstance& phys, const Schedule& schedule,
                                     const SpectrumOptions& options) {
    if (options.m_points < 33) {
        throw std::invalid_argument("instantaneous_spectrum: need at least 33 grid points");
    }
    if (options.l_levels < 2) {
        throw std::invalid_argument("instantaneous_spectrum: need at least two levels");
    }
    if (phys.k_physical > kMaxQubits) {
        throw std::invalid_argument("instantaneous_spectrum: dimension guard exceeded (K > 12)");
    }
    const PassageGenerator gen(phys);
    const std::int64_t dim = gen.dim();
    if (options.l_levels > dim) {
        throw std::invalid_argument("instantaneous_spectrum: more levels than dimensions");
    }

    EigenSolver solver = options.solver;
    if (solver == EigenSolver::automatic) {
        // Lanczos only earns its keep on gap scans over large spaces; it
        // also cannot resolve degenerate multiplets beyond the gap pair.
        solver = (options.l_levels == 2 && dim >= 512) ? EigenSolver::lanczos : EigenSolver::dense;
    }

    const int m_points = options.m_points;
    SpectrumTrace trace;
    trace.tau_grid.resize(static_cast<std::size_t>(m_points));
    trace.levels.resize(m_points, options.l_levels);
    if (options.keep_vectors) {
        trace.has_vectors = true;
        trace.ground_vectors.resize(dim, m_points);
        trace.excited_vectors.resize(dim, m_points);
    }

    Eigen::VectorXd warm = Eigen::VectorXd::Ones(dim);
    for (int m = 0; m < m_points; ++m) {
        const double tau = static_cast<double>(m) / (m_points - 1);
        trace.tau_grid[static_cast<std::size_t>(m)] = tau;
        const double s = schedule.value(tau);
        const double c = schedule.constraint_ramp(tau);
        const double a_x = 1.0 - s;

        if (solver == EigenSolver::lanczos) {
            LanczosOutcome lz = lanczos_lowest(gen, a_x, s, c, options.l_levels, warm);
            if (!lz.converged && options.solver == EigenSolver::automatic) {
                const Eigen::MatrixXd h = dense_passage(gen, a_x, s, c);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
                lz.converged = true;
                lz.values = es.eigenvalues().head(options.l_levels);
                lz.vectors = es.eigenvectors().leftCols(options.l_levels);
            }
            if (!lz.converged) {
                char msg[96];
                std::snprintf(msg, sizeof msg, "instantaneous_spectrum: Lanczos stalled at tau=%.6f", tau);
                throw std::runtime_error(msg);
            }
            trace.levels.row(m) = lz.values.transpose();
            if (options.keep_vectors) {
                trace.ground_vectors.col(m) = lz.vectors.col(0);
                trace.excited_vectors.col(m) = lz.vectors.col(1);
            }
            warm = lz.vectors.col(0);
        } else {
            const Eigen::MatrixXd h = dense_passage(gen, a_x, s, c);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            if (es.info() != Eigen::Success) {
                char msg[96];
                std::snprintf(msg, sizeof msg, "instantaneous_spectrum: dense solver failed at tau=%.6f", tau);
                throw std::runtime_error(msg);
            }
            trace.levels.row(m) = es.eigenvalues().head(options.l_levels).transpose();
            if (options.keep_vectors) {
                trace.ground_vectors.col(m) = es.eigenvectors().col(0);
                trace.excited_vectors.col(m) = es.eigenvectors().col(1);
            }
        }
    }
    trace.validate();
    return trace;
}

GapSummary gap_summary(const SpectrumTrace& trace, double plateau_tol) {
    trace.validate();
    const std::size_t m = trace.tau_grid.size();
    GapSummary summary;
    summary.gap_trace.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        summary.gap_trace[i] =
            trace.levels(static_cast<Eigen::Index>(i), 1) - trace.levels(static_cast<Eigen::Index>(i), 0);
    }
    const auto& g = summary.gap_trace;

    // Leftmost global minimum.
    std::size_t gmin = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (g[i] < g[gmin]) gmin = i;
    }
    summary.min_gap = g[gmin];

    if (gmin == 0 || gmin == m - 1) {
        summary.position = trace.tau_grid[gmin];
    } else {
        // Parabola through the three surrounding points; fall back to the
        // grid point when the curvature is too flat to trust.
        const double y0 = g[gmin - 1];
        const double y1 = g[gmin];
        const double y2 = g[gmin + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        const double h = trace.tau_grid[gmin + 1] - trace.tau_grid[gmin];
        double pos = trace.tau_grid[gmin];
        if (denom > 1e-300) {
            pos += 0.5 * h * (y0 - y2) / denom;
        }
        summary.position = std::clamp(pos, trace.tau_grid[gmin - 1], trace.tau_grid[gmin + 1]);
    }

    // Count minima over plateau runs anchored at their first element.
    int count = 0;
    bool global_counted = false;
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && std::abs(g[j + 1] - g[i]) <= plateau_tol) ++j;
        const bool contains_global = gmin >= i && gmin <= j;
        if (i > 0 && j + 1 < m && g[i - 1] > g[i] + plateau_tol && g[j + 1] > g[i] + plateau_tol) {
            ++count;
            if (contains_global) global_counted = true;
        }
        i = j + 1;
    }
    if (!global_counted) ++count;
    summary.local_minima_count = count;
    return summary;
}

double adiabatic_time_bound(const PhysicalInstance& phys, const Schedule& schedule,
                            const SpectrumTrace& trace) {
    trace.validate();
    if (!trace.has_vectors) {
        throw std::invalid_argument("adiabatic_time_bound: trace must retain eigenvectors");
    }
    const PassageGenerator gen(phys);
    if (trace.ground_vectors.rows() != gen.dim()) {
        throw std::invalid_argument("adiabatic_time_bound: trace dimension mismatch");
    }
    Eigen::VectorXd dh(gen.dim());
    double bound = 0.0;
    for (std::size_t i = 0; i < trace.tau_grid.size(); ++i) {
        const auto m = static_cast<Eigen::Index>(i);
        const double gap = trace.levels(m, 1) - trace.levels(m, 0);
        if (gap < 1e-12) {
            return std::numeric_limits<double>::infinity();
        }
        const double tau = trace.tau_grid[i];
        const Schedule::Eval sv = schedule.value_and_derivative(tau);
        const Schedule::Eval cv = schedule.constraint_ramp_and_derivative(tau);
        // dH/dtau = (ds/dtau)(H_p - H_i) + (dc/dtau) H_c.
        gen.apply_general_real(-sv.derivative, sv.derivative, cv.derivative,
                               trace.ground_vectors.col(m).data(), dh.data());
        const double elem = std::abs(trace.excited_vectors.col(m).dot(dh));
        bound = std::max(bound, elem / (gap * gap));
    }
    return bound;
}

std::string spectrum_to_csv(const SpectrumTrace& trace) {
    trace.validate();
    std::string out = "tau";
    for (Eigen::Index c = 0; c < trace.levels.cols(); ++c) {
        out += ",level_" + std::to_string(c);
    }
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < trace.tau_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", trace.tau_grid[i]);
        out += buf;
        for (Eigen::Index c = 0; c < trace.levels.cols(); ++c) {
            std::snprintf(buf, sizeof buf, ",%.17g", trace.levels(static_cast<Eigen::Index>(i), c));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

nlohmann::json gap_summary_to_json(const GapSummary& summary) {
    return {{"min_gap", summary.min_gap},
            {"position", summary.position},
            {"local_minima_count", summary.local_minima_count}};
}

}  // namespace lhz
