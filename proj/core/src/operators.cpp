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

#include "lhz/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lhz {

namespace {

// z-eigenvalue of qubit k in basis state b: bit 0 -> +1, bit 1 -> -1.
inline double z_of(std::uint64_t b, int k) {
    return (b >> k) & 1 ? -1.0 : 1.0;
}

void check_instance(const PhysicalInstance& phys) {
    if (phys.k_physical < 1 || phys.k_physical > 24) {
        throw std::invalid_argument("operators: k_physical outside supported range");
    }
    if (phys.fields.size() != static_cast<std::size_t>(phys.k_physical)) {
        throw std::invalid_argument("operators: field vector has wrong size");
    }
    for (const auto& p : phys.plaquettes) {
        if (p.members.size() != 3 && p.members.size() != 4) {
            throw std::invalid_argument("operators: plaquette must have 3 or 4 members");
        }
        for (int q : p.members) {
            if (q < 0 || q >= phys.k_physical) {
                throw std::invalid_argument("operators: plaquette member out of range");
            }
        }
    }
}

}  // namespace

void DiagonalOperator::validate() const {
    if (dim < 1 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("DiagonalOperator: dim must be a power of two");
    }
    if (entries.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("DiagonalOperator: entry count mismatch");
    }
    for (double e : entries) {
        if (!std::isfinite(e)) {
            throw std::invalid_argument("DiagonalOperator: non-finite entry");
        }
    }
}

void SparseHermitianOperator::apply(std::span<const std::complex<double>> x,
                                    std::span<std::complex<double>> y) const {
    if (static_cast<std::int64_t>(x.size()) != dim || static_cast<std::int64_t>(y.size()) != dim) {
        throw std::invalid_argument("SparseHermitianOperator::apply: size mismatch");
    }
    for (std::int64_t r = 0; r < dim; ++r) {
        std::complex<double> acc = 0.0;
        for (std::int64_t e = row_start[static_cast<std::size_t>(r)];
             e < row_start[static_cast<std::size_t>(r) + 1]; ++e) {
            acc += values[static_cast<std::size_t>(e)] * x[static_cast<std::size_t>(cols[static_cast<std::size_t>(e)])];
        }
        y[static_cast<std::size_t>(r)] = acc;
    }
}

Eigen::MatrixXcd SparseHermitianOperator::dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::int64_t r = 0; r < dim; ++r) {
        for (std::int64_t e = row_start[static_cast<std::size_t>(r)];
             e < row_start[static_cast<std::size_t>(r) + 1]; ++e) {
            m(r, cols[static_cast<std::size_t>(e)]) += values[static_cast<std::size_t>(e)];
        }
    }
    return m;
}

bool SparseHermitianOperator::is_hermitian(double tol) const {
    const Eigen::MatrixXcd m = dense();
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DiagonalOperator build_problem_hamiltonian(const PhysicalInstance& phys) {
    check_instance(phys);
    DiagonalOperator op;
    op.dim = std::int64_t{1} << phys.k_physical;
    op.entries.assign(static_cast<std::size_t>(op.dim), 0.0);
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(op.dim); ++b) {
        double e = 0.0;
        for (int k = 0; k < phys.k_physical; ++k) {
            e += phys.fields[static_cast<std::size_t>(k)] * z_of(b, k);
        }
        op.entries[b] = e;
    }
    return op;
}

DiagonalOperator build_constraint_hamiltonian(const PhysicalInstance& phys) {
    check_instance(phys);
    DiagonalOperator op;
    op.dim = std::int64_t{1} << phys.k_physical;
    op.entries.assign(static_cast<std::size_t>(op.dim), 0.0);
    for (const auto& p : phys.plaquettes) {
        // Parity of the plaquette under XOR of member bits: even parity
        // means product of z is +1 and the penalty term contributes -1.
        std::uint64_t mask = 0;
        for (int q : p.members) mask |= std::uint64_t{1} << q;
        for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(op.dim); ++b) {
            const bool odd = std::popcount(b & mask) & 1;
            op.entries[b] += odd ? 1.0 : -1.0;
        }
    }
    return op;
}

SparseHermitianOperator build_initial_hamiltonian(int k_physical) {
    if (k_physical < 1 || k_physical > 24) {
        throw std::invalid_argument("build_initial_hamiltonian: k_physical outside supported range");
    }
    SparseHermitianOperator op;
    op.dim = std::int64_t{1} << k_physical;
    op.row_start.resize(static_cast<std::size_t>(op.dim) + 1);
    op.cols.resize(static_cast<std::size_t>(op.dim) * static_cast<std::size_t>(k_physical));
    op.values.assign(op.cols.size(), std::complex<double>(-1.0, 0.0));
    std::size_t e = 0;
    for (std::int64_t r = 0; r < op.dim; ++r) {
        op.row_start[static_cast<std::size_t>(r)] = static_cast<std::int64_t>(e);
        for (int k = 0; k < k_physical; ++k) {
            op.cols[e++] = static_cast<std::int32_t>(r ^ (std::int64_t{1} << k));
        }
    }
    op.row_start[static_cast<std::size_t>(op.dim)] = static_cast<std::int64_t>(e);
    return op;
}

SparseHermitianOperator assemble_passage(const PhysicalInstance& phys, double s_value,
                                         double c_value) {
    if (!(s_value >= 0.0 && s_value <= 1.0)) {
        throw std::domain_error("assemble_passage: s outside [0, 1]");
    }
    if (!(c_value >= 0.0)) {
        throw std::domain_error("assemble_passage: negative constraint coefficient");
    }
    check_instance(phys);
    const DiagonalOperator hp = build_problem_hamiltonian(phys);
    const DiagonalOperator hc = build_constraint_hamiltonian(phys);
    const int k = phys.k_physical;

    SparseHermitianOperator op;
    op.dim = hp.dim;
    op.row_start.resize(static_cast<std::size_t>(op.dim) + 1);
    op.cols.reserve(static_cast<std::size_t>(op.dim) * static_cast<std::size_t>(k + 1));
    op.values.reserve(op.cols.capacity());
    for (std::int64_t r = 0; r < op.dim; ++r) {
        op.row_start[static_cast<std::size_t>(r)] = static_cast<std::int64_t>(op.cols.size());
        op.cols.push_back(static_cast<std::int32_t>(r));
        op.values.emplace_back(s_value * hp.entries[static_cast<std::size_t>(r)] +
                                   c_value * hc.entries[static_cast<std::size_t>(r)],
                               0.0);
        for (int q = 0; q < k; ++q) {
            op.cols.push_back(static_cast<std::int32_t>(r ^ (std::int64_t{1} << q)));
            op.values.emplace_back(-(1.0 - s_value), 0.0);
        }
    }
    op.row_start[static_cast<std::size_t>(op.dim)] = static_cast<std::int64_t>(op.cols.size());
    return op;
}

Eigen::MatrixXd assemble_passage_dense(const PhysicalInstance& phys, double s_value,
                                       double c_value) {
    if (!(s_value >= 0.0 && s_value <= 1.0)) {
        throw std::domain_error("assemble_passage_dense: s outside [0, 1]");
    }
    if (!(c_value >= 0.0)) {
        throw std::domain_error("assemble_passage_dense: negative constraint coefficient");
    }
    check_instance(phys);
    const DiagonalOperator hp = build_problem_hamiltonian(phys);
    const DiagonalOperator hc = build_constraint_hamiltonian(phys);
    const std::int64_t dim = hp.dim;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t r = 0; r < dim; ++r) {
        m(r, r) = s_value * hp.entries[static_cast<std::size_t>(r)] +
                  c_value * hc.entries[static_cast<std::size_t>(r)];
        for (int q = 0; q < phys.k_physical; ++q) {
            m(r, r ^ (std::int64_t{1} << q)) = -(1.0 - s_value);
        }
    }
    return m;
}

PassageGenerator::PassageGenerator(const PhysicalInstance& phys) {
    check_instance(phys);
    k_ = phys.k_physical;
    dim_ = std::int64_t{1} << k_;
    c_strength_ = phys.constraint_strength;
    constraint_count_ = phys.constraint_count();
    for (double j : phys.fields) abs_field_sum_ += std::abs(j);
    diag_problem_ = build_problem_hamiltonian(phys).entries;
    diag_constraint_ = build_constraint_hamiltonian(phys).entries;
}

void PassageGenerator::apply_general(double a_x, double a_j, double a_c,
                                     const std::complex<double>* x,
                                     std::complex<double>* y) const {
    const std::size_t n = static_cast<std::size_t>(dim_);
    for (std::size_t b = 0; b < n; ++b) {
        y[b] = (a_j * diag_problem_[b] + a_c * diag_constraint_[b]) * x[b];
    }
    if (a_x == 0.0) return;
    // H_i couples b with b ^ (1 << k); walk each bit plane in a butterfly
    // pattern so both directions of the pair are updated together.
    for (int k = 0; k < k_; ++k) {
        const std::size_t bit = std::size_t{1} << k;
        for (std::size_t base = 0; base < n; base += 2 * bit) {
            for (std::size_t off = 0; off < bit; ++off) {
                const std::size_t lo = base + off;
                const std::size_t hi = lo + bit;
                y[lo] -= a_x * x[hi];
                y[hi] -= a_x * x[lo];
            }
        }
    }
}

void PassageGenerator::apply_general_real(double a_x, double a_j, double a_c, const double* x,
                                          double* y) const {
    const std::size_t n = static_cast<std::size_t>(dim_);
    for (std::size_t b = 0; b < n; ++b) {
        y[b] = (a_j * diag_problem_[b] + a_c * diag_constraint_[b]) * x[b];
    }
    if (a_x == 0.0) return;
    for (int k = 0; k < k_; ++k) {
        const std::size_t bit = std::size_t{1} << k;
        for (std::size_t base = 0; base < n; base += 2 * bit) {
            for (std::size_t off = 0; off < bit; ++off) {
                const std::size_t lo = base + off;
                const std::size_t hi = lo + bit;
                y[lo] -= a_x * x[hi];
                y[hi] -= a_x * x[lo];
            }
        }
    }
}

double PassageGenerator::norm_estimate() const {
    return static_cast<double>(k_) + abs_field_sum_ + c_strength_ * constraint_count_;
}

std::vector<double> PassageGenerator::final_diagonal() const {
    std::vector<double> d(diag_problem_.size());
    for (std::size_t b = 0; b < d.size(); ++b) {
        d[b] = diag_problem_[b] + c_strength_ * diag_constraint_[b];
    }
    return d;
}

}  // namespace lhz
