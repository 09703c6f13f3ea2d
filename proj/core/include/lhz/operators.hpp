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

#ifndef LHZ_OPERATORS_HPP
#define LHZ_OPERATORS_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lhz/instance.hpp"

namespace lhz {

// Operator algebra on the 2^K physical Hilbert space. The passage
// Hamiltonian is
//
//   H(tau) = A(tau) H_i + B(tau) H_p + c(tau) H_c,   A = 1 - s, B = s,
//
// with H_i = -sum_k sigma_x^(k) (ground state: all-plus uniform
// superposition), H_p = sum_k J_k sigma_z^(k), and the plaquette penalty
// H_c = sum_p (-prod_{q in p} sigma_z^(q)). All three pieces are real in
// the computational basis; states are still complex because the dynamics
// are.

struct DiagonalOperator {
    std::int64_t dim = 0;
    std::vector<double> entries;

    void validate() const;  // power-of-two dim, finite entries
};

// General sparse Hermitian operator in CSR layout. Used for assembled
// passage operators and as the slow reference path; the inner loops of the
// integrator and eigensolver use PassageGenerator instead.
struct SparseHermitianOperator {
    std::int64_t dim = 0;
    std::vector<std::int64_t> row_start;  // size dim+1
    std::vector<std::int32_t> cols;
    std::vector<std::complex<double>> values;

    void apply(std::span<const std::complex<double>> x,
               std::span<std::complex<double>> y) const;
    Eigen::MatrixXcd dense() const;
    bool is_hermitian(double tol = 1e-12) const;
};

DiagonalOperator build_problem_hamiltonian(const PhysicalInstance& phys);
DiagonalOperator build_constraint_hamiltonian(const PhysicalInstance& phys);

// H_i = -sum_k sigma_x^(k), K*2^K off-diagonal entries of -1.
SparseHermitianOperator build_initial_hamiltonian(int k_physical);

// (1-s) H_i + s H_p + c H_c. Throws std::domain_error for s outside [0,1]
// or negative c.
SparseHermitianOperator assemble_passage(const PhysicalInstance& phys, double s_value,
                                         double c_value);

// Same operator as a dense real symmetric matrix, for eigensolver oracles.
Eigen::MatrixXd assemble_passage_dense(const PhysicalInstance& phys, double s_value,
                                       double c_value);

// Matrix-free application of a H_i + b H_p + c H_c. Precomputes the two
// diagonals once per instance; apply_general is the single kernel behind
// H(tau), dH/dtau and the final Hamiltonian.
class PassageGenerator {
  public:
    explicit PassageGenerator(const PhysicalInstance& phys);

    std::int64_t dim() const { return dim_; }
    int qubits() const { return k_; }
    double constraint_strength() const { return c_strength_; }

    // y = a_x * (H_i x) + (a_j * diag(H_p) + a_c * diag(H_c)) .* x
    void apply_general(double a_x, double a_j, double a_c, const std::complex<double>* x,
                       std::complex<double>* y) const;
    // y = H(s, c) x
    void apply(double s_value, double c_value, const std::complex<double>* x,
               std::complex<double>* y) const {
        apply_general(1.0 - s_value, s_value, c_value, x, y);
    }
    // Real-vector variant of apply_general for eigensolvers.
    void apply_general_real(double a_x, double a_j, double a_c, const double* x,
                            double* y) const;

    // Triangle-inequality bound K + sum|J_k| + C*N_c, valid for every
    // s in [0,1] and c in [0,C].
    double norm_estimate() const;

    const std::vector<double>& problem_diagonal() const { return diag_problem_; }
    const std::vector<double>& constraint_diagonal() const { return diag_constraint_; }
    // Diagonal of H_p + C*H_c, the end-of-sweep Hamiltonian.
    std::vector<double> final_diagonal() const;

  private:
    std::int64_t dim_ = 0;
    int k_ = 0;
    double c_strength_ = 0.0;
    double abs_field_sum_ = 0.0;
    int constraint_count_ = 0;
    std::vector<double> diag_problem_;
    std::vector<double> diag_constraint_;
};

}  // namespace lhz

#endif  // LHZ_OPERATORS_HPP
