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

#ifndef LHZ_SCHEDULE_HPP
#define LHZ_SCHEDULE_HPP

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lhz {

// One randomized Fourier term of a CRAB expansion.
struct BasisTerm {
    double omega = 0.0;  // frequency, cycles per unit tau
    double a = 0.0;      // sin amplitude
    double b = 0.0;      // cos amplitude
};

// How the plaquette penalty is ramped alongside s(tau).
enum class RampMode {
    decoupled,  // c(tau) = tau * C
    nested,     // c(tau) = s(tau) * C
};

// An annealing protocol
//
//   s(tau) = g(tau) + lambda(tau) * sum_n [a_n sin(2 pi w_n tau)
//                                          + b_n cos(2 pi w_n tau)]
//
// with boundary envelope lambda(tau) = tau(1-tau) and guess g either the
// linear ramp or another Schedule (the dCRAB dressing chain). The envelope
// pins s(0)=0 and s(1)=1 exactly; with clamping on, the value is cut to
// [0,1] at each level of the chain.
class Schedule {
  public:
    struct Eval {
        double value = 0.0;
        double derivative = 0.0;
    };

    // Default-constructed schedules are the linear ramp with T=1, C=2.
    Schedule() = default;

    static Schedule linear(double t_anneal, double constraint_c,
                           RampMode mode = RampMode::decoupled);
    // New schedule dressing `guess` with extra terms; T, C, mode and clamp
    // carry over from the guess.
    static Schedule dressed(std::shared_ptr<const Schedule> guess,
                            std::vector<BasisTerm> terms);

    double annealing_time() const { return t_anneal_; }
    double constraint_c() const { return constraint_c_; }
    RampMode mode() const { return mode_; }
    bool clamped() const { return clamp_; }
    const std::vector<BasisTerm>& basis() const { return basis_; }
    const std::shared_ptr<const Schedule>& guess() const { return guess_; }
    // Number of basis terms summed over the whole dressing chain.
    int chain_term_count() const;

    // s(tau), clamped when the clamp flag is set. Throws std::domain_error
    // for tau outside [0,1].
    double value(double tau) const;
    // s and ds/dtau together; the derivative is 0 where the clamp is
    // active.
    Eval value_and_derivative(double tau) const;
    // The CRAB sum without any clamping, for diagnostics.
    double value_unclamped(double tau) const;

    // c(tau): tau*C in decoupled mode, s(tau)*C in nested mode.
    double constraint_ramp(double tau) const;
    // c and dc/dtau together.
    Eval constraint_ramp_and_derivative(double tau) const;

    // Copy with a new annealing time, same shape. Used by time escalation.
    Schedule with_time(double t_anneal) const;
    // Copy with the basis amplitudes replaced (frequencies kept). Used by
    // the inner optimization loop. Requires 2*basis().size() values in
    // (a_0, b_0, a_1, b_1, ...) order.
    Schedule with_amplitudes(const std::vector<double>& amplitudes) const;

    // Endpoint and finiteness checks; throws std::invalid_argument.
    void validate() const;

  private:
    Eval eval_chain(double tau) const;

    double t_anneal_ = 1.0;
    double constraint_c_ = 2.0;
    RampMode mode_ = RampMode::decoupled;
    bool clamp_ = true;
    std::vector<BasisTerm> basis_;
    std::shared_ptr<const Schedule> guess_;  // null means linear ramp

    friend nlohmann::json schedule_to_json(const Schedule& schedule);
    friend Schedule schedule_from_json(const nlohmann::json& j);
};

// Protocol file format:
// {"T", "C", "mode": "decoupled"|"nested", "clamp",
//  "basis": [{"omega", "a", "b"}, ...], "guess": "linear"| <nested object>}
nlohmann::json schedule_to_json(const Schedule& schedule);
// Throws std::invalid_argument on malformed input, including schedules
// whose evaluated endpoints are not exactly 0 and 1.
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace lhz

#endif  // LHZ_SCHEDULE_HPP
