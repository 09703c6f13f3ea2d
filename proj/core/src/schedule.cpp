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

#include "lhz/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lhz {

namespace {

void check_tau(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw std::domain_error("Schedule: tau outside [0, 1]");
    }
}

}  // namespace

Schedule Schedule::linear(double t_anneal, double constraint_c, RampMode mode) {
    if (!(t_anneal > 0.0) || !std::isfinite(t_anneal)) {
        throw std::domain_error("Schedule::linear: annealing time must be positive");
    }
    if (!(constraint_c >= 0.0) || !std::isfinite(constraint_c)) {
        throw std::domain_error("Schedule::linear: constraint strength must be non-negative");
    }
    Schedule s;
    s.t_anneal_ = t_anneal;
    s.constraint_c_ = constraint_c;
    s.mode_ = mode;
    return s;
}

Schedule Schedule::dressed(std::shared_ptr<const Schedule> guess, std::vector<BasisTerm> terms) {
    if (!guess) {
        throw std::invalid_argument("Schedule::dressed: null guess");
    }
    Schedule s;
    s.t_anneal_ = guess->t_anneal_;
    s.constraint_c_ = guess->constraint_c_;
    s.mode_ = guess->mode_;
    s.clamp_ = guess->clamp_;
    s.basis_ = std::move(terms);
    s.guess_ = std::move(guess);
    return s;
}

int Schedule::chain_term_count() const {
    int n = static_cast<int>(basis_.size());
    for (const Schedule* g = guess_.get(); g != nullptr; g = g->guess_.get()) {
        n += static_cast<int>(g->basis_.size());
    }
    return n;
}

Schedule::Eval Schedule::eval_chain(double tau) const {
    // The guess is evaluated (and clamped, if it clamps) before this
    // level's terms are added, so dressing preserves the chain semantics.
    Eval e = guess_ ? guess_->eval_chain(tau) : Eval{tau, 1.0};
    if (!basis_.empty()) {
        const double lambda = tau * (1.0 - tau);
        const double dlambda = 1.0 - 2.0 * tau;
        double sum = 0.0;
        double dsum = 0.0;
        for (const BasisTerm& t : basis_) {
            const double w = 2.0 * std::numbers::pi * t.omega;
            const double sn = std::sin(w * tau);
            const double cs = std::cos(w * tau);
            sum += t.a * sn + t.b * cs;
            dsum += w * (t.a * cs - t.b * sn);
        }
        e.value += lambda * sum;
        e.derivative += dlambda * sum + lambda * dsum;
    }
    if (clamp_) {
        if (e.value < 0.0) {
            e.value = 0.0;
            e.derivative = 0.0;
        } else if (e.value > 1.0) {
            e.value = 1.0;
            e.derivative = 0.0;
        }
    }
    return e;
}

Schedule::Eval Schedule::value_and_derivative(double tau) const {
    check_tau(tau);
    return eval_chain(tau);
}

double Schedule::value(double tau) const {
    return value_and_derivative(tau).value;
}

double Schedule::value_unclamped(double tau) const {
    check_tau(tau);
    double v = tau;
    const double lambda = tau * (1.0 - tau);
    for (const Schedule* s = this; s != nullptr; s = s->guess_.get()) {
        double sum = 0.0;
        for (const BasisTerm& t : s->basis_) {
            const double w = 2.0 * std::numbers::pi * t.omega;
            sum += t.a * std::sin(w * tau) + t.b * std::cos(w * tau);
        }
        v += lambda * sum;
    }
    return v;
}

double Schedule::constraint_ramp(double tau) const {
    check_tau(tau);
    if (mode_ == RampMode::decoupled) {
        return tau * constraint_c_;
    }
    return value(tau) * constraint_c_;
}

Schedule::Eval Schedule::constraint_ramp_and_derivative(double tau) const {
    check_tau(tau);
    if (mode_ == RampMode::decoupled) {
        return {tau * constraint_c_, constraint_c_};
    }
    Eval e = value_and_derivative(tau);
    return {e.value * constraint_c_, e.derivative * constraint_c_};
}

Schedule Schedule::with_time(double t_anneal) const {
    if (!(t_anneal > 0.0) || !std::isfinite(t_anneal)) {
        throw std::domain_error("Schedule::with_time: annealing time must be positive");
    }
    Schedule s = *this;
    s.t_anneal_ = t_anneal;
    return s;
}

Schedule Schedule::with_amplitudes(const std::vector<double>& amplitudes) const {
    if (amplitudes.size() != 2 * basis_.size()) {
        throw std::invalid_argument("Schedule::with_amplitudes: need 2 amplitudes per term");
    }
    Schedule s = *this;
    for (std::size_t n = 0; n < s.basis_.size(); ++n) {
        s.basis_[n].a = amplitudes[2 * n];
        s.basis_[n].b = amplitudes[2 * n + 1];
    }
    return s;
}

void Schedule::validate() const {
    if (!(t_anneal_ > 0.0) || !std::isfinite(t_anneal_)) {
        throw std::invalid_argument("Schedule: annealing time must be positive and finite");
    }
    if (!(constraint_c_ >= 0.0) || !std::isfinite(constraint_c_)) {
        throw std::invalid_argument("Schedule: constraint strength must be finite and non-negative");
    }
    for (const Schedule* s = this; s != nullptr; s = s->guess_.get()) {
        for (const BasisTerm& t : s->basis_) {
            if (!std::isfinite(t.omega) || !std::isfinite(t.a) || !std::isfinite(t.b)) {
                throw std::invalid_argument("Schedule: non-finite basis term");
            }
        }
    }
    if (value_unclamped(0.0) != 0.0 || value_unclamped(1.0) != 1.0) {
        throw std::invalid_argument("Schedule: endpoints must evaluate to 0 and 1 exactly");
    }
}

nlohmann::json schedule_to_json(const Schedule& schedule) {
    nlohmann::json basis = nlohmann::json::array();
    for (const BasisTerm& t : schedule.basis_) {
        basis.push_back({{"omega", t.omega}, {"a", t.a}, {"b", t.b}});
    }
    nlohmann::json j = {
        {"T", schedule.t_anneal_},
        {"C", schedule.constraint_c_},
        {"mode", schedule.mode_ == RampMode::decoupled ? "decoupled" : "nested"},
        {"clamp", schedule.clamp_},
        {"basis", std::move(basis)},
    };
    if (schedule.guess_) {
        j["guess"] = schedule_to_json(*schedule.guess_);
    } else {
        j["guess"] = "linear";
    }
    return j;
}

Schedule schedule_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("schedule_from_json: expected an object");
    }
    Schedule s;
    try {
        s.t_anneal_ = j.at("T").get<double>();
        s.constraint_c_ = j.at("C").get<double>();
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "decoupled") {
            s.mode_ = RampMode::decoupled;
        } else if (mode == "nested") {
            s.mode_ = RampMode::nested;
        } else {
            throw std::invalid_argument("schedule_from_json: unknown mode '" + mode + "'");
        }
        s.clamp_ = j.at("clamp").get<bool>();
        for (const auto& entry : j.at("basis")) {
            s.basis_.push_back({entry.at("omega").get<double>(), entry.at("a").get<double>(),
                                entry.at("b").get<double>()});
        }
        const auto& guess = j.at("guess");
        if (guess.is_string()) {
            if (guess.get<std::string>() != "linear") {
                throw std::invalid_argument("schedule_from_json: unknown guess name");
            }
        } else {
            s.guess_ = std::make_shared<const Schedule>(schedule_from_json(guess));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("schedule_from_json: ") + e.what());
    }
    s.validate();
    return s;
}

}  // namespace lhz
