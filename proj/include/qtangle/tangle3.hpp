// Copyright 2026 The qtangle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Residual 3-tangle of pure three-qubit states and the circuits that
// measure it.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qtangle/concurrence.hpp"
#include "qtangle/errors.hpp"
#include "qtangle/gate_circuit.hpp"
#include "qtangle/momentcircuits.hpp"
#include "qtangle/spectrum.hpp"
#include "qtangle/states.hpp"

namespace qtangle {

inline constexpr double kPureThreshold = 1 - 1e-8;

struct TangleValue {
    double tau = 0;
    std::string method;
    std::map<std::string, double> components;
    /// Set when a mixed input was accepted through the override.
    bool unreliable = false;
};

namespace detail {

struct ThreeQubitInput {
    DensityMatrix rho;
    bool unreliable = false;
};

inline ThreeQubitInput require_pure_three_qubit(const State &state, bool override_purity) {
    DensityMatrix rho = as_density(state);
    if (rho.dims() != Dims{2, 2, 2}) {
        throw InvalidInput("3-tangle needs a three-qubit state");
    }
    double purity = rho.purity();
    if (purity < kPureThreshold) {
        if (!override_purity) {
            std::ostringstream ss;
            ss << "3-tangle requires pure state (Tr rho^2 = " << purity << ")";
            throw InvalidInput(ss.str());
        }
        return {std::move(rho), true};
    }
    return {std::move(rho), false};
}

inline double purity_of(const DensityMatrix &rho, std::vector<std::size_t> keep) {
    return rho.reduce(std::move(keep)).purity();
}

}  // namespace detail

/// Party relabeling: party k of the result is party order[k] of rho.
inline DensityMatrix permute_parties(const DensityMatrix &rho, const std::vector<std::size_t> &order) {
    std::size_t n = rho.num_qubits();
    if (order.size() != n) {
        throw InvalidInput("permute_parties: order must name every party");
    }
    std::size_t dim = rho.dim();
    std::vector<std::size_t> old_index(dim);
    for (std::size_t i = 0; i < dim; i++) {
        std::size_t o = 0;
        for (std::size_t k = 0; k < n; k++) {
            std::size_t bit = (i >> (n - 1 - k)) & 1;
            o |= bit << (n - 1 - order[k]);
        }
        old_index[i] = o;
    }
    CMatrix out(dim, dim);
    for (std::size_t i = 0; i < dim; i++) {
        for (std::size_t j = 0; j < dim; j++) {
            out(i, j) = rho.matrix()(old_index[i], old_index[j]);
        }
    }
    return DensityMatrix::validate(std::move(out), rho.dims());
}

/// tau = 4 det rho_A - C^2(rho_AB) - C^2(rho_AC), with 4 det rho_A written
/// as 2 (1 - Tr rho_A^2).
inline TangleValue tau3_residual(const State &state, bool override_purity = false) {
    auto in = detail::require_pure_three_qubit(state, override_purity);
    double four_det = 2 * (1 - detail::purity_of(in.rho, {0}));
    double c_ab = wootters_concurrence(in.rho.reduce({0, 1})).concurrence;
    double c_ac = wootters_concurrence(in.rho.reduce({0, 2})).concurrence;
    TangleValue out;
    out.method = "residual";
    out.tau = four_det - c_ab * c_ab - c_ac * c_ac;
    out.components = {{"four_det_a", four_det}, {"tau_ab", c_ab * c_ab}, {"tau_ac", c_ac * c_ac}};
    out.unreliable = in.unreliable;
    return out;
}

/// Tr rho_A^2, Tr rho_B^2, Tr rho_C^2 from one circuit: three control qubits,
/// each running a swap test on its own party's rails of two copies.
inline GateCircuit combined_purity_gate_circuit() {
    GateCircuit c(9, 0);
    for (std::size_t i = 0; i < 3; i++) {
        c.hadamard(i);
    }
    for (std::size_t i = 0; i < 3; i++) {
        c.controlled_swap({i}, 3 + i, 6 + i);
    }
    for (std::size_t i = 0; i < 3; i++) {
        c.hadamard(i);
    }
    return c;
}

struct PurityReport {
    std::array<double, 3> circuit{};
    std::array<double, 3> direct{};
    double max_residual = 0;
};

/// Gate-level purities, cross-checked against partial traces.
inline PurityReport combined_purity_circuit(const State &state) {
    DensityMatrix rho = as_density(state);
    if (rho.dims() != Dims{2, 2, 2}) {
        throw InvalidInput("combined purity circuit needs a three-qubit state");
    }
    Ensemble two = tensor_power(ensemble_of(state), 2);
    auto p = zero_probabilities(combined_purity_gate_circuit(), two, 0.0, {0, 1, 2});
    PurityReport out;
    for (std::size_t i = 0; i < 3; i++) {
        out.circuit[i] = 2 * p[i] - 1;
        out.direct[i] = detail::purity_of(rho, {i});
        out.max_residual = std::max(out.max_residual, std::abs(out.circuit[i] - out.direct[i]));
    }
    return out;
}

enum class PuritySource { direct, circuit };
enum class PairTangleSource { wootters, moments };

/// tau = 2 (1 - Tr rho_A^2 - Tr rho_B^2 + Tr rho_C^2 - tau_AB).
inline TangleValue tau3_taufinal(const State &state, bool override_purity = false,
                                 PuritySource purities = PuritySource::direct,
                                 PairTangleSource pair = PairTangleSource::wootters) {
    auto in = detail::require_pure_three_qubit(state, override_purity);
    std::array<double, 3> p{};
    if (purities == PuritySource::circuit) {
        p = combined_purity_circuit(state).circuit;
    } else {
        for (std::size_t i = 0; i < 3; i++) {
            p[i] = detail::purity_of(in.rho, {i});
        }
    }
    DensityMatrix ab = in.rho.reduce({0, 1});
    double c_ab = pair == PairTangleSource::wootters ? wootters_concurrence(ab).concurrence
                                                      : concurrence_from_moments(moments_from_terms(ab)).concurrence;
    TangleValue out;
    out.method = "taufinal";
    out.tau = 2 * (1 - p[0] - p[1] + p[2] - c_ab * c_ab);
    out.components = {{"purity_a", p[0]}, {"purity_b", p[1]}, {"purity_c", p[2]}, {"tau_ab", c_ab * c_ab}};
    out.unreliable = in.unreliable;
    return out;
}

/// tau = sqrt(8 (p1^2 - p2)) from the first two moments of rho_AB rho_AB~.
/// Radicands down to -1e-8 are clamped to zero.
inline TangleValue tau3_tracediff(const State &state, bool override_purity = false) {
    auto in = detail::require_pure_three_qubit(state, override_purity);
    DensityMatrix ab = in.rho.reduce({0, 1});
    double p1 = moment_from_terms(1, ab);
    double p2 = moment_from_terms(2, ab);
    // The square root amplifies rounding in p1^2 - p2, so the difference is
    // formed in wider precision before it is rounded back.
    wide_cplx w1 = signed_term_sum<wide_cplx>(1, ab);
    wide_cplx w2 = signed_term_sum<wide_cplx>(2, ab);
    double radicand = static_cast<double>((w1 * w1 - w2).real());
    if (radicand < -1e-8) {
        std::ostringstream ss;
        ss << "tau3_tracediff: p1^2 - p2 = " << radicand << " is negative";
        throw NumericalFailure(ss.str());
    }
    TangleValue out;
    out.method = "tracediff";
    out.tau = std::sqrt(8 * std::max(0.0, radicand));
    out.components = {{"p1", p1}, {"p2", p2}, {"radicand", radicand}};
    out.unreliable = in.unreliable;
    return out;
}

/// The m = 2 moment circuit on rho_AB whose matrix-multiplication box is
/// switched by one more |-> ancilla. Copies are whole three-qubit states;
/// the C rails are left alone.
inline GateCircuit naive_tau_sq_gate_circuit() {
    MomentCircuitLayout lay{2, 3, true};
    GateCircuit c(lay.num_qubits(), lay.primary());
    c.hadamard(lay.primary()).chi_phase(lay.primary());
    c.hadamard(lay.box_ancilla()).controlled_z(lay.primary(), lay.box_ancilla());
    for (std::size_t j = 0; j < 2; j++) {
        for (bool rail_b : {false, true}) {
            c.hadamard(lay.aux(j, rail_b)).controlled_z(lay.primary(), lay.aux(j, rail_b));
        }
    }
    detail::add_rail_permutation(c, lay, {lay.primary(), lay.box_ancilla()}, detail::base_cycle(2));
    detail::add_slot_swaps(c, lay);
    c.hadamard(lay.primary());
    return c;
}

struct NaiveTauReport {
    /// signed visibility of the circuit
    double visibility = 0;
    /// |tau|^2, the squared residual tangle
    double tau_sq = 0;
    double ratio = 0;
    static constexpr double kStatedRatio = 1.0 / 32;
    static constexpr double kDerivedRatio = 1.0 / 256;
};

/// Analytic mode: (p1^2 - p2) / 32 from contracted moments. Gate level:
/// statevector simulation on four copies of the three-qubit state.
inline NaiveTauReport naive_tau_sq_circuit(const State &state, CircuitMode mode, bool override_purity = false) {
    auto in = detail::require_pure_three_qubit(state, override_purity);
    NaiveTauReport out;
    if (mode == CircuitMode::analytic) {
        DensityMatrix ab = in.rho.reduce({0, 1});
        double p1 = moment_from_terms(1, ab);
        double p2 = moment_from_terms(2, ab);
        out.visibility = (p1 * p1 - p2) / 32;
    } else {
        GateCircuit c = naive_tau_sq_gate_circuit();
        Ensemble one = ensemble_of(state);
        check_simulation_budget(std::pow(static_cast<double>(one.members.size()), 4), c.num_qubits());
        out.visibility = 2 * simulate_gate_circuit(c, tensor_power(one, 4), 0.0) - 1;
    }
    double tau = tau3_residual(state, override_purity).tau;
    out.tau_sq = tau * tau;
    out.ratio = out.tau_sq > 0 ? out.visibility / out.tau_sq : 0.0;
    return out;
}

struct PairIdentityReport {
    /// lambda_1 lambda_2 for the pairs AB, AC, BC
    std::array<double, 3> lambda12{};
    /// 4 det rho_i for parties A, B, C
    std::array<double, 3> four_det{};
    /// max over parties of |Tr(rho_XY rho_XY~) + Tr(rho_XZ rho_XZ~) - 4 det rho_X|
    double first_moment_residual = 0;
    /// spread of lambda_1 lambda_2 over the three pairs
    double lambda_residual = 0;
    /// spread of the residual tangle over the six party orders
    double relabel_residual = 0;
    /// largest lambda_3, lambda_4 over the pairs
    double rank2_residual = 0;
};

inline PairIdentityReport tangle_pair_identities(const State &state, bool override_purity = false) {
    auto in = detail::require_pure_three_qubit(state, override_purity);
    PairIdentityReport out;
    const std::array<std::vector<std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    std::array<double, 3> first{};
    for (std::size_t k = 0; k < 3; k++) {
        DensityMatrix r = in.rho.reduce(pairs[k]);
        first[k] = rho_rhotilde(r).trace().real();
        auto w = wootters_concurrence(r);
        out.lambda12[k] = w.spectrum.lambdas[0] * w.spectrum.lambdas[1];
        out.rank2_residual = std::max({out.rank2_residual, w.spectrum.lambdas[2], w.spectrum.lambdas[3]});
        out.four_det[k] = 2 * (1 - detail::purity_of(in.rho, {k}));
    }
    // Party A appears in pairs AB, AC; B in AB, BC; C in AC, BC.
    out.first_moment_residual = std::max({std::abs(first[0] + first[1] - out.four_det[0]),
                                          std::abs(first[0] + first[2] - out.four_det[1]),
                                          std::abs(first[1] + first[2] - out.four_det[2])});
    auto [lo, hi] = std::minmax_element(out.lambda12.begin(), out.lambda12.end());
    out.lambda_residual = *hi - *lo;
    std::vector<std::size_t> order{0, 1, 2};
    double tmin = INFINITY, tmax = -INFINITY;
    do {
        double t = tau3_residual(permute_parties(in.rho, order), true).tau;
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    } while (std::next_permutation(order.begin(), order.end()));
    out.relabel_residual = tmax - tmin;
    return out;
}

}  // namespace qtangle
