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

// Moment circuits for Tr((rho rho~)^m): term enumeration, exact contraction
// of rail permutations, full-circuit and per-term estimation.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qtangle/concurrence.hpp"
#include "qtangle/errors.hpp"
#include "qtangle/gate_circuit.hpp"
#include "qtangle/interferometer.hpp"
#include "qtangle/moments.hpp"
#include "qtangle/rng.hpp"
#include "qtangle/states.hpp"

namespace qtangle {

inline constexpr int kMaxMoment = 4;

/// Copy-level maps for the A and B rails of n two-qubit copies (0-based).
/// The operator sends rail r of copy i to copy perm_r[i], so that
/// Tr(P rho^{x n}) = sum prod_i rho[(a_i b_i), (a_{perm_A(i)} b_{perm_B(i)})].
struct RailPermutation {
    std::size_t n_copies = 0;
    std::vector<std::size_t> perm_a;
    std::vector<std::size_t> perm_b;

    static RailPermutation validate(std::vector<std::size_t> a, std::vector<std::size_t> b) {
        if (a.empty() || a.size() != b.size()) {
            throw InvalidInput("RailPermutation: rail maps must be non-empty and of equal length");
        }
        for (const auto *p : {&a, &b}) {
            std::vector<std::size_t> s = *p;
            std::sort(s.begin(), s.end());
            for (std::size_t i = 0; i < s.size(); i++) {
                if (s[i] != i) {
                    throw InvalidInput("RailPermutation: rail map is not a bijection");
                }
            }
        }
        return {a.size(), std::move(a), std::move(b)};
    }
};

/// Slot factors of rho~ = rho - 1 x rho_B - rho_A x 1 + 1, in enumeration
/// order. Letter codes: R, B, A, I.
enum class SlotFactor { rho, one_rho_b, rho_a_one, identity };

inline constexpr std::array<SlotFactor, 4> kSlotOrder{SlotFactor::rho, SlotFactor::one_rho_b, SlotFactor::rho_a_one,
                                                      SlotFactor::identity};

inline char slot_letter(SlotFactor f) {
    switch (f) {
        case SlotFactor::rho:
            return 'R';
        case SlotFactor::one_rho_b:
            return 'B';
        case SlotFactor::rho_a_one:
            return 'A';
        default:
            return 'I';
    }
}

inline SlotFactor slot_from_letter(char c) {
    switch (c) {
        case 'R':
            return SlotFactor::rho;
        case 'B':
            return SlotFactor::one_rho_b;
        case 'A':
            return SlotFactor::rho_a_one;
        case 'I':
            return SlotFactor::identity;
        default:
            throw InvalidInput(std::string("unknown slot letter '") + c + "'");
    }
}

/// The A-rail swap is on iff the factor carries subsystem A, likewise B.
inline bool a_swap_on(SlotFactor f) {
    return f == SlotFactor::rho || f == SlotFactor::rho_a_one;
}
inline bool b_swap_on(SlotFactor f) {
    return f == SlotFactor::rho || f == SlotFactor::one_rho_b;
}

namespace detail {

inline void check_moment(int m) {
    if (m < 1 || m > kMaxMoment) {
        std::ostringstream ss;
        ss << "moment order " << m << " outside 1.." << kMaxMoment;
        throw InvalidInput(ss.str());
    }
}

/// Copies 0, 2, 4, ... hold rho; copy 2j+1 is the slot of the j-th rho~.
/// The base wiring chains the rho copies cyclically and leaves slot copies
/// fixed.
inline std::vector<std::size_t> base_cycle(int m) {
    std::size_t n = 2 * static_cast<std::size_t>(m);
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; i++) {
        p[i] = i % 2 == 0 ? (i + 2) % n : i;
    }
    return p;
}

/// base o (product of slot swaps (2j, 2j+1) that are on).
inline std::vector<std::size_t> wire(const std::vector<std::size_t> &base, const std::vector<bool> &on) {
    std::vector<std::size_t> p(base.size());
    for (std::size_t i = 0; i < base.size(); i++) {
        std::size_t j = i;
        if (on[i / 2]) {
            j = i ^ 1;
        }
        p[i] = base[j];
    }
    return p;
}

}  // namespace detail

struct TermCircuit {
    int m = 0;
    /// (A-swap on, B-swap on) per rho~ slot.
    std::vector<std::pair<bool, bool>> ancilla_config;
    int sign = 1;
    RailPermutation permutation;
    std::size_t copies_used = 0;

    std::string word() const {
        std::string w;
        for (auto [a, b] : ancilla_config) {
            w += a ? (b ? 'R' : 'A') : (b ? 'B' : 'I');
        }
        return w;
    }
    std::string config_bits() const {
        std::string s;
        for (auto [a, b] : ancilla_config) {
            s += a ? '1' : '0';
            s += b ? '1' : '0';
        }
        return s;
    }
};

/// Term for a slot word over the letters R, B, A, I.
inline TermCircuit term_from_word(std::string_view word) {
    int m = static_cast<int>(word.size());
    detail::check_moment(m);
    TermCircuit t;
    t.m = m;
    t.copies_used = 2 * word.size();
    std::vector<bool> on_a, on_b;
    for (char c : word) {
        SlotFactor f = slot_from_letter(c);
        t.ancilla_config.push_back({a_swap_on(f), b_swap_on(f)});
        on_a.push_back(a_swap_on(f));
        on_b.push_back(b_swap_on(f));
        if (a_swap_on(f) != b_swap_on(f)) {
            t.sign = -t.sign;
        }
    }
    auto base = detail::base_cycle(m);
    t.permutation = RailPermutation::validate(detail::wire(base, on_a), detail::wire(base, on_b));
    return t;
}

/// All 4^m terms. Slot 0 varies slowest; each slot runs through R, B, A, I.
inline std::vector<TermCircuit> enumerate_terms(int m) {
    detail::check_moment(m);
    std::vector<TermCircuit> out;
    std::size_t total = std::size_t{1} << (2 * m);
    for (std::size_t k = 0; k < total; k++) {
        std::string word(static_cast<std::size_t>(m), 'R');
        for (int j = 0; j < m; j++) {
            std::size_t digit = (k >> (2 * (m - 1 - j))) & 3;
            word[static_cast<std::size_t>(j)] = slot_letter(kSlotOrder[digit]);
        }
        out.push_back(term_from_word(word));
    }
    return out;
}

/// Tr(P rho^{x n}) by variable elimination over the 2n rail indices. Copies
/// are absorbed in order; an index is summed out after its last use.
/// `C` is the complex scalar used for the accumulation.
template <class C = cplx>
C contract_permutation(const CMatrix &rho, const RailPermutation &perm) {
    if (rho.rows() != 4 || rho.cols() != 4) {
        throw InvalidInput("contract_permutation: needs a two-qubit density matrix");
    }
    std::size_t n = perm.n_copies;
    auto factor_vars = [&](std::size_t i) {
        return std::array<std::size_t, 4>{2 * i, 2 * i + 1, 2 * perm.perm_a[i], 2 * perm.perm_b[i] + 1};
    };
    std::vector<std::size_t> last(2 * n, 0);
    for (std::size_t i = 0; i < n; i++) {
        for (auto v : factor_vars(i)) {
            last[v] = std::max(last[v], i);
        }
    }
    std::vector<std::size_t> vars;
    std::array<C, 16> el{};
    for (std::size_t i = 0; i < 16; i++) {
        cplx z = rho(i / 4, i % 4);
        el[i] = C(z.real(), z.imag());
    }
    std::vector<C> t{C(1)};
    for (std::size_t i = 0; i < n; i++) {
        auto fv = factor_vars(i);
        std::vector<std::size_t> nv = vars;
        std::array<std::size_t, 4> pos{};
        for (std::size_t k = 0; k < 4; k++) {
            auto it = std::find(nv.begin(), nv.end(), fv[k]);
            if (it == nv.end()) {
                nv.push_back(fv[k]);
                it = nv.end() - 1;
            }
            pos[k] = static_cast<std::size_t>(it - nv.begin());
        }
        std::size_t old_mask = (std::size_t{1} << vars.size()) - 1;
        std::vector<C> nt(std::size_t{1} << nv.size());
        for (std::size_t idx = 0; idx < nt.size(); idx++) {
            auto bit = [&](std::size_t k) { return (idx >> pos[k]) & 1; };
            std::size_t row = 2 * bit(0) + bit(1);
            std::size_t col = 2 * bit(2) + bit(3);
            nt[idx] = t[idx & old_mask] * el[4 * row + col];
        }
        // Sum out indices that no later copy touches.
        std::vector<std::size_t> keep_pos;
        std::vector<std::size_t> kept;
        for (std::size_t k = 0; k < nv.size(); k++) {
            if (last[nv[k]] > i) {
                keep_pos.push_back(k);
                kept.push_back(nv[k]);
            }
        }
        std::vector<C> reduced(std::size_t{1} << kept.size());
        for (std::size_t idx = 0; idx < nt.size(); idx++) {
            std::size_t r = 0;
            for (std::size_t k = 0; k < keep_pos.size(); k++) {
                r |= ((idx >> keep_pos[k]) & 1) << k;
            }
            reduced[r] += nt[idx];
        }
        vars = std::move(kept);
        t = std::move(reduced);
    }
    return t[0];
}

/// Unsigned value of one term. Individual terms can be complex from m = 3
/// on (for example Tr(rho B rho A rho R)); only their signed sum is real.
inline cplx eval_term(const TermCircuit &term, const DensityMatrix &rho) {
    if (rho.dims() != Dims{2, 2}) {
        throw InvalidInput("eval_term: needs a two-qubit state");
    }
    return contract_permutation(rho.matrix(), term.permutation);
}

/// Real value of one term; rejects terms with imaginary part above 1e-8.
inline double eval_term_exact(const TermCircuit &term, const DensityMatrix &rho) {
    cplx v = eval_term(term, rho);
    if (std::abs(v.imag()) > 1e-8) {
        std::ostringstream ss;
        ss << "eval_term_exact: term " << term.word() << " has imaginary part " << v.imag();
        throw NumericalFailure(ss.str());
    }
    return v.real();
}

#if defined(__SIZEOF_FLOAT128__)
using wide_real = __float128;
#else
using wide_real = long double;
#endif
using wide_cplx = std::complex<wide_real>;

/// Signed term sum accumulated in scalar type `C`.
template <class C>
C signed_term_sum(int m, const DensityMatrix &rho) {
    if (rho.dims() != Dims{2, 2}) {
        throw InvalidInput("signed_term_sum: needs a two-qubit state");
    }
    C total(0);
    for (const auto &t : enumerate_terms(m)) {
        C v = contract_permutation<C>(rho.matrix(), t.permutation);
        total += t.sign > 0 ? v : -v;
    }
    return total;
}

namespace detail {

struct TermSum {
    double value = 0;
    /// Typical rounding error of value.
    double rounding = 0;
};

inline TermSum term_sum(int m, const DensityMatrix &rho) {
    if (rho.dims() != Dims{2, 2}) {
        throw InvalidInput("moment_from_terms: needs a two-qubit state");
    }
    using lcplx = std::complex<long double>;
    lcplx total(0);
    long double magnitude = 0;
    for (const auto &t : enumerate_terms(m)) {
        lcplx v = contract_permutation<lcplx>(rho.matrix(), t.permutation);
        total += t.sign > 0 ? v : -v;
        magnitude += std::abs(v);
    }
    if (std::abs(total.imag()) > 1e-8) {
        std::ostringstream ss;
        ss << "moment_from_terms: signed sum has imaginary part " << static_cast<double>(total.imag());
        throw NumericalFailure(ss.str());
    }
    return {static_cast<double>(total.real()),
            static_cast<double>(magnitude * std::numeric_limits<long double>::epsilon())};
}

}  // namespace detail

/// sum sign * value over enumerate_terms(m), in enumeration order. The
/// terms are contracted and summed in long double; the signed sum cancels
/// heavily for low-rank states.
inline double moment_from_terms(int m, const DensityMatrix &rho) {
    return detail::term_sum(m, rho).value;
}

inline MomentSet moments_from_terms(const DensityMatrix &rho) {
    MomentSet out;
    std::array<double, 4> rounding{};
    for (int m = 1; m <= kMaxMoment; m++) {
        auto sum = detail::term_sum(m, rho);
        out.p[static_cast<std::size_t>(m - 1)] = sum.value;
        rounding[static_cast<std::size_t>(m - 1)] = sum.rounding;
    }
    out.rounding = rounding;
    return out;
}

inline double moment_prefactor(int m) {
    return std::pow(0.25, m);
}

/// Qubit layout of a moment circuit: primary ancilla, optional box ancilla,
/// 2m auxiliary ancillas (A then B for each slot), then 2m state copies of
/// `copy_width` qubits whose first two qubits are the A and B rails.
struct MomentCircuitLayout {
    int m = 1;
    std::size_t copy_width = 2;
    bool box = false;

    std::size_t primary() const {
        return 0;
    }
    std::size_t box_ancilla() const {
        return 1;
    }
    std::size_t aux(std::size_t slot, bool rail_b) const {
        return (box ? 2 : 1) + 2 * slot + (rail_b ? 1 : 0);
    }
    std::size_t system_start() const {
        return (box ? 2 : 1) + 2 * static_cast<std::size_t>(m);
    }
    std::size_t rail(std::size_t copy, bool rail_b) const {
        return system_start() + copy * copy_width + (rail_b ? 1 : 0);
    }
    std::size_t num_qubits() const {
        return system_start() + 2 * static_cast<std::size_t>(m) * copy_width;
    }
};

namespace detail {

inline void add_rail_permutation(GateCircuit &c, const MomentCircuitLayout &lay, std::vector<std::size_t> controls,
                                 const std::vector<std::size_t> &copy_map) {
    std::size_t n = copy_map.size();
    bool identity = true;
    for (std::size_t i = 0; i < n; i++) {
        identity &= copy_map[i] == i;
    }
    if (identity) {
        return;
    }
    for (bool rail_b : {false, true}) {
        std::vector<std::size_t> targets(n);
        for (std::size_t i = 0; i < n; i++) {
            targets[i] = lay.rail(i, rail_b);
        }
        c.controlled_permutation(controls, targets, copy_map);
    }
}

inline void add_slot_swaps(GateCircuit &c, const MomentCircuitLayout &lay) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(lay.m); j++) {
        for (bool rail_b : {false, true}) {
            c.controlled_swap({lay.primary(), lay.aux(j, rail_b)}, lay.rail(2 * j, rail_b),
                              lay.rail(2 * j + 1, rail_b));
        }
    }
}

}  // namespace detail

/// Full superposition circuit for Tr((rho rho~)^m) / 4^m. Each auxiliary
/// ancilla becomes |-> on the primary's |1> branch, which supplies the minus
/// signs of the single-swap terms.
inline GateCircuit full_moment_circuit(int m, std::size_t copy_width = 2) {
    detail::check_moment(m);
    MomentCircuitLayout lay{m, copy_width, false};
    GateCircuit c(lay.num_qubits(), lay.primary());
    c.hadamard(lay.primary()).chi_phase(lay.primary());
    for (std::size_t j = 0; j < static_cast<std::size_t>(m); j++) {
        for (bool rail_b : {false, true}) {
            c.hadamard(lay.aux(j, rail_b)).controlled_z(lay.primary(), lay.aux(j, rail_b));
        }
    }
    detail::add_rail_permutation(c, lay, {lay.primary()}, detail::base_cycle(m));
    detail::add_slot_swaps(c, lay);
    c.hadamard(lay.primary());
    return c;
}

enum class CircuitMode { analytic, gate_level };

/// Signed visibility Tr((rho rho~)^m) / 4^m; phi is 0 or pi.
inline VisibilityEstimate full_circuit_visibility(int m, const State &state, CircuitMode mode) {
    detail::check_moment(m);
    DensityMatrix rho = as_density(state);
    cplx t;
    if (mode == CircuitMode::analytic) {
        t = moment_from_terms(m, rho) * moment_prefactor(m);
    } else {
        if (rho.dims() != Dims{2, 2}) {
            throw InvalidInput("full_circuit_visibility: needs a two-qubit state");
        }
        GateCircuit c = full_moment_circuit(m);
        Ensemble one = ensemble_of(state);
        check_simulation_budget(std::pow(static_cast<double>(one.members.size()), 2 * m), c.num_qubits());
        Ensemble in = tensor_power(one, 2 * static_cast<std::size_t>(m));
        double re = 2 * simulate_gate_circuit(c, in, 0.0) - 1;
        double im = 2 * simulate_gate_circuit(c, in, std::numbers::pi / 2) - 1;
        t = cplx(re, im);
    }
    VisibilityEstimate out;
    out.trace = t;
    out.v = std::abs(t.real());
    out.phi = t.real() >= 0 ? 0.0 : std::numbers::pi;
    return out;
}

struct MomentEstimate {
    double value = 0;
    double stderr_ = 0;
};

namespace detail {

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
    return Rng::for_trial(seed, index).next_u64();
}

}  // namespace detail

/// Samples the full circuit's fringe and rescales by 4^m.
inline MomentEstimate full_circuit_estimate(int m, const DensityMatrix &rho, std::uint64_t shots_per_point,
                                            const std::vector<double> &chis, std::uint64_t seed) {
    double scale = 1.0 / moment_prefactor(m);
    cplx t = moment_from_terms(m, rho) * moment_prefactor(m);
    auto p0 = [t](double chi) { return intensity_from_trace(t, chi).p0; };
    if (shots_per_point == 0) {
        auto est = fit_fringe(exact_fringe(p0, chis));
        return {scale * est.trace.real(), 0.0};
    }
    auto est = fit_fringe(sample_fringe(p0, chis, shots_per_point, seed));
    return {scale * est.trace.real(), scale * *est.stderr_re};
}

/// Each term's un-controlled permutation circuit is run at full visibility
/// and the signs are applied classically. shots_per_point = 0 gives the
/// exact signed sum.
inline MomentEstimate per_term_estimate(int m, const DensityMatrix &rho, std::uint64_t shots_per_point,
                                        const std::vector<double> &chis, std::uint64_t seed) {
    auto terms = enumerate_terms(m);
    if (shots_per_point == 0) {
        return {moment_from_terms(m, rho), 0.0};
    }
    double value = 0, var = 0;
    for (std::size_t k = 0; k < terms.size(); k++) {
        cplx t = eval_term(terms[k], rho);
        auto p0 = [t](double chi) { return intensity_from_trace(t, chi).p0; };
        auto est = fit_fringe(sample_fringe(p0, chis, shots_per_point, detail::sub_seed(seed, k)));
        value += terms[k].sign * est.trace.real();
        var += *est.stderr_re * *est.stderr_re;
    }
    return {value, std::sqrt(var)};
}

enum class SamplingMode { full_circuit, per_term };

/// All four moments from sampled fringes; moment m uses sub-seed m.
inline MomentSet sampled_moments(const DensityMatrix &rho, SamplingMode mode, std::uint64_t shots_per_point,
                                 const std::vector<double> &chis, std::uint64_t seed) {
    MomentSet out;
    out.source = MomentSet::Source::sampled;
    std::array<double, 4> se{};
    for (int m = 1; m <= kMaxMoment; m++) {
        std::uint64_t s = detail::sub_seed(seed, static_cast<std::uint64_t>(m));
        MomentEstimate e = mode == SamplingMode::full_circuit ? full_circuit_estimate(m, rho, shots_per_point, chis, s)
                                                             : per_term_estimate(m, rho, shots_per_point, chis, s);
        out.p[static_cast<std::size_t>(m - 1)] = e.value;
        se[static_cast<std::size_t>(m - 1)] = e.stderr_;
    }
    out.stderr_ = se;
    return out;
}

struct CopyBudget {
    std::size_t copies_per_run = 0;
    std::size_t runs = 0;
    /// copies used by each distinct circuit
    std::vector<std::size_t> per_circuit;
};

inline CopyBudget moment_copy_budget(int m) {
    detail::check_moment(m);
    std::size_t c = 2 * static_cast<std::size_t>(m);
    return {c, 1, {c}};
}

/// Methods: concurrence_moments_full, tangle3_method1, tangle3_naive_tau_sq,
/// combined_purities.
inline CopyBudget copy_budget(std::string_view method) {
    if (method == "concurrence_moments_full") {
        return {20, 4, {2, 4, 6, 8}};
    }
    if (method == "tangle3_method1") {
        return {22, 5, {2, 4, 6, 8, 2}};
    }
    if (method == "tangle3_naive_tau_sq") {
        return {4, 1, {4}};
    }
    if (method == "combined_purities") {
        return {2, 1, {2}};
    }
    throw InvalidInput("unknown copy-budget method '" + std::string(method) + "'");
}

/// CSV `moment,config_bits,sign,value`; the value column is the real part.
inline std::string term_table_csv(int m, const DensityMatrix &rho) {
    std::string out = "moment,config_bits,sign,value\n";
    char buf[128];
    for (const auto &t : enumerate_terms(m)) {
        std::snprintf(buf, sizeof buf, "%d,%s,%+d,%.17g\n", m, t.config_bits().c_str(), t.sign,
                      eval_term(t, rho).real());
        out += buf;
    }
    return out;
}

}  // namespace qtangle
