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

// Statevector simulation of small ancilla-controlled circuits.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtangle/errors.hpp"
#include "qtangle/linalg.hpp"
#include "qtangle/states.hpp"

namespace qtangle {

inline constexpr std::size_t kMaxSimQubits = 26;

struct Gate {
    enum class Kind { hadamard, pauli_x, phase, chi_phase, controlled_z, swap, controlled_permutation, controlled_unitary };

    Kind kind = Kind::hadamard;
    std::vector<std::size_t> controls = {};
    std::vector<std::size_t> targets = {};
    double angle = 0;
    // controlled_permutation: new_bit[targets[j]] = old_bit[targets[source[j]]]
    std::vector<std::size_t> source = {};
    CMatrix unitary = {};
};

/// Ordered gate list on `n_qubits` qubits. Qubit 0 is the most significant
/// bit of a basis index.
class GateCircuit {
   public:
    explicit GateCircuit(std::size_t n_qubits, std::size_t measured = 0) : n_(n_qubits), measured_(measured) {
        if (n_qubits == 0) {
            throw InvalidInput("GateCircuit: needs at least one qubit");
        }
        check_index(measured);
    }

    std::size_t num_qubits() const noexcept {
        return n_;
    }
    std::size_t measured() const noexcept {
        return measured_;
    }
    const std::vector<Gate> &gates() const noexcept {
        return gates_;
    }

    GateCircuit &hadamard(std::size_t q) {
        return push({Gate::Kind::hadamard, {}, {q}});
    }
    GateCircuit &pauli_x(std::size_t q) {
        return push({Gate::Kind::pauli_x, {}, {q}});
    }
    /// diag(1, e^{i theta})
    GateCircuit &phase(std::size_t q, double theta) {
        Gate g{Gate::Kind::phase, {}, {q}};
        g.angle = theta;
        return push(std::move(g));
    }
    /// diag(e^{i chi}, 1) with chi supplied at simulation time.
    GateCircuit &chi_phase(std::size_t q) {
        return push({Gate::Kind::chi_phase, {}, {q}});
    }
    GateCircuit &controlled_z(std::size_t c, std::size_t q) {
        return push({Gate::Kind::controlled_z, {c}, {q}});
    }
    GateCircuit &swap(std::size_t a, std::size_t b) {
        return push({Gate::Kind::swap, {}, {a, b}});
    }
    GateCircuit &controlled_swap(std::vector<std::size_t> controls, std::size_t a, std::size_t b) {
        return push({Gate::Kind::swap, std::move(controls), {a, b}});
    }
    GateCircuit &controlled_permutation(std::vector<std::size_t> controls, std::vector<std::size_t> targets,
                                        std::vector<std::size_t> source) {
        Gate g{Gate::Kind::controlled_permutation, std::move(controls), std::move(targets)};
        g.source = std::move(source);
        return push(std::move(g));
    }
    GateCircuit &controlled_unitary(std::vector<std::size_t> controls, std::vector<std::size_t> targets, CMatrix u) {
        Gate g{Gate::Kind::controlled_unitary, std::move(controls), std::move(targets)};
        g.unitary = std::move(u);
        return push(std::move(g));
    }

   private:
    void check_index(std::size_t q) const {
        if (q >= n_) {
            std::ostringstream ss;
            ss << "GateCircuit: qubit " << q << " out of range for " << n_ << " qubits";
            throw InvalidInput(ss.str());
        }
    }

    GateCircuit &push(Gate g) {
        std::vector<std::size_t> all = g.controls;
        all.insert(all.end(), g.targets.begin(), g.targets.end());
        for (auto q : all) {
            check_index(q);
        }
        std::vector<std::size_t> sorted = all;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw InvalidInput("GateCircuit: a gate uses the same qubit twice");
        }
        if (g.kind == Gate::Kind::controlled_permutation) {
            std::vector<std::size_t> s = g.source;
            std::sort(s.begin(), s.end());
            bool bijection = s.size() == g.targets.size();
            for (std::size_t i = 0; bijection && i < s.size(); i++) {
                bijection = s[i] == i;
            }
            if (!bijection) {
                throw InvalidInput("GateCircuit: permutation is not a bijection on its targets");
            }
        }
        if (g.kind == Gate::Kind::controlled_unitary) {
            std::size_t dim = std::size_t{1} << g.targets.size();
            if (g.unitary.rows() != dim || g.unitary.cols() != dim) {
                throw InvalidInput("GateCircuit: unitary size does not match its targets");
            }
            if (!is_unitary(g.unitary)) {
                throw InvalidInput("GateCircuit: gate matrix is not unitary");
            }
        }
        gates_.push_back(std::move(g));
        return *this;
    }

    std::size_t n_;
    std::size_t measured_;
    std::vector<Gate> gates_;
};

/// Weighted pure states on a register; weights sum to one.
struct Ensemble {
    std::size_t n_qubits = 0;
    std::vector<std::pair<double, std::vector<cplx>>> members;
};

/// Pure states give one member; density matrices use their eigenvectors,
/// dropping weights below `cutoff`.
inline Ensemble ensemble_of(const State &state, double cutoff = 1e-14) {
    Ensemble out;
    if (const auto *p = std::get_if<PureState>(&state)) {
        out.n_qubits = p->num_qubits();
        out.members.push_back({1.0, p->amplitudes()});
        return out;
    }
    const auto &rho = std::get<DensityMatrix>(state);
    out.n_qubits = rho.num_qubits();
    HermEig eig = herm_eig(rho.matrix());
    double total = 0;
    for (std::size_t k = 0; k < eig.eigenvalues.size(); k++) {
        double w = eig.eigenvalues[k];
        if (w <= cutoff) {
            continue;
        }
        std::vector<cplx> v(rho.dim());
        for (std::size_t i = 0; i < v.size(); i++) {
            v[i] = eig.eigenvectors(i, k);
        }
        out.members.push_back({w, std::move(v)});
        total += w;
    }
    for (auto &m : out.members) {
        m.first /= total;
    }
    return out;
}

/// Tensor product a x b, with a on the leading qubits.
inline Ensemble tensor_product(const Ensemble &a, const Ensemble &b) {
    Ensemble out;
    out.n_qubits = a.n_qubits + b.n_qubits;
    for (const auto &[wa, va] : a.members) {
        for (const auto &[wb, vb] : b.members) {
            std::vector<cplx> v(va.size() * vb.size());
            for (std::size_t i = 0; i < va.size(); i++) {
                for (std::size_t j = 0; j < vb.size(); j++) {
                    v[i * vb.size() + j] = va[i] * vb[j];
                }
            }
            out.members.push_back({wa * wb, std::move(v)});
        }
    }
    return out;
}

inline Ensemble tensor_power(const Ensemble &e, std::size_t copies) {
    if (copies == 0) {
        throw InvalidInput("tensor_power: needs at least one copy");
    }
    Ensemble out = e;
    for (std::size_t k = 1; k < copies; k++) {
        out = tensor_product(out, e);
    }
    return out;
}

namespace detail {

inline std::size_t bit_of(std::size_t n, std::size_t q) {
    return std::size_t{1} << (n - 1 - q);
}

inline bool controls_set(std::size_t idx, std::size_t n, const std::vector<std::size_t> &controls) {
    for (auto c : controls) {
        if (!(idx & bit_of(n, c))) {
            return false;
        }
    }
    return true;
}

inline void apply_single(std::vector<cplx> &psi, std::size_t n, std::size_t q, const std::array<cplx, 4> &u) {
    std::size_t mask = bit_of(n, q);
    for (std::size_t i = 0; i < psi.size(); i++) {
        if (i & mask) {
            continue;
        }
        cplx a0 = psi[i];
        cplx a1 = psi[i | mask];
        psi[i] = u[0] * a0 + u[1] * a1;
        psi[i | mask] = u[2] * a0 + u[3] * a1;
    }
}

inline void apply_gate(std::vector<cplx> &psi, std::size_t n, const Gate &g, double chi) {
    using K = Gate::Kind;
    switch (g.kind) {
        case K::hadamard: {
            const double s = 1.0 / std::numbers::sqrt2;
            apply_single(psi, n, g.targets[0], {s, s, s, -s});
            return;
        }
        case K::pauli_x:
            apply_single(psi, n, g.targets[0], {0.0, 1.0, 1.0, 0.0});
            return;
        case K::phase:
            apply_single(psi, n, g.targets[0], {1.0, 0.0, 0.0, std::polar(1.0, g.angle)});
            return;
        case K::chi_phase:
            apply_single(psi, n, g.targets[0], {std::polar(1.0, chi), 0.0, 0.0, 1.0});
            return;
        case K::controlled_z: {
            std::size_t m = bit_of(n, g.controls[0]) | bit_of(n, g.targets[0]);
            for (std::size_t i = 0; i < psi.size(); i++) {
                if ((i & m) == m) {
                    psi[i] = -psi[i];
                }
            }
            return;
        }
        case K::swap: {
            std::size_t ma = bit_of(n, g.targets[0]);
            std::size_t mb = bit_of(n, g.targets[1]);
            for (std::size_t i = 0; i < psi.size(); i++) {
                if ((i & ma) && !(i & mb) && controls_set(i, n, g.controls)) {
                    std::swap(psi[i], psi[(i & ~ma) | mb]);
                }
            }
            return;
        }
        case K::controlled_permutation: {
            std::vector<cplx> out = psi;
            std::size_t k = g.targets.size();
            std::size_t target_mask = 0;
            for (auto t : g.targets) {
                target_mask |= bit_of(n, t);
            }
            for (std::size_t i = 0; i < psi.size(); i++) {
                if (!controls_set(i, n, g.controls)) {
                    continue;
                }
                std::size_t j = i & ~target_mask;
                for (std::size_t t = 0; t < k; t++) {
                    if (i & bit_of(n, g.targets[g.source[t]])) {
                        j |= bit_of(n, g.targets[t]);
                    }
                }
                out[j] = psi[i];
            }
            psi = std::move(out);
            return;
        }
        case K::controlled_unitary: {
            std::size_t k = g.targets.size();
            std::size_t dim = std::size_t{1} << k;
            std::size_t target_mask = 0;
            std::vector<std::size_t> offsets(dim, 0);
            for (std::size_t t = 0; t < k; t++) {
                target_mask |= bit_of(n, g.targets[t]);
            }
            for (std::size_t r = 0; r < dim; r++) {
                for (std::size_t t = 0; t < k; t++) {
                    if (r & (std::size_t{1} << (k - 1 - t))) {
                        offsets[r] |= bit_of(n, g.targets[t]);
                    }
                }
            }
            std::vector<cplx> in(dim);
            for (std::size_t i = 0; i < psi.size(); i++) {
                if ((i & target_mask) || !controls_set(i, n, g.controls)) {
                    continue;
                }
                for (std::size_t r = 0; r < dim; r++) {
                    in[r] = psi[i | offsets[r]];
                }
                for (std::size_t r = 0; r < dim; r++) {
                    cplx acc = 0;
                    for (std::size_t c = 0; c < dim; c++) {
                        acc += g.unitary(r, c) * in[c];
                    }
                    psi[i | offsets[r]] = acc;
                }
            }
            return;
        }
    }
}

}  // namespace detail

/// Mixed inputs cost one statevector run per ensemble member; the total may
/// not exceed one run at the qubit limit.
inline void check_simulation_budget(double runs, std::size_t n_qubits) {
    double work = runs * std::ldexp(1.0, static_cast<int>(n_qubits));
    if (n_qubits > kMaxSimQubits || work > std::ldexp(1.0, static_cast<int>(kMaxSimQubits))) {
        std::ostringstream ss;
        ss << "simulation needs " << runs << " runs of " << n_qubits << " qubits, above the budget of one "
           << kMaxSimQubits << "-qubit run";
        throw SizeLimitExceeded(ss.str());
    }
}

/// Runs the circuit on |0...0> (leading ancilla qubits) x `system`.
inline std::vector<cplx> run_circuit(const GateCircuit &circ, const std::vector<cplx> &system, double chi) {
    std::size_t n = circ.num_qubits();
    if (n > kMaxSimQubits) {
        std::ostringstream ss;
        ss << "simulation needs " << n << " qubits, limit is " << kMaxSimQubits;
        throw SizeLimitExceeded(ss.str());
    }
    std::size_t dim = std::size_t{1} << n;
    if (system.empty() || dim % system.size() != 0) {
        throw InvalidInput("run_circuit: system register does not fit the circuit");
    }
    std::vector<cplx> psi(dim);
    std::copy(system.begin(), system.end(), psi.begin());
    for (const auto &g : circ.gates()) {
        detail::apply_gate(psi, n, g, chi);
    }
    return psi;
}

/// P(qubit q = 0) for each requested qubit, averaged over the ensemble.
inline std::vector<double> zero_probabilities(const GateCircuit &circ, const Ensemble &system, double chi,
                                              const std::vector<std::size_t> &qubits) {
    std::size_t n = circ.num_qubits();
    if (system.n_qubits > n) {
        throw InvalidInput("zero_probabilities: system register larger than the circuit");
    }
    if (n > kMaxSimQubits) {
        std::ostringstream ss;
        ss << "simulation needs " << n << " qubits, limit is " << kMaxSimQubits;
        throw SizeLimitExceeded(ss.str());
    }
    check_simulation_budget(system.members.size(), n);
    std::vector<double> out(qubits.size(), 0.0);
    for (const auto &[w, amps] : system.members) {
        auto psi = run_circuit(circ, amps, chi);
        for (std::size_t k = 0; k < qubits.size(); k++) {
            std::size_t mask = detail::bit_of(n, qubits[k]);
            double p = 0;
            for (std::size_t i = 0; i < psi.size(); i++) {
                if (!(i & mask)) {
                    p += std::norm(psi[i]);
                }
            }
            out[k] += w * p;
        }
    }
    return out;
}

/// P(measured qubit = 0): exact for pure inputs, the weighted sum over
/// ensemble members otherwise.
inline double simulate_gate_circuit(const GateCircuit &circ, const Ensemble &system, double chi) {
    return zero_probabilities(circ, system, chi, {circ.measured()})[0];
}

inline double simulate_gate_circuit(const GateCircuit &circ, const State &system, double chi) {
    return simulate_gate_circuit(circ, ensemble_of(system), chi);
}

}  // namespace qtangle
