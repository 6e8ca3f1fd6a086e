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

// Validated quantum states, the named test corpus and random generators.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qtangle/linalg.hpp"
#include "qtangle/rng.hpp"

namespace qtangle {

inline constexpr double kStateTolerance = 1e-10;
inline constexpr std::size_t kMaxStateQubits = 4;

namespace detail {

inline void check_dims(const Dims &dims, std::size_t size) {
    if (dims.empty() || dims.size() > kMaxStateQubits) {
        std::ostringstream ss;
        ss << "state has " << dims.size() << " subsystems; supported range is 1.." << kMaxStateQubits;
        throw InvalidInput(ss.str());
    }
    for (auto d : dims) {
        if (d != 2) {
            throw InvalidInput("only qubit subsystems (dimension 2) are supported");
        }
    }
    if (product(dims) != size) {
        std::ostringstream ss;
        ss << "size mismatch: dims multiply to " << product(dims) << " but data has size " << size;
        throw InvalidInput(ss.str());
    }
}

}  // namespace detail

class DensityMatrix {
   public:
    /// Checks size, Hermiticity, unit trace and positivity, in that order.
    static DensityMatrix validate(CMatrix mat, Dims dims) {
        if (!mat.is_square()) {
            throw InvalidInput("density matrix is not square");
        }
        detail::check_dims(dims, mat.rows());
        double defect = hermiticity_defect(mat);
        if (defect > kStateTolerance) {
            std::ostringstream ss;
            ss << "non-Hermitian: max |rho - rho^dagger| = " << defect;
            throw InvalidInput(ss.str());
        }
        cplx tr = mat.trace();
        if (std::abs(tr - 1.0) > kStateTolerance) {
            std::ostringstream ss;
            ss << "trace != 1: |Tr rho - 1| = " << std::abs(tr - 1.0);
            throw InvalidInput(ss.str());
        }
        double lowest = herm_eigenvalues(mat).back();
        if (lowest < -kStateTolerance) {
            std::ostringstream ss;
            ss << "negative eigenvalue: lambda_min = " << lowest;
            throw InvalidInput(ss.str());
        }
        return DensityMatrix(std::move(mat), std::move(dims));
    }

    const CMatrix &matrix() const noexcept {
        return mat_;
    }
    const Dims &dims() const noexcept {
        return dims_;
    }
    std::size_t dim() const noexcept {
        return mat_.rows();
    }
    std::size_t num_qubits() const noexcept {
        return dims_.size();
    }

    /// Reduced state on the listed subsystems.
    DensityMatrix reduce(std::vector<std::size_t> keep) const {
        Dims kept;
        std::sort(keep.begin(), keep.end());
        for (auto k : keep) {
            if (k >= dims_.size()) {
                throw InvalidInput("reduce: subsystem index out of range");
            }
            kept.push_back(dims_[k]);
        }
        return DensityMatrix(partial_trace(mat_, dims_, keep), kept);
    }

    double purity() const {
        double p = 0;
        for (const auto &z : mat_.data()) {
            p += std::norm(z);
        }
        return p;
    }

   private:
    DensityMatrix(CMatrix mat, Dims dims) : mat_(std::move(mat)), dims_(std::move(dims)) {
    }

    CMatrix mat_;
    Dims dims_;
};

class PureState {
   public:
    static PureState validate(std::vector<cplx> amps, Dims dims) {
        detail::check_dims(dims, amps.size());
        double n2 = 0;
        for (const auto &z : amps) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw InvalidInput("pure state has a non-finite amplitude");
            }
            n2 += std::norm(z);
        }
        double err = std::abs(std::sqrt(n2) - 1.0);
        if (err > kStateTolerance) {
            std::ostringstream ss;
            ss << "norm != 1: | ||psi|| - 1 | = " << err;
            throw InvalidInput(ss.str());
        }
        return PureState(std::move(amps), std::move(dims));
    }

    /// Normalizes before validating; rejects the zero vector.
    static PureState normalized(std::vector<cplx> amps, Dims dims) {
        double n2 = 0;
        for (const auto &z : amps) {
            n2 += std::norm(z);
        }
        if (!(n2 > 0)) {
            throw InvalidInput("cannot normalize a zero vector");
        }
        double inv = 1.0 / std::sqrt(n2);
        for (auto &z : amps) {
            z *= inv;
        }
        return validate(std::move(amps), std::move(dims));
    }

    const std::vector<cplx> &amplitudes() const noexcept {
        return amps_;
    }
    const Dims &dims() const noexcept {
        return dims_;
    }
    std::size_t num_qubits() const noexcept {
        return dims_.size();
    }

    DensityMatrix density() const {
        return DensityMatrix::validate(CMatrix::outer(amps_, amps_), dims_);
    }

   private:
    PureState(std::vector<cplx> amps, Dims dims) : amps_(std::move(amps)), dims_(std::move(dims)) {
    }

    std::vector<cplx> amps_;
    Dims dims_;
};

using State = std::variant<DensityMatrix, PureState>;

inline DensityMatrix as_density(const State &s) {
    if (const auto *p = std::get_if<PureState>(&s)) {
        return p->density();
    }
    return std::get<DensityMatrix>(s);
}

inline Dims qubit_dims(std::size_t n) {
    return Dims(n, 2);
}

/// Canonical states: bell_phi_plus, product00, ghz3, w3 (pure);
/// werner(p), max_mixed (mixed, two qubits).
inline State make_named(std::string_view name, std::optional<double> param = std::nullopt) {
    const double s2 = std::sqrt(0.5);
    if (name == "bell_phi_plus") {
        return PureState::validate({s2, 0, 0, s2}, qubit_dims(2));
    }
    if (name == "product00") {
        return PureState::validate({1, 0, 0, 0}, qubit_dims(2));
    }
    if (name == "ghz3") {
        std::vector<cplx> a(8);
        a[0] = s2;
        a[7] = s2;
        return PureState::validate(std::move(a), qubit_dims(3));
    }
    if (name == "w3") {
        std::vector<cplx> a(8);
        const double s3 = 1.0 / std::sqrt(3.0);
        a[1] = s3;
        a[2] = s3;
        a[4] = s3;
        return PureState::validate(std::move(a), qubit_dims(3));
    }
    if (name == "max_mixed") {
        return DensityMatrix::validate(CMatrix::identity(4) * cplx(0.25), qubit_dims(2));
    }
    if (name == "werner") {
        if (!param) {
            throw InvalidInput("werner state needs a mixing parameter p");
        }
        double p = *param;
        if (!(p >= 0 && p <= 1)) {
            std::ostringstream ss;
            ss << "werner parameter p = " << p << " outside [0, 1]";
            throw InvalidInput(ss.str());
        }
        std::vector<cplx> bell{s2, 0, 0, s2};
        CMatrix m = CMatrix::outer(bell, bell) * cplx(p) + CMatrix::identity(4) * cplx((1 - p) / 4);
        return DensityMatrix::validate(std::move(m), qubit_dims(2));
    }
    throw InvalidInput("unknown named state '" + std::string(name) + "'");
}

/// Haar-random pure state of `n_qubits` qubits.
inline PureState random_pure(std::size_t n_qubits, Rng &rng) {
    if (n_qubits < 1 || n_qubits > kMaxStateQubits) {
        throw InvalidInput("random_pure: qubit count must be in 1..4");
    }
    std::vector<cplx> a(std::size_t{1} << n_qubits);
    for (auto &z : a) {
        z = rng.complex_normal();
    }
    return PureState::normalized(std::move(a), qubit_dims(n_qubits));
}

inline PureState random_pure(std::size_t n_qubits, std::uint64_t seed) {
    Rng rng(seed);
    return random_pure(n_qubits, rng);
}

/// rho = G G^dagger / Tr(G G^dagger) with G a 2^n x rank complex Gaussian matrix.
inline DensityMatrix random_mixed(std::size_t n_qubits, std::size_t rank, Rng &rng) {
    if (n_qubits < 1 || n_qubits > kMaxStateQubits) {
        throw InvalidInput("random_mixed: qubit count must be in 1..4");
    }
    std::size_t d = std::size_t{1} << n_qubits;
    if (rank < 1 || rank > d) {
        std::ostringstream ss;
        ss << "random_mixed: rank " << rank << " outside 1.." << d;
        throw InvalidInput(ss.str());
    }
    CMatrix g(d, rank);
    for (std::size_t i = 0; i < d; i++) {
        for (std::size_t j = 0; j < rank; j++) {
            g(i, j) = rng.complex_normal();
        }
    }
    CMatrix rho = g * g.adjoint();
    rho *= cplx(1.0 / rho.trace().real());
    // Remove rounding asymmetry so the result is exactly Hermitian.
    CMatrix herm = (rho + rho.adjoint()) * cplx(0.5);
    return DensityMatrix::validate(std::move(herm), qubit_dims(n_qubits));
}

inline DensityMatrix random_mixed(std::size_t n_qubits, std::size_t rank, std::uint64_t seed) {
    Rng rng(seed);
    return random_mixed(n_qubits, rank, rng);
}

/// Haar-random d x d unitary: Gram-Schmidt on a complex Gaussian matrix.
inline CMatrix random_unitary(std::size_t d, Rng &rng) {
    if (d < 1) {
        throw InvalidInput("random_unitary: dimension must be positive");
    }
    CMatrix u(d, d);
    for (std::size_t j = 0; j < d; j++) {
        std::vector<cplx> col(d);
        for (auto &z : col) {
            z = rng.complex_normal();
        }
        for (std::size_t k = 0; k < j; k++) {
            cplx dot = 0;
            for (std::size_t i = 0; i < d; i++) {
                dot += std::conj(u(i, k)) * col[i];
            }
            for (std::size_t i = 0; i < d; i++) {
                col[i] -= dot * u(i, k);
            }
        }
        double norm = 0;
        for (const auto &z : col) {
            norm += std::norm(z);
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < d; i++) {
            u(i, j) = col[i] / norm;
        }
    }
    return u;
}

}  // namespace qtangle
