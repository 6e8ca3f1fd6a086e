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

// The Wootters spin flip of a two-qubit state, written both as the conjugation
// (sy x sy) rho^T (sy x sy) and as the four-term sum
//   rho - 1 x rho_B - rho_A x 1 + 1,
// together with moments of rho rho~ and the concurrence itself.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "qtangle/linalg.hpp"
#include "qtangle/moments.hpp"
#include "qtangle/states.hpp"

namespace qtangle {

struct SpinFlipConstants {
    /// epsilon = ((0, 1), (-1, 0))
    static CMatrix epsilon() {
        return CMatrix::from_rows({{0, 1}, {-1, 0}});
    }
    /// sigma_y = i * epsilon
    static CMatrix sigma_y() {
        return epsilon() * cplx(0, 1);
    }
    static CMatrix sigma_y_sigma_y() {
        return kron(sigma_y(), sigma_y());
    }
};

namespace detail {

inline void require_two_qubit(const DensityMatrix &rho, const char *op) {
    if (rho.dims() != Dims{2, 2}) {
        throw InvalidInput(std::string(op) + ": expected a two-qubit state");
    }
}

}  // namespace detail

inline CMatrix spin_flip_direct(const DensityMatrix &rho) {
    detail::require_two_qubit(rho, "spin_flip_direct");
    CMatrix yy = SpinFlipConstants::sigma_y_sigma_y();
    return yy * rho.matrix().transpose() * yy;
}

inline CMatrix spin_flip_sum(const DensityMatrix &rho) {
    detail::require_two_qubit(rho, "spin_flip_sum");
    CMatrix id2 = CMatrix::identity(2);
    CMatrix rho_a = partial_trace(rho.matrix(), rho.dims(), {0});
    CMatrix rho_b = partial_trace(rho.matrix(), rho.dims(), {1});
    return rho.matrix() - kron(id2, rho_b) - kron(rho_a, id2) + CMatrix::identity(4);
}

/// rho rho~ expanded as rho^2 - rho (1 x rho_B) - rho (rho_A x 1) + rho.
inline CMatrix rho_rhotilde(const DensityMatrix &rho) {
    detail::require_two_qubit(rho, "rho_rhotilde");
    CMatrix id2 = CMatrix::identity(2);
    const CMatrix &r = rho.matrix();
    CMatrix rho_a = partial_trace(r, rho.dims(), {0});
    CMatrix rho_b = partial_trace(r, rho.dims(), {1});
    return r * r - r * kron(id2, rho_b) - r * kron(rho_a, id2) + r;
}

/// Tr(rho rho~) = Tr rho^2 - Tr rho_A^2 - Tr rho_B^2 + 1.
inline double first_moment_closed_form(const DensityMatrix &rho) {
    detail::require_two_qubit(rho, "first_moment_closed_form");
    return rho.purity() - rho.reduce({0}).purity() - rho.reduce({1}).purity() + 1.0;
}

/// p_m = Tr((rho rho~)^m), m = 1..4, by repeated multiplication.
inline MomentSet moments_direct(const DensityMatrix &rho) {
    detail::require_two_qubit(rho, "moments_direct");
    // Same sum form as rho_rhotilde, in long double. The products cancel down
    // to the size of rho rho~ for nearly pure states, and extended precision
    // keeps the zero eigenvalues of low-rank states near zero.
    using lcplx = std::complex<long double>;
    using M4 = std::array<std::array<lcplx, 4>, 4>;
    auto mul = [](const M4 &x, const M4 &y) {
        M4 out{};
        for (std::size_t i = 0; i < 4; i++) {
            for (std::size_t k = 0; k < 4; k++) {
                for (std::size_t j = 0; j < 4; j++) {
                    out[i][j] += x[i][k] * y[k][j];
                }
            }
        }
        return out;
    };
    auto widen = [](const CMatrix &m) {
        M4 out{};
        for (std::size_t i = 0; i < 4; i++) {
            for (std::size_t j = 0; j < 4; j++) {
                out[i][j] = lcplx(m(i, j).real(), m(i, j).imag());
            }
        }
        return out;
    };
    const CMatrix &r = rho.matrix();
    CMatrix id2 = CMatrix::identity(2);
    M4 w = widen(r);
    M4 wb = widen(kron(id2, partial_trace(r, rho.dims(), {1})));
    M4 wa = widen(kron(partial_trace(r, rho.dims(), {0}), id2));
    M4 ww = mul(w, w), wwb = mul(w, wb), wwa = mul(w, wa);
    M4 prod{};
    for (std::size_t i = 0; i < 4; i++) {
        for (std::size_t j = 0; j < 4; j++) {
            prod[i][j] = ww[i][j] - wwb[i][j] - wwa[i][j] + w[i][j];
        }
    }
    M4 power = prod;
    MomentSet out;
    for (std::size_t k = 0; k < 4; k++) {
        if (k > 0) {
            power = mul(power, prod);
        }
        long double tr = 0;
        for (std::size_t i = 0; i < 4; i++) {
            tr += power[i][i].real();
        }
        out.p[k] = static_cast<double>(tr);
    }
    return out;
}

struct ConcurrenceSpectrum {
    std::array<double, 4> lambdas{};  // descending
    std::array<double, 4> etas{};     // descending, etas[i] = lambdas[i]^2
};

struct ConcurrenceResult {
    double concurrence = 0;
    ConcurrenceSpectrum spectrum;
};

inline constexpr double kEtaClamp = 1e-9;

/// Concurrence max(l1 - l2 - l3 - l4, 0).
///
/// With F = sqrt(rho), the eigenvalues of rho rho~ are those of the Hermitian
/// F rho~ F, and they are the squared singular values of the complex symmetric
/// B = F^T (sy x sy) F. The lambdas are read off as the positive eigenvalues of
/// the Hermitian dilation [[0, B], [B^dagger, 0]] so that vanishing lambdas
/// come out at rounding level rather than at its square root. The eta values
/// from F rho~ F are still checked for negativity.
inline ConcurrenceResult wootters_concurrence(const DensityMatrix &rho) {
    detail::require_two_qubit(rho, "wootters_concurrence");
    CMatrix f = psd_sqrt(rho.matrix());

    std::vector<double> eta_check = herm_eigenvalues(f * spin_flip_direct(rho) * f);
    if (eta_check.back() < -kEtaClamp) {
        std::ostringstream ss;
        ss << "wootters_concurrence: eigenvalue of rho rho~ is " << eta_check.back() << " < -1e-9";
        throw NumericalFailure(ss.str());
    }

    CMatrix b = f.transpose() * SpinFlipConstants::sigma_y_sigma_y() * f;
    CMatrix dilation(8, 8);
    for (std::size_t i = 0; i < 4; i++) {
        for (std::size_t j = 0; j < 4; j++) {
            dilation(i, 4 + j) = b(i, j);
            dilation(4 + j, i) = std::conj(b(i, j));
        }
    }
    std::vector<double> sv = herm_eigenvalues(dilation);

    ConcurrenceResult out;
    for (std::size_t k = 0; k < 4; k++) {
        double l = std::max(sv[k], 0.0);
        out.spectrum.lambdas[k] = l;
        out.spectrum.etas[k] = l * l;
    }
    const auto &l = out.spectrum.lambdas;
    out.concurrence = std::max(l[0] - l[1] - l[2] - l[3], 0.0);
    return out;
}

/// Spectrum (descending) of mu rho + nu rho rho~, the operator an SPA-based
/// measurement would see. Computed from the similar Hermitian matrix
/// sqrt(rho) (mu + nu rho~) sqrt(rho) = mu rho + nu sqrt(rho) rho~ sqrt(rho).
inline std::vector<double> spa_spectrum(const DensityMatrix &rho, double mu, double nu) {
    detail::require_two_qubit(rho, "spa_spectrum");
    if (!(mu > nu && nu >= 0)) {
        std::ostringstream ss;
        ss << "spa_spectrum: need mu > nu >= 0, got mu = " << mu << ", nu = " << nu;
        throw InvalidInput(ss.str());
    }
    CMatrix f = psd_sqrt(rho.matrix());
    CMatrix op = rho.matrix() * cplx(mu) + (f * spin_flip_direct(rho) * f) * cplx(nu);
    // Products of Hermitian factors are Hermitian only up to rounding.
    op = (op + op.adjoint()) * cplx(0.5);
    return herm_eigenvalues(op);
}

}  // namespace qtangle
