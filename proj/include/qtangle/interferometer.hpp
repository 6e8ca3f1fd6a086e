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

// Interferometer intensity law, fringe sampling and the fringe fit.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtangle/errors.hpp"
#include "qtangle/gate_circuit.hpp"
#include "qtangle/linalg.hpp"
#include "qtangle/rng.hpp"
#include "qtangle/states.hpp"

namespace qtangle {

/// Convex mixture of unitaries, sum_k p_k U_k . U_k^dagger.
class MixedUnitaryChannel {
   public:
    struct Term {
        double weight;
        CMatrix unitary;
    };

    static MixedUnitaryChannel validate(std::vector<Term> terms) {
        if (terms.empty()) {
            throw InvalidInput("channel: needs at least one term");
        }
        double total = 0;
        std::size_t dim = terms.front().unitary.rows();
        for (const auto &t : terms) {
            if (!(t.weight >= 0) || !std::isfinite(t.weight)) {
                throw InvalidInput("channel: weights must be finite and non-negative");
            }
            if (t.unitary.rows() != dim || t.unitary.cols() != dim) {
                throw InvalidInput("channel: unitaries must share one square size");
            }
            if (!is_unitary(t.unitary)) {
                throw InvalidInput("channel: term is not unitary within 1e-10");
            }
            total += t.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            std::ostringstream ss;
            ss << "channel: weights sum to " << total << ", not 1";
            throw InvalidInput(ss.str());
        }
        return MixedUnitaryChannel(std::move(terms));
    }

    static MixedUnitaryChannel single(CMatrix u) {
        return validate({{1.0, std::move(u)}});
    }

    const std::vector<Term> &terms() const noexcept {
        return terms_;
    }
    std::size_t dim() const noexcept {
        return terms_.front().unitary.rows();
    }
    /// sum_k p_k U_k
    CMatrix average() const {
        CMatrix out(dim(), dim());
        for (const auto &t : terms_) {
            out = out + t.unitary * cplx(t.weight);
        }
        return out;
    }

   private:
    explicit MixedUnitaryChannel(std::vector<Term> terms) : terms_(std::move(terms)) {
    }
    std::vector<Term> terms_;
};

struct PhaseSetting {
    double chi = 0;

    explicit PhaseSetting(double c = 0) : chi(c) {
        if (!std::isfinite(c)) {
            throw InvalidInput("phase setting must be finite");
        }
    }
};

struct VisibilityEstimate {
    double v = 0;
    double phi = 0;
    std::optional<double> stderr_v;
    /// v e^{i phi}
    cplx trace;
    std::optional<double> stderr_re;
    std::optional<double> stderr_im;
};

struct Intensity {
    double p0 = 0;
    VisibilityEstimate visibility;
};

/// Fringe parameters for a known value of Tr(U rho).
inline Intensity intensity_from_trace(cplx t, double chi) {
    Intensity out;
    out.p0 = 0.5 * (1.0 + (std::polar(1.0, -chi) * t).real());
    out.visibility.trace = t;
    out.visibility.v = std::abs(t);
    out.visibility.phi = std::arg(t);
    return out;
}

/// P(primary = 0) = (1 + Re(e^{-i chi} Tr(sum_k p_k U_k rho))) / 2.
inline Intensity intensity_analytic(const MixedUnitaryChannel &channel, const DensityMatrix &rho,
                                    PhaseSetting chi) {
    if (channel.dim() != rho.dim()) {
        std::ostringstream ss;
        ss << "intensity_analytic: channel acts on dimension " << channel.dim() << ", state has " << rho.dim();
        throw InvalidInput(ss.str());
    }
    return intensity_from_trace((channel.average() * rho.matrix()).trace(), chi.chi);
}

/// Primary qubit 0 (Hadamard, chi phase on |0>, controlled-U, Hadamard)
/// followed by the system register.
inline GateCircuit fig1_circuit(const CMatrix &u) {
    std::size_t dim = u.rows();
    std::size_t k = 0;
    while ((std::size_t{1} << k) < dim) {
        k++;
    }
    if ((std::size_t{1} << k) != dim) {
        throw InvalidInput("fig1_circuit: unitary size must be a power of two");
    }
    GateCircuit c(k + 1, 0);
    std::vector<std::size_t> targets(k);
    for (std::size_t i = 0; i < k; i++) {
        targets[i] = i + 1;
    }
    c.hadamard(0).chi_phase(0).controlled_unitary({0}, targets, u).hadamard(0);
    return c;
}

/// Gate-level P(0) for a channel: each unitary is simulated separately and
/// the results are weighted.
inline double simulate_channel(const MixedUnitaryChannel &channel, const Ensemble &system, double chi) {
    if (std::size_t{1} << system.n_qubits != channel.dim()) {
        throw InvalidInput("simulate_channel: channel dimension does not match the state");
    }
    double p = 0;
    for (const auto &t : channel.terms()) {
        p += t.weight * simulate_gate_circuit(fig1_circuit(t.unitary), system, chi);
    }
    return p;
}

struct FringePoint {
    double chi = 0;
    double p0 = 0;
    /// 0 marks an exact (noise-free) probability.
    std::uint64_t shots = 0;
};

struct FringeScan {
    std::vector<FringePoint> points;
};

/// n equispaced phases 2 pi k / n.
inline std::vector<double> chi_grid(std::size_t n) {
    if (n < 3) {
        throw InvalidInput("chi grid needs at least 3 points");
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; k++) {
        out[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    }
    return out;
}

using ProbabilityFn = std::function<double(double chi)>;

inline FringeScan exact_fringe(const ProbabilityFn &p0, const std::vector<double> &chis) {
    FringeScan scan;
    for (double chi : chis) {
        scan.points.push_back({chi, p0(chi), 0});
    }
    return scan;
}

/// Binomial counts at the exact probability of each phase. One generator
/// seeded with `seed` is consumed point by point.
inline FringeScan sample_fringe(const ProbabilityFn &p0, const std::vector<double> &chis, std::uint64_t shots,
                                std::uint64_t seed) {
    if (shots < 1) {
        throw InvalidInput("sample_fringe: shots must be at least 1");
    }
    Rng rng(seed);
    FringeScan scan;
    for (double chi : chis) {
        double p = std::clamp(p0(chi), 0.0, 1.0);
        std::uint64_t k = rng.binomial(shots, p);
        scan.points.push_back({chi, static_cast<double>(k) / static_cast<double>(shots), shots});
    }
    return scan;
}

/// Least-squares fit of p0 = a + b cos chi + c sin chi. Then Tr(U rho) =
/// 2(b + ic). Standard errors come from the sandwich covariance with
/// binomial variances at the fitted probabilities.
inline VisibilityEstimate fit_fringe(const FringeScan &scan) {
    const auto &pts = scan.points;
    std::vector<double> distinct;
    for (const auto &p : pts) {
        if (!std::isfinite(p.chi) || !std::isfinite(p.p0)) {
            throw InvalidInput("fit_fringe: non-finite fringe point");
        }
        double w = std::remainder(p.chi, 2.0 * std::numbers::pi);
        bool seen = false;
        for (double d : distinct) {
            seen |= std::abs(std::remainder(w - d, 2.0 * std::numbers::pi)) < 1e-12;
        }
        if (!seen) {
            distinct.push_back(w);
        }
    }
    if (distinct.size() < 3) {
        throw InvalidInput("fit_fringe: needs at least 3 distinct phases");
    }
    // Normal equations for the 3 parameters.
    std::array<std::array<double, 3>, 3> xtx{};
    std::array<double, 3> xty{};
    auto row = [](double chi) { return std::array<double, 3>{1.0, std::cos(chi), std::sin(chi)}; };
    for (const auto &p : pts) {
        auto x = row(p.chi);
        for (std::size_t i = 0; i < 3; i++) {
            xty[i] += x[i] * p.p0;
            for (std::size_t j = 0; j < 3; j++) {
                xtx[i][j] += x[i] * x[j];
            }
        }
    }
    // 3x3 inverse by cofactors.
    const auto &m = xtx;
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-12) {
        throw NumericalFailure("fit_fringe: phases do not determine the fringe");
    }
    std::array<std::array<double, 3>, 3> inv{};
    for (std::size_t i = 0; i < 3; i++) {
        for (std::size_t j = 0; j < 3; j++) {
            std::size_t r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    std::array<double, 3> beta{};
    for (std::size_t i = 0; i < 3; i++) {
        for (std::size_t j = 0; j < 3; j++) {
            beta[i] += inv[i][j] * xty[j];
        }
    }

    VisibilityEstimate out;
    double b = beta[1], c = beta[2];
    out.trace = cplx(2 * b, 2 * c);
    out.v = 2 * std::hypot(b, c);
    out.phi = std::atan2(c, b);

    bool sampled = false;
    std::array<std::array<double, 3>, 3> meat{};
    for (const auto &p : pts) {
        if (p.shots == 0) {
            continue;
        }
        sampled = true;
        auto x = row(p.chi);
        double fit = std::clamp(beta[0] + b * x[1] + c * x[2], 0.0, 1.0);
        double var = fit * (1 - fit) / static_cast<double>(p.shots);
        for (std::size_t i = 0; i < 3; i++) {
            for (std::size_t j = 0; j < 3; j++) {
                meat[i][j] += x[i] * x[j] * var;
            }
        }
    }
    if (sampled) {
        std::array<std::array<double, 3>, 3> tmp{}, cov{};
        for (std::size_t i = 0; i < 3; i++) {
            for (std::size_t j = 0; j < 3; j++) {
                for (std::size_t k = 0; k < 3; k++) {
                    tmp[i][j] += inv[i][k] * meat[k][j];
                }
            }
        }
        for (std::size_t i = 0; i < 3; i++) {
            for (std::size_t j = 0; j < 3; j++) {
                for (std::size_t k = 0; k < 3; k++) {
                    cov[i][j] += tmp[i][k] * inv[k][j];
                }
            }
        }
        out.stderr_re = 2 * std::sqrt(cov[1][1]);
        out.stderr_im = 2 * std::sqrt(cov[2][2]);
        double r = std::hypot(b, c);
        if (r > 0) {
            double var_v = 4 * (b * b * cov[1][1] + 2 * b * c * cov[1][2] + c * c * cov[2][2]) / (r * r);
            out.stderr_v = std::sqrt(std::max(var_v, 0.0));
        } else {
            out.stderr_v = std::sqrt(2 * (cov[1][1] + cov[2][2]));
        }
    }
    return out;
}

inline std::string fringe_csv(const FringeScan &scan) {
    std::string out = "chi,p0,shots\n";
    char buf[96];
    for (const auto &p : scan.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%llu\n", p.chi, p.p0, static_cast<unsigned long long>(p.shots));
        out += buf;
    }
    return out;
}

}  // namespace qtangle
