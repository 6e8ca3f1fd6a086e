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

// Recovers the four eigenvalues of rho rho~ from the power sums p_1..p_4 and
// turns them into a concurrence.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>
#include <vector>

#include "qtangle/errors.hpp"
#include "qtangle/moments.hpp"

namespace qtangle {

/// Elementary symmetric polynomials e_1..e_4 from power sums via Newton's
/// identities.
inline std::array<double, 4> newton_elementary(const MomentSet &moments) {
    const auto &p = moments.p;
    std::array<double, 4> e{};
    e[0] = p[0];
    e[1] = (e[0] * p[0] - p[1]) / 2.0;
    e[2] = (e[1] * p[0] - e[0] * p[1] + p[2]) / 3.0;
    e[3] = (e[2] * p[0] - e[1] * p[1] + e[0] * p[2] - p[3]) / 4.0;
    return e;
}

struct QuarticRoots {
    std::array<double, 4> roots{};  // descending, clamped to [0, 1]
    double max_imag_residue = 0;
};

namespace detail {

using zc = std::complex<double>;

/// Coefficients of x^4 - e1 x^3 + e2 x^2 - e3 x + e4, highest degree first.
inline std::array<double, 5> quartic_coefficients(const std::array<double, 4> &e) {
    return {1.0, -e[0], e[1], -e[2], e[3]};
}

inline zc horner(const std::array<double, 5> &c, zc x) {
    zc v = c[0];
    for (std::size_t i = 1; i < c.size(); i++) {
        v = v * x + c[i];
    }
    return v;
}

inline zc horner_derivative(const std::array<double, 5> &c, zc x) {
    zc v = 4.0 * c[0];
    for (std::size_t i = 1; i < 4; i++) {
        v = v * x + static_cast<double>(4 - i) * c[i];
    }
    return v;
}

/// k-th Taylor coefficient p^(k)(x) / k! of the quartic at real x.
template <class T> T taylor_coefficient(const std::array<double, 5> &c, int k, T x) {
    // c[i] multiplies x^(4 - i).
    T sum = 0;
    for (int i = 0; i <= 4 - k; i++) {
        int power = 4 - i;
        double binom = 1;
        for (int j = 0; j < k; j++) {
            binom = binom * (power - j) / (j + 1);
        }
        T term = c[static_cast<std::size_t>(i)] * binom;
        for (int j = 0; j < power - k; j++) {
            term *= x;
        }
        sum += term;
    }
    return sum;
}

inline std::array<zc, 4> durand_kerner(const std::array<double, 5> &c) {
    std::array<zc, 4> z;
    zc seed(0.4, 0.9);
    z[0] = seed;
    for (std::size_t k = 1; k < 4; k++) {
        z[k] = z[k - 1] * seed;
    }
    for (int iter = 0; iter < 2000; iter++) {
        double change = 0;
        for (std::size_t k = 0; k < 4; k++) {
            zc denom = 1.0;
            for (std::size_t j = 0; j < 4; j++) {
                if (j != k) {
                    denom *= z[k] - z[j];
                }
            }
            if (denom == zc(0)) {
                denom = zc(1e-300);
            }
            zc step = horner(c, z[k]) / denom;
            z[k] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change <= 1e-18) {
            break;
        }
    }
    // Two Newton steps each, kept only when they reduce |p|.
    for (auto &zk : z) {
        for (int s = 0; s < 2; s++) {
            zc d = horner_derivative(c, zk);
            if (d == zc(0)) {
                break;
            }
            zc cand = zk - horner(c, zk) / d;
            if (std::abs(horner(c, cand)) <= std::abs(horner(c, zk))) {
                zk = cand;
            }
        }
    }
    return z;
}

/// All set partitions of {0,1,2,3} as block labels.
inline std::vector<std::array<int, 4>> partitions_of_four() {
    std::vector<std::array<int, 4>> out;
    std::array<int, 4> a{0, 0, 0, 0};
    for (a[1] = 0; a[1] <= 1; a[1]++) {
        for (a[2] = 0; a[2] <= std::max(a[0], a[1]) + 1; a[2]++) {
            for (a[3] = 0; a[3] <= std::max({a[0], a[1], a[2]}) + 1; a[3]++) {
                out.push_back(a);
            }
        }
    }
    return out;
}

}  // namespace detail

/// Real roots of x^4 - e1 x^3 + e2 x^2 - e3 x + e4.
///
/// Durand-Kerner iteration followed by two Newton steps per root. A k-fold
/// root splits under rounding (or moment noise) into k approximations lying
/// within about (delta / |p^(k)(c)/k!|)^(1/k) of the true root c, where delta
/// is the uncertainty of p near c. Groups that fit this pattern are replaced
/// by the nearby root of p^(k-1), which is simple and therefore well
/// conditioned, provided p and its lower derivatives vanish there to within
/// their own uncertainty.
/// Roots indistinguishable from zero are set to zero. Imaginary parts left
/// afterwards that exceed max(1e-7, 10 * noise) mean the moments are
/// inconsistent. The remaining roots are then refined on p with the zero
/// roots divided out. `rounding` is the absolute rounding error of each
/// moment behind e, when larger than that of storing it in a double.
inline QuarticRoots roots_quartic(const std::array<double, 4> &e, double noise = 0.0,
                                  const std::optional<std::array<double, 4>> &rounding = std::nullopt) {
    for (double v : e) {
        if (!std::isfinite(v)) {
            throw InvalidInput("roots_quartic: non-finite coefficient");
        }
    }
    auto c = detail::quartic_coefficients(e);
    auto z = detail::durand_kerner(c);

    const double threshold = std::max(1e-7, 10.0 * noise);

    // Uncertainty of p near x when each moment p_i carries an absolute error
    // u(i), pushed through k e_k = sum_i (-1)^(i-1) e_(k-i) p_i with |p_i|
    // bounded by e1^i.
    std::array<double, 5> ek{1.0, e[0], e[1], e[2], e[3]};
    auto propagate = [&](auto u) {
        std::array<double, 5> sigma{};
        for (std::size_t k = 1; k <= 4; k++) {
            double acc = 0;
            for (std::size_t i = 1; i <= k; i++) {
                double p_bound = std::pow(std::abs(e[0]), static_cast<double>(i));
                acc += std::abs(ek[k - i]) * u(i) + p_bound * sigma[k - i];
            }
            sigma[k] = acc / static_cast<double>(k);
        }
        return sigma;
    };
    const double eps = std::numeric_limits<double>::epsilon();
    // Moments are otherwise taken to be accurate relative to e1^i.
    const auto sigma_round = propagate([&](std::size_t i) {
        double u = 32.0 * eps * std::pow(std::abs(e[0]), static_cast<double>(i));
        return rounding ? u + 4.0 * (*rounding)[i - 1] : u;
    });
    const auto sigma_noise = propagate([&](std::size_t) { return noise; });
    // p with z zero roots divided out: coefficients, and their uncertainties,
    // shifted down by z degrees.
    auto shifted = [](const std::array<double, 5> &a, std::size_t z) {
        std::array<double, 5> out{};
        for (std::size_t i = z; i < 5; i++) {
            out[i] = a[i - z];
        }
        return out;
    };
    // Uncertainty of the j-th Taylor coefficient p^(j)(x)/j! of p / x^z, from
    // rounding in the moments and in evaluating it, plus three standard
    // deviations of moment noise when requested.
    auto delta_taylor_deflated = [&](int j, std::complex<double> at, bool with_noise, std::size_t z) {
        auto cz = shifted(c, z);
        auto rz = shifted(sigma_round, z);
        auto nz = shifted(sigma_noise, z);
        double x = std::abs(at);
        double d = 0;
        for (int i = 0; i + j <= 4; i++) {
            double binom = 1;
            for (int r = 0; r < j; r++) {
                binom = binom * (4 - i - r) / (r + 1);
            }
            auto ui = static_cast<std::size_t>(i);
            double err = 8.0 * eps * std::abs(cz[ui]) + rz[ui];
            if (with_noise) {
                err += 3.0 * nz[ui];
            }
            d += err * binom * std::pow(x, static_cast<double>(4 - i - j));
        }
        return d;
    };
    auto delta_taylor = [&](int j, std::complex<double> at, bool with_noise) {
        return delta_taylor_deflated(j, at, with_noise, 0);
    };
    auto delta_round = [&](std::complex<double> at) { return delta_taylor(0, at, false); };
    auto delta_noise = [&](std::complex<double> at) { return delta_taylor(0, at, true); };

    // For a k-fold root c, p^(k)(c)/k! equals the product of the distances to
    // the remaining roots. Using the product avoids spurious zeros of the
    // Taylor coefficient at the centroid of unrelated roots.
    auto split_bound = [&](const std::vector<std::size_t> &members, std::complex<double> at, double delta,
                           double factor) {
        double q = std::abs(c[0]);
        for (std::size_t j = 0; j < 4; j++) {
            if (std::find(members.begin(), members.end(), j) == members.end()) {
                q *= std::abs(at - z[j]);
            }
        }
        return factor * std::pow(delta / std::max(q, 1e-300), 1.0 / static_cast<double>(members.size()));
    };

    struct Block {
        std::vector<std::size_t> members;
        std::complex<double> centroid;
        double radius = 0;
    };
    auto blocks_of = [&](const std::array<int, 4> &part) {
        int count = *std::max_element(part.begin(), part.end()) + 1;
        std::vector<Block> blocks(static_cast<std::size_t>(count));
        for (std::size_t i = 0; i < 4; i++) {
            auto &b = blocks[static_cast<std::size_t>(part[i])];
            b.members.push_back(i);
            b.centroid += z[i];
        }
        for (auto &b : blocks) {
            b.centroid /= static_cast<double>(b.members.size());
            for (auto i : b.members) {
                b.radius = std::max(b.radius, std::abs(z[i] - b.centroid));
            }
        }
        return blocks;
    };
    // A block is a multiple root if its spread is explained by rounding, or
    // by moment noise when moments are sampled.
    auto mergeable = [&](const Block &b) {
        if (b.members.size() < 2) {
            return true;
        }
        return b.radius <= split_bound(b.members, b.centroid, delta_round(b.centroid), 8.0) ||
               b.radius <= split_bound(b.members, b.centroid, delta_noise(b.centroid), 1.5);
    };

    // Merged blocks take the nearby root of p^(k-1), which is simple there.
    auto block_value = [&](const Block &b) {
        double value = b.centroid.real();
        std::size_t k = b.members.size();
        double x = value;
        for (int iter = 0; iter < 50; iter++) {
            double f = detail::taylor_coefficient(c, static_cast<int>(k) - 1, x);
            double df = static_cast<double>(k) * detail::taylor_coefficient(c, static_cast<int>(k), x);
            if (df == 0) {
                break;
            }
            double step = f / df;
            x -= step;
            if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(x))) {
                break;
            }
        }
        double guard = std::max(2.0 * b.radius, split_bound(b.members, b.centroid, delta_noise(b.centroid), 8.0));
        return std::isfinite(x) && std::abs(x - value) <= guard ? x : value;
    };
    // A k-fold root v is zero if moving it there changes p^(k-1) by no more
    // than its uncertainty, both at v and at 0, on p with the zero roots found
    // so far divided out. At 0 the change is about k |v q(0)|, where
    // q = p / (x - v)^k.
    auto indistinct_from_zero = [&](double v, std::size_t k, std::size_t zeros) {
        auto q = shifted(c, zeros);
        int kk = static_cast<int>(k);
        double slope = std::abs(static_cast<double>(kk) * detail::taylor_coefficient(q, kk, v));
        auto quotient = q;
        for (std::size_t r = 0; r < k; r++) {
            std::array<double, 5> next{};
            next[1] = quotient[0];
            for (std::size_t i = 1; i < 4; i++) {
                next[i + 1] = quotient[i] + v * next[i];
            }
            quotient = next;
        }
        double at_zero = std::abs(static_cast<double>(kk) * quotient[4]);
        return std::abs(v) * slope <= delta_taylor_deflated(kk - 1, v, noise > 0, zeros) &&
               std::abs(v) * at_zero <= delta_taylor_deflated(kk - 1, 0.0, noise > 0, zeros);
    };
    // Roots per index, complex for unmerged roots.
    auto resolve = [&](std::vector<Block> &blocks) {
        std::array<std::complex<double>, 4> v{};
        for (const auto &b : blocks) {
            std::complex<double> value = b.members.size() > 1 ? std::complex<double>(block_value(b)) : b.centroid;
            for (auto i : b.members) {
                v[i] = value;
            }
        }
        // Smallest first, so later roots are judged with the zeros already set
        // divided out.
        std::sort(blocks.begin(), blocks.end(), [&](const Block &x, const Block &y) {
            return std::abs(v[x.members.front()]) < std::abs(v[y.members.front()]);
        });
        std::size_t zeros = 0;
        for (const auto &b : blocks) {
            std::complex<double> value = v[b.members.front()];
            if (std::abs(value.imag()) > threshold || !indistinct_from_zero(value.real(), b.members.size(), zeros)) {
                break;
            }
            for (auto i : b.members) {
                v[i] = 0.0;
            }
            zeros += b.members.size();
        }
        return v;
    };
    // A k-fold root v needs p^(j)(v)/j! at the uncertainty level for j < k.
    auto consistent = [&](const std::vector<Block> &blocks, const std::array<std::complex<double>, 4> &v) {
        for (const auto &b : blocks) {
            std::size_t k = b.members.size();
            double x = v[b.members.front()].real();
            for (std::size_t j = 0; j + 1 < k; j++) {
                double tol = 6.0 * delta_taylor(static_cast<int>(j), x, noise > 0);
                if (std::abs(detail::taylor_coefficient(c, static_cast<int>(j), x)) > tol) {
                    return false;
                }
            }
        }
        return true;
    };

    // Ranking: no leftover imaginary part, then the fewest distinct non-zero
    // values, then the smallest spread.
    std::vector<Block> best;
    std::array<std::complex<double>, 4> best_values{};
    std::tuple<bool, std::size_t, double> best_key{true, 0, 0};
    for (const auto &part : detail::partitions_of_four()) {
        auto blocks = blocks_of(part);
        if (!std::all_of(blocks.begin(), blocks.end(), mergeable)) {
            continue;
        }
        auto values = resolve(blocks);
        if (!consistent(blocks, values)) {
            continue;
        }
        bool complex_left = false;
        double spread = 0;
        std::size_t free = 0;
        for (const auto &b : blocks) {
            if (b.members.size() == 1) {
                complex_left |= std::abs(b.centroid.imag()) > threshold;
            }
            spread += b.radius;
            free += values[b.members.front()] != 0.0 ? 1 : 0;
        }
        std::tuple<bool, std::size_t, double> key{complex_left, free, spread};
        if (best.empty() || key < best_key) {
            best = std::move(blocks);
            best_values = values;
            best_key = key;
        }
    }

    QuarticRoots out;
    for (const auto &b : best) {
        if (b.members.size() == 1) {
            out.max_imag_residue = std::max(out.max_imag_residue, std::abs(b.centroid.imag()));
        }
    }
    // Divide out the zero roots and refine the others on the quotient, whose
    // coefficients do not carry the rounding of the vanishing e_k.
    std::size_t zeros = 0;
    for (const auto &value : best_values) {
        zeros += value == 0.0 ? 1 : 0;
    }
    if (zeros > 0 && zeros < 4) {
        std::array<double, 5> quotient{};
        for (std::size_t i = zeros; i < 5; i++) {
            quotient[i] = c[i - zeros];
        }
        for (const auto &b : best) {
            auto &first = best_values[b.members.front()];
            if (first == 0.0 || std::abs(first.imag()) > threshold) {
                continue;
            }
            int k = static_cast<int>(b.members.size());
            double x = first.real();
            for (int iter = 0; iter < 50; iter++) {
                double df = static_cast<double>(k) * detail::taylor_coefficient(quotient, k, x);
                if (df == 0) {
                    break;
                }
                double step = detail::taylor_coefficient(quotient, k - 1, x) / df;
                x -= step;
                if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(x))) {
                    break;
                }
            }
            if (std::isfinite(x) && std::abs(x - first.real()) <= 0.1 * std::abs(first.real())) {
                for (auto i : b.members) {
                    best_values[i] = x;
                }
            }
        }
    }
    for (std::size_t i = 0; i < 4; i++) {
        out.roots[i] = std::clamp(best_values[i].real(), 0.0, 1.0);
    }
    if (out.max_imag_residue > threshold) {
        std::ostringstream ss;
        ss << "roots_quartic: moments are inconsistent with a real spectrum (imaginary residue "
           << out.max_imag_residue << " > " << threshold << ")";
        throw NumericalFailure(ss.str());
    }
    std::sort(out.roots.begin(), out.roots.end(), std::greater<>());
    return out;
}

/// Spectrum fitted to sampled moments.
struct FittedSpectrum {
    std::array<double, 4> etas{};  // descending
    /// sum_m ((sum_i eta_i^m - p_m) / stderr_m)^2
    double chi2 = 0;
    /// distinct non-zero eigenvalues of the selected model
    std::size_t free_values = 0;
    /// largest |Im| among the unconstrained quartic roots
    double max_imag_residue = 0;
};

namespace detail {

/// chi-square 0.999 quantiles for 0..4 degrees of freedom.
inline constexpr std::array<double, 5> kChi2Quantile999{0.0, 10.828, 13.816, 16.266, 18.467};

struct EtaModel {
    std::vector<double> values;
    std::vector<std::size_t> mult;
    bool has_zero = false;

    /// distinct eigenvalues, counting the zero block as one
    std::size_t blocks() const {
        return values.size() + (has_zero ? 1 : 0);
    }
};

inline std::array<double, 4> weighted_residuals(const EtaModel &m, const std::array<double, 4> &p,
                                                const std::array<double, 4> &sigma) {
    std::array<double, 4> r{};
    for (std::size_t k = 0; k < 4; k++) {
        double s = 0;
        for (std::size_t j = 0; j < m.values.size(); j++) {
            s += static_cast<double>(m.mult[j]) * std::pow(m.values[j], static_cast<double>(k + 1));
        }
        r[k] = (s - p[k]) / sigma[k];
    }
    return r;
}

inline double chi2_of(const std::array<double, 4> &r) {
    double c = 0;
    for (double x : r) {
        c += x * x;
    }
    return c;
}

/// Solves a x = b in place for n <= 4 by Gaussian elimination; false if
/// singular.
inline bool solve_small(std::vector<std::vector<double>> a, std::vector<double> &b) {
    std::size_t n = b.size();
    for (std::size_t col = 0; col < n; col++) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; r++) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        if (a[piv][col] == 0) {
            return false;
        }
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; r++) {
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; c++) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t c = i + 1; c < n; c++) {
            b[i] -= a[i][c] * b[c];
        }
        b[i] /= a[i][i];
    }
    return true;
}

/// Levenberg-Marquardt on the non-zero values, kept inside [0, 1].
inline double fit_eta_model(EtaModel &m, const std::array<double, 4> &p, const std::array<double, 4> &sigma) {
    std::size_t n = m.values.size();
    double chi = chi2_of(weighted_residuals(m, p, sigma));
    double lambda = 1e-3;
    for (int iter = 0; iter < 500 && n > 0; iter++) {
        auto r = weighted_residuals(m, p, sigma);
        std::vector<std::vector<double>> jac(4, std::vector<double>(n));
        for (std::size_t k = 0; k < 4; k++) {
            for (std::size_t j = 0; j < n; j++) {
                jac[k][j] = static_cast<double>(m.mult[j] * (k + 1)) *
                            std::pow(m.values[j], static_cast<double>(k)) / sigma[k];
            }
        }
        std::vector<std::vector<double>> a(n, std::vector<double>(n));
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; i++) {
            for (std::size_t j = 0; j < n; j++) {
                for (std::size_t k = 0; k < 4; k++) {
                    a[i][j] += jac[k][i] * jac[k][j];
                }
            }
            for (std::size_t k = 0; k < 4; k++) {
                g[i] -= jac[k][i] * r[k];
            }
        }
        for (std::size_t i = 0; i < n; i++) {
            a[i][i] += lambda * a[i][i] + 1e-300;
        }
        EtaModel trial = m;
        bool ok = solve_small(a, g);
        if (ok) {
            for (std::size_t j = 0; j < n; j++) {
                trial.values[j] = std::clamp(m.values[j] + g[j], 0.0, 1.0);
            }
        }
        double tchi = ok ? chi2_of(weighted_residuals(trial, p, sigma)) : INFINITY;
        if (tchi < chi) {
            bool converged = chi - tchi <= 1e-15 * (1 + chi);
            m = std::move(trial);
            chi = tchi;
            lambda = std::max(lambda / 10, 1e-12);
            if (converged) {
                break;
            }
        } else {
            lambda *= 10;
            if (lambda > 1e12) {
                break;
            }
        }
    }
    return chi;
}

}  // namespace detail

/// Least-squares spectrum for sampled moments.
///
/// Candidate models group the eigenvalues into blocks of equal value, some
/// of them pinned at zero, and are fitted to p_m with weights 1/stderr_m
/// under 0 <= eta <= 1. Start values come from the quartic roots. Among
/// models whose chi-square passes the 0.999 quantile (4 - free values
/// degrees of freedom), the one with the fewest distinct eigenvalues wins,
/// then the fewest free values, then the smaller chi-square. If no model passes, the best fit over all is used, and moments
/// that no spectrum reproduces within 5 stderr raise NumericalFailure.
inline FittedSpectrum fit_spectrum(const MomentSet &moments) {
    if (!moments.stderr_) {
        throw InvalidInput("fit_spectrum: moments carry no stderr");
    }
    for (double v : moments.p) {
        if (!std::isfinite(v)) {
            throw InvalidInput("fit_spectrum: non-finite moment");
        }
    }
    std::array<double, 4> sigma{};
    for (std::size_t k = 0; k < 4; k++) {
        sigma[k] = std::max((*moments.stderr_)[k], 1e-15);
    }
    auto z = detail::durand_kerner(detail::quartic_coefficients(newton_elementary(moments)));

    FittedSpectrum out;
    for (const auto &zk : z) {
        out.max_imag_residue = std::max(out.max_imag_residue, std::abs(zk.imag()));
    }
    struct Candidate {
        detail::EtaModel model;
        double chi2 = INFINITY;
    };
    std::optional<Candidate> chosen, best_any;
    for (const auto &part : detail::partitions_of_four()) {
        auto nblocks = static_cast<std::size_t>(*std::max_element(part.begin(), part.end()) + 1);
        std::vector<double> centroid(nblocks, 0.0);
        std::vector<std::size_t> mult(nblocks, 0);
        for (std::size_t i = 0; i < 4; i++) {
            auto b = static_cast<std::size_t>(part[i]);
            centroid[b] += z[i].real();
            mult[b]++;
        }
        // Each subset of blocks may be pinned at zero.
        for (std::size_t mask = 0; mask < (std::size_t{1} << nblocks); mask++) {
            Candidate c;
            for (std::size_t b = 0; b < nblocks; b++) {
                if (!(mask >> b & 1)) {
                    c.model.values.push_back(std::clamp(centroid[b] / static_cast<double>(mult[b]), 0.0, 1.0));
                    c.model.mult.push_back(mult[b]);
                } else {
                    c.model.has_zero = true;
                }
            }
            c.chi2 = detail::fit_eta_model(c.model, moments.p, sigma);
            std::size_t free = c.model.values.size();
            if (!best_any || c.chi2 < best_any->chi2) {
                best_any = c;
            }
            if (c.chi2 > detail::kChi2Quantile999[4 - free]) {
                continue;
            }
            auto key = std::make_tuple(c.model.blocks(), free, c.chi2);
            if (!chosen || key < std::make_tuple(chosen->model.blocks(), chosen->model.values.size(), chosen->chi2)) {
                chosen = std::move(c);
            }
        }
    }
    const Candidate &pick = chosen ? *chosen : *best_any;
    auto r = detail::weighted_residuals(pick.model, moments.p, sigma);
    for (std::size_t k = 0; k < 4; k++) {
        if (std::abs(r[k]) * sigma[k] > std::max(1e-8, 5 * sigma[k])) {
            std::ostringstream ss;
            ss << "fit_spectrum: no spectrum in [0, 1] reproduces p" << k + 1 << " within 5 stderr (misfit "
               << std::abs(r[k]) << " stderr)";
            throw NumericalFailure(ss.str());
        }
    }
    std::size_t i = 0;
    for (std::size_t j = 0; j < pick.model.values.size(); j++) {
        for (std::size_t k = 0; k < pick.model.mult[j]; k++) {
            out.etas[i++] = pick.model.values[j];
        }
    }
    std::sort(out.etas.begin(), out.etas.end(), std::greater<>());
    out.chi2 = pick.chi2;
    out.free_values = pick.model.values.size();
    return out;
}

struct SpectrumResult {
    std::array<double, 4> e{};
    std::array<double, 4> etas{};
    std::array<double, 4> lambdas{};
    double concurrence = 0;
    double max_imag_residue = 0;
    /// max_m |sum_i eta_i^m - p_m|
    double power_sum_residual = 0;
};

inline SpectrumResult concurrence_from_moments(const MomentSet &moments) {
    SpectrumResult out;
    out.e = newton_elementary(moments);
    if (moments.max_stderr() > 0) {
        FittedSpectrum fit = fit_spectrum(moments);
        out.etas = fit.etas;
        out.max_imag_residue = fit.max_imag_residue;
    } else {
        QuarticRoots roots = roots_quartic(out.e, 0.0, moments.rounding);
        out.etas = roots.roots;
        out.max_imag_residue = roots.max_imag_residue;
    }
    for (std::size_t i = 0; i < 4; i++) {
        out.lambdas[i] = std::sqrt(out.etas[i]);
    }
    const auto &l = out.lambdas;
    out.concurrence = std::max(l[0] - l[1] - l[2] - l[3], 0.0);
    for (std::size_t m = 0; m < 4; m++) {
        double s = 0;
        for (double eta : out.etas) {
            s += std::pow(eta, static_cast<double>(m + 1));
        }
        out.power_sum_residual = std::max(out.power_sum_residual, std::abs(s - moments.p[m]));
    }
    return out;
}

}  // namespace qtangle
