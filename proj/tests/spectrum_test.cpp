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

#include "qtangle/spectrum.hpp"

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "qtangle/concurrence.hpp"
#include "qtangle/momentcircuits.hpp"

using namespace qtangle;

namespace {

MomentSet power_sums(const std::array<double, 4> &etas) {
    MomentSet m;
    for (std::size_t k = 0; k < 4; k++) {
        for (double eta : etas) {
            m.p[k] += std::pow(eta, static_cast<double>(k + 1));
        }
    }
    return m;
}

}  // namespace

TEST(spectrum, newton_elementary_examples) {
    auto e = newton_elementary(MomentSet{.p = {1, 1, 1, 1}});
    ASSERT_EQ(e, (std::array<double, 4>{1, 0, 0, 0}));

    // Four-fold eta = 1/16: coefficients of (x - 1/16)^4.
    e = newton_elementary(MomentSet{.p = {4.0 / 16, 4.0 / 256, 4.0 / 4096, 4.0 / 65536}});
    ASSERT_DOUBLE_EQ(e[0], 0.25);
    ASSERT_DOUBLE_EQ(e[1], 3.0 / 128);
    ASSERT_DOUBLE_EQ(e[2], 1.0 / 1024);
    ASSERT_NEAR(e[3], 1.0 / 65536, 1e-18);

    ASSERT_EQ(newton_elementary(MomentSet{}), (std::array<double, 4>{0, 0, 0, 0}));
}

TEST(spectrum, roots_quartic_examples) {
    auto r = roots_quartic({1, 0, 0, 0});
    ASSERT_NEAR(r.roots[0], 1, 1e-12);
    for (std::size_t k = 1; k < 4; k++) {
        ASSERT_NEAR(r.roots[k], 0, 1e-12);
    }

    r = roots_quartic({0.25, 3.0 / 128, 1.0 / 1024, 1.0 / 65536});
    for (double x : r.roots) {
        ASSERT_NEAR(x, 1.0 / 16, 1e-12);
    }

    r = roots_quartic({1.25, 0.25, 0, 0});
    ASSERT_NEAR(r.roots[0], 1, 1e-12);
    ASSERT_NEAR(r.roots[1], 0.25, 1e-12);
    ASSERT_NEAR(r.roots[2], 0, 1e-12);
    ASSERT_NEAR(r.roots[3], 0, 1e-12);
}

TEST(spectrum, roots_quartic_degenerate_patterns) {
    // Triple and double roots, and a double root at zero.
    for (auto etas : {std::array<double, 4>{0.7, 0.01, 0.01, 0.01}, std::array<double, 4>{0.5, 0.5, 0.2, 0.1},
                      std::array<double, 4>{0.6, 0.3, 0, 0}, std::array<double, 4>{0.3, 0.3, 0.05, 0.05}}) {
        auto r = roots_quartic(newton_elementary(power_sums(etas)));
        for (std::size_t k = 0; k < 4; k++) {
            ASSERT_NEAR(r.roots[k], etas[k], 1e-12);
        }
    }
}

TEST(spectrum, roots_quartic_rejects_complex_spectrum) {
    // x^4 + 1 has no real roots.
    ASSERT_THROW(roots_quartic({0, 0, 0, 1}), NumericalFailure);
    // Power sums with p2 > p1^2 cannot come from four nonnegative reals... and
    // p = (0.5, 0.5, 0, 0) gives a conjugate pair.
    ASSERT_THROW(concurrence_from_moments(MomentSet{.p = {0.5, 0.0, 0.3, 0.0}}), NumericalFailure);
    ASSERT_THROW(roots_quartic({NAN, 0, 0, 0}), InvalidInput);
}

TEST(spectrum, concurrence_from_moments_examples) {
    auto bell = as_density(make_named("bell_phi_plus"));
    ASSERT_NEAR(concurrence_from_moments(moments_direct(bell)).concurrence, 1.0, 1e-12);

    auto mixed = as_density(make_named("max_mixed"));
    auto res = concurrence_from_moments(moments_direct(mixed));
    ASSERT_EQ(res.concurrence, 0.0);
    for (double l : res.lambdas) {
        ASSERT_NEAR(l, 0.25, 1e-10);
    }

    auto werner = std::get<DensityMatrix>(make_named("werner", 0.8));
    ASSERT_NEAR(concurrence_from_moments(moments_direct(werner)).concurrence, 0.7, 1e-8);
}

TEST(spectrum, round_trip_against_wootters) {
    double worst = 0;
    for (std::uint64_t t = 0; t < 1000; t++) {
        Rng rng = Rng::for_trial(40, t);
        auto rho = random_mixed(2, 4, rng);
        auto moments = moments_direct(rho);
        auto res = concurrence_from_moments(moments);
        worst = std::max(worst, std::abs(res.concurrence - wootters_concurrence(rho).concurrence));
        ASSERT_LT(res.power_sum_residual, 1e-8);
        ASSERT_GE(moments.p[0], 0.0);
        ASSERT_LE(moments.p[0], 4.0);
    }
    ASSERT_LT(worst, 1e-8);
}

TEST(spectrum, round_trip_low_rank) {
    // Zero eigenvalues of rho rho~ must come back as zeros, and small non-zero
    // ones must survive.
    double worst = 0;
    for (std::uint64_t t = 0; t < 600; t++) {
        Rng rng = Rng::for_trial(41, t);
        auto rho = random_mixed(2, 1 + t % 3, rng);
        double w = wootters_concurrence(rho).concurrence;
        worst = std::max(worst, std::abs(concurrence_from_moments(moments_direct(rho)).concurrence - w));
        worst = std::max(worst, std::abs(concurrence_from_moments(moments_from_terms(rho)).concurrence - w));
    }
    ASSERT_LT(worst, 1e-8);
}

TEST(spectrum, werner_grid_from_moments) {
    for (int k = 0; k <= 20; k++) {
        double p = 0.05 * k;
        auto rho = std::get<DensityMatrix>(make_named("werner", p));
        ASSERT_NEAR(concurrence_from_moments(moments_direct(rho)).concurrence, oracle::werner_concurrence(p), 1e-8)
            << p;
    }
}

std::vector<DensityMatrix> two_qubit_corpus() {
    std::vector<DensityMatrix> out;
    for (const char *name : {"bell_phi_plus", "product00", "max_mixed"}) {
        out.push_back(as_density(make_named(name)));
    }
    for (const char *name : {"ghz3", "w3"}) {
        out.push_back(as_density(make_named(name)).reduce({0, 1}));
    }
    for (int k = 0; k <= 10; k++) {
        out.push_back(std::get<DensityMatrix>(make_named("werner", 0.1 * k)));
    }
    return out;
}

TEST(spectrum, perturbation_stability) {
    const double sigma = 1e-6;
    double worst = 0;
    auto corpus = two_qubit_corpus();
    for (std::size_t s = 0; s < corpus.size(); s++) {
        double exact = wootters_concurrence(corpus[s]).concurrence;
        for (std::uint64_t t = 0; t < 50; t++) {
            Rng rng = Rng::for_trial(41 + s, t);
            MomentSet noisy = moments_direct(corpus[s]);
            for (double &p : noisy.p) {
                p += sigma * rng.normal();
            }
            noisy.source = MomentSet::Source::sampled;
            noisy.stderr_ = std::array<double, 4>{sigma, sigma, sigma, sigma};
            double c = concurrence_from_moments(noisy).concurrence;
            worst = std::max(worst, std::abs(c - exact));
        }
    }
    EXPECT_LT(worst, 1e-3);
}
