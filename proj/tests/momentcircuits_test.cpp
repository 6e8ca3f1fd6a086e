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

#include "qtangle/momentcircuits.hpp"

#include <numbers>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace qtangle;

namespace {

DensityMatrix named(const char *name) {
    return as_density(make_named(name));
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng &rng) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; i++) {
        p[i] = i;
    }
    for (std::size_t i = n - 1; i > 0; i--) {
        std::swap(p[i], p[rng.next_u64() % (i + 1)]);
    }
    return p;
}

}  // namespace

TEST(momentcircuits, first_moment_terms_and_signs) {
    auto terms = enumerate_terms(1);
    ASSERT_EQ(terms.size(), 4u);
    std::vector<std::string> words;
    std::vector<int> signs;
    for (const auto &t : terms) {
        words.push_back(t.word());
        signs.push_back(t.sign);
        EXPECT_EQ(t.copies_used, 2u);
    }
    EXPECT_EQ(words, (std::vector<std::string>{"R", "B", "A", "I"}));
    EXPECT_EQ(signs, (std::vector<int>{1, -1, -1, 1}));
    EXPECT_EQ(terms[0].config_bits(), "11");
    EXPECT_EQ(terms[1].config_bits(), "01");
    EXPECT_EQ(terms[2].config_bits(), "10");
    EXPECT_EQ(terms[3].config_bits(), "00");
}

TEST(momentcircuits, term_counts) {
    EXPECT_EQ(enumerate_terms(2).size(), 16u);
    EXPECT_EQ(enumerate_terms(3).size(), 64u);
    EXPECT_EQ(enumerate_terms(4).size(), 256u);
    EXPECT_THROW(enumerate_terms(0), InvalidInput);
    EXPECT_THROW(enumerate_terms(5), InvalidInput);
    for (int m = 1; m <= 4; m++) {
        for (const auto &t : enumerate_terms(m)) {
            EXPECT_EQ(t.sign, oracle::word_sign(t.word()));
            EXPECT_EQ(t.permutation.n_copies, static_cast<std::size_t>(2 * m));
        }
    }
}

TEST(momentcircuits, first_moment_term_values) {
    auto rho = random_mixed(2, 3, 12);
    Dims d{2, 2};
    double purity = rho.purity();
    CMatrix rb = partial_trace(rho.matrix(), d, {1});
    double purity_b = (rb * rb).trace().real();
    EXPECT_NEAR(eval_term_exact(term_from_word("R"), rho), purity, 1e-14);
    EXPECT_NEAR(eval_term_exact(term_from_word("B"), rho), purity_b, 1e-14);
    EXPECT_NEAR(eval_term_exact(term_from_word("I"), rho), 1.0, 1e-14);
    // Brute force 16x16 swap operator.
    auto t = term_from_word("R");
    EXPECT_NEAR(std::abs(oracle::trace_of_permuted_copies(rho.matrix(), t.permutation.perm_a, t.permutation.perm_b) -
                         purity),
                0.0, 1e-14);
}

TEST(momentcircuits, contraction_matches_explicit_permutation_operator) {
    Rng rng(5);
    auto rho = random_mixed(2, 4, rng);
    for (std::size_t n = 1; n <= 4; n++) {
        for (int k = 0; k < 10; k++) {
            auto perm = RailPermutation::validate(random_permutation(n, rng), random_permutation(n, rng));
            cplx fast = contract_permutation(rho.matrix(), perm);
            cplx slow = oracle::trace_of_permuted_copies(rho.matrix(), perm.perm_a, perm.perm_b);
            EXPECT_NEAR(std::abs(fast - slow), 0.0, 1e-14);
        }
    }
}

TEST(momentcircuits, every_term_matches_matrix_word) {
    for (std::uint64_t s = 0; s < 3; s++) {
        auto rho = random_mixed(2, 1 + s, 70 + s);
        for (int m = 1; m <= 4; m++) {
            for (const auto &t : enumerate_terms(m)) {
                cplx v = eval_term(t, rho);
                cplx w = oracle::word_value(rho.matrix(), t.word());
                ASSERT_NEAR(std::abs(v - w), 0.0, 1e-14) << t.word();
            }
        }
    }
}

TEST(momentcircuits, complex_terms_are_rejected_by_exact_evaluation) {
    auto rho = random_mixed(2, 4, 31);
    auto t = term_from_word("BAR");
    cplx w = oracle::word_value(rho.matrix(), "BAR");
    ASSERT_GT(std::abs(w.imag()), 1e-6);
    EXPECT_THROW(eval_term_exact(t, rho), NumericalFailure);
    EXPECT_NEAR(std::abs(eval_term(t, rho) - w), 0.0, 1e-14);
}

TEST(momentcircuits, moment_examples) {
    EXPECT_NEAR(moment_from_terms(1, named("bell_phi_plus")), 1.0, 1e-14);
    EXPECT_NEAR(moment_from_terms(2, named("max_mixed")), 1.0 / 64, 1e-15);
    for (int m = 1; m <= 4; m++) {
        EXPECT_NEAR(moment_from_terms(m, named("product00")), 0.0, 1e-15);
    }
}

TEST(momentcircuits, moments_match_direct_computation) {
    double worst = 0;
    for (std::uint64_t t = 0; t < 500; t++) {
        Rng rng = Rng::for_trial(8, t);
        auto rho = random_mixed(2, 1 + t % 4, rng);
        auto direct = moments_direct(rho);
        for (int m = 1; m <= 4; m++) {
            worst = std::max(worst, std::abs(moment_from_terms(m, rho) - direct.moment(m)));
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(momentcircuits, relabeling_copies_leaves_value_unchanged) {
    Rng rng(99);
    for (int k = 0; k < 100; k++) {
        auto rho = random_mixed(2, 1 + k % 4, rng);
        int m = 1 + k % 4;
        auto terms = enumerate_terms(m);
        const auto &t = terms[rng.next_u64() % terms.size()];
        std::size_t n = t.permutation.n_copies;
        auto sigma = random_permutation(n, rng);
        std::vector<std::size_t> inv(n), a(n), b(n);
        for (std::size_t i = 0; i < n; i++) {
            inv[sigma[i]] = i;
        }
        for (std::size_t i = 0; i < n; i++) {
            a[i] = sigma[t.permutation.perm_a[inv[i]]];
            b[i] = sigma[t.permutation.perm_b[inv[i]]];
        }
        cplx v1 = contract_permutation(rho.matrix(), t.permutation);
        cplx v2 = contract_permutation(rho.matrix(), RailPermutation::validate(a, b));
        ASSERT_NEAR(std::abs(v1 - v2), 0.0, 1e-13);
    }
}

TEST(momentcircuits, rail_permutation_validation) {
    EXPECT_THROW(RailPermutation::validate({0, 0}, {0, 1}), InvalidInput);
    EXPECT_THROW(RailPermutation::validate({0, 1}, {0}), InvalidInput);
    EXPECT_THROW(term_from_word("RX"), InvalidInput);
}

TEST(momentcircuits, analytic_visibility_prefactors) {
    auto bell = named("bell_phi_plus");
    EXPECT_NEAR(full_circuit_visibility(1, bell, CircuitMode::analytic).v, 0.25, 1e-15);
    EXPECT_NEAR(full_circuit_visibility(2, bell, CircuitMode::analytic).v, 1.0 / 16, 1e-15);
    EXPECT_NEAR(full_circuit_visibility(1, named("max_mixed"), CircuitMode::analytic).v, 1.0 / 16, 1e-15);
    for (std::uint64_t s = 0; s < 20; s++) {
        auto rho = random_mixed(2, 1 + s % 4, 200 + s);
        for (int m = 1; m <= 4; m++) {
            auto v = full_circuit_visibility(m, rho, CircuitMode::analytic);
            EXPECT_EQ(v.trace.real() * std::pow(4.0, m), moment_from_terms(m, rho));
        }
    }
}

TEST(momentcircuits, gate_level_first_moment_mixed) {
    for (std::uint64_t s = 0; s < 5; s++) {
        auto rho = random_mixed(2, 4, 300 + s);
        EXPECT_EQ(full_moment_circuit(1).num_qubits(), 7u);
        auto g = full_circuit_visibility(1, rho, CircuitMode::gate_level);
        auto a = full_circuit_visibility(1, rho, CircuitMode::analytic);
        EXPECT_NEAR(std::abs(g.trace - a.trace), 0.0, 1e-10);
    }
}

TEST(momentcircuits, gate_level_second_moment_pure) {
    EXPECT_EQ(full_moment_circuit(2).num_qubits(), 13u);
    for (std::uint64_t s = 0; s < 3; s++) {
        State psi = random_pure(2, 400 + s);
        auto g = full_circuit_visibility(2, psi, CircuitMode::gate_level);
        auto a = full_circuit_visibility(2, psi, CircuitMode::analytic);
        EXPECT_NEAR(std::abs(g.trace - a.trace), 0.0, 1e-10);
    }
    auto bell = make_named("bell_phi_plus");
    EXPECT_NEAR(full_circuit_visibility(2, bell, CircuitMode::gate_level).v, 1.0 / 16, 1e-12);
}

TEST(momentcircuits, gate_level_second_moment_mixed_and_third_pure) {
    auto rho = random_mixed(2, 2, 500);
    EXPECT_NEAR(std::abs(full_circuit_visibility(2, rho, CircuitMode::gate_level).trace -
                         full_circuit_visibility(2, rho, CircuitMode::analytic).trace),
                0.0, 1e-10);
    State psi = random_pure(2, 501);
    EXPECT_NEAR(std::abs(full_circuit_visibility(3, psi, CircuitMode::gate_level).trace -
                         full_circuit_visibility(3, psi, CircuitMode::analytic).trace),
                0.0, 1e-10);
}

TEST(momentcircuits, gate_level_size_limit) {
    auto rho = random_mixed(2, 4, 502);
    EXPECT_THROW(full_circuit_visibility(3, rho, CircuitMode::gate_level), SizeLimitExceeded);
}

TEST(momentcircuits, bell_first_moment_fringe_sampling) {
    auto bell = named("bell_phi_plus");
    std::vector<double> chis{0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2};
    cplx t = full_circuit_visibility(1, bell, CircuitMode::analytic).trace;
    auto est = fit_fringe(sample_fringe([t](double chi) { return intensity_from_trace(t, chi).p0; }, chis,
                                        1000000, 2024));
    EXPECT_LT(std::abs(est.v - 0.25), 0.005);
    EXPECT_LT(std::abs(est.v - 0.25), 3 * *est.stderr_v);
}

TEST(momentcircuits, per_term_exact_mode_is_exact) {
    auto rho = random_mixed(2, 3, 600);
    for (int m = 1; m <= 4; m++) {
        auto e = per_term_estimate(m, rho, 0, chi_grid(8), 1);
        EXPECT_EQ(e.value, moment_from_terms(m, rho));
        EXPECT_EQ(e.stderr_, 0.0);
    }
}

TEST(momentcircuits, per_term_bell_first_moment) {
    auto e = per_term_estimate(1, named("bell_phi_plus"), 250000, chi_grid(4), 7);
    EXPECT_LT(std::abs(e.value - 1.0), 0.01);
    EXPECT_LT(std::abs(e.value - 1.0), 3 * e.stderr_);
}

TEST(momentcircuits, per_term_beats_full_circuit_at_equal_shots) {
    auto bell = named("bell_phi_plus");
    const std::uint64_t total_per_point = 1600000;
    auto full = full_circuit_estimate(2, bell, total_per_point, chi_grid(4), 3);
    auto split = per_term_estimate(2, bell, total_per_point / 16, chi_grid(4), 3);
    EXPECT_LT(split.stderr_, full.stderr_);
    EXPECT_LT(std::abs(split.value - 1.0), 4 * split.stderr_);
    EXPECT_LT(std::abs(full.value - 1.0), 4 * full.stderr_);
}

TEST(momentcircuits, per_term_estimator_is_unbiased) {
    auto rho = random_mixed(2, 3, 700);
    double exact = moment_from_terms(1, rho);
    double sum = 0, se = 0;
    const int n = 200;
    for (int s = 0; s < n; s++) {
        auto e = per_term_estimate(1, rho, 2000, chi_grid(4), 5000 + s);
        sum += e.value;
        se += e.stderr_;
    }
    EXPECT_LT(std::abs(sum / n - exact), 3 * (se / n) / std::sqrt(n));
}

TEST(momentcircuits, sampled_moment_sets_are_deterministic) {
    auto rho = random_mixed(2, 2, 800);
    auto a = sampled_moments(rho, SamplingMode::full_circuit, 1000, chi_grid(8), 4);
    auto b = sampled_moments(rho, SamplingMode::full_circuit, 1000, chi_grid(8), 4);
    EXPECT_EQ(a.p, b.p);
    EXPECT_EQ(a.source, MomentSet::Source::sampled);
    ASSERT_TRUE(a.stderr_.has_value());
    EXPECT_GT(a.max_stderr(), 0.0);
}

TEST(momentcircuits, copy_budgets) {
    EXPECT_EQ(copy_budget("tangle3_method1").copies_per_run, 22u);
    EXPECT_EQ(copy_budget("tangle3_naive_tau_sq").copies_per_run, 4u);
    EXPECT_EQ(copy_budget("combined_purities").copies_per_run, 2u);
    EXPECT_EQ(copy_budget("concurrence_moments_full").copies_per_run, 20u);
    for (int m = 1; m <= 4; m++) {
        EXPECT_EQ(moment_copy_budget(m).copies_per_run, static_cast<std::size_t>(2 * m));
        EXPECT_EQ(enumerate_terms(m).front().copies_used, moment_copy_budget(m).copies_per_run);
    }
    EXPECT_THROW(copy_budget("nope"), InvalidInput);
}

TEST(momentcircuits, term_table_csv) {
    auto csv = term_table_csv(1, named("max_mixed"));
    EXPECT_EQ(csv, "moment,config_bits,sign,value\n1,11,+1,0.25\n1,01,-1,0.5\n1,10,-1,0.5\n1,00,+1,1\n");
}
