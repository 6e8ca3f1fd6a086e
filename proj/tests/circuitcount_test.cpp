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

#include "qtangle/circuitcount.hpp"

#include <set>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace qtangle;
using namespace qtangle::oracle;

namespace {

// Independent brute force: words as digit vectors, class = set of rotations.
std::size_t brute_cyclic_classes(std::size_t m) {
    std::set<std::vector<int>> reps;
    std::size_t total = std::size_t{1} << (2 * m);
    for (std::size_t k = 0; k < total; k++) {
        std::vector<int> w(m);
        for (std::size_t j = 0; j < m; j++) {
            w[j] = static_cast<int>((k >> (2 * j)) & 3);
        }
        std::vector<int> best = w;
        for (std::size_t r = 1; r < m; r++) {
            std::rotate(w.begin(), w.begin() + 1, w.end());
            best = std::min(best, w);
        }
        reps.insert(best);
    }
    return reps.size();
}

}  // namespace

TEST(circuitcount, raw_counts) {
    EXPECT_EQ(count_raw(), 340u);
    EXPECT_EQ(count_raw_moment(1), 4u);
    EXPECT_EQ(count_raw_moment(4), 256u);
}

TEST(circuitcount, cyclic_classes_match_brute_force_and_formula) {
    auto r = count_canonical();
    std::array<std::size_t, 4> expected{4, 10, 24, 70};
    for (std::size_t m = 1; m <= 4; m++) {
        EXPECT_EQ(r.cyclic[m - 1], expected[m - 1]);
        EXPECT_EQ(r.cyclic[m - 1], brute_cyclic_classes(m));
        EXPECT_EQ(r.cyclic[m - 1], necklace_count(4, m));
        EXPECT_EQ(necklace_formula(4, m), necklace_count(4, m));
    }
    EXPECT_EQ(r.cyclic_total, 108u);
    EXPECT_LE(r.cyclic_total, 111u);
    EXPECT_LE(r.cyclic_total, r.raw_total);
    EXPECT_EQ(r.raw_total, 340u);
}

TEST(circuitcount, reduced_counts) {
    auto r = count_canonical();
    std::array<std::size_t, 4> expected{4, 9, 18, 46};
    for (std::size_t k = 0; k < 4; k++) {
        EXPECT_EQ(r.reduced_new[k], expected[k]);
    }
    EXPECT_EQ(r.reduced_total, 77u);
    EXPECT_EQ(r.runs, 76u);
}

TEST(circuitcount, reductions_are_tight_on_a_generic_state) {
    // Distinct term values on a generic state bound the number of circuits
    // from below. The one extra class is arbrr vs arrbr: reversals of each
    // other, so complex conjugates, and both real.
    auto rho = random_mixed(2, 4, 77);
    std::vector<cplx> values;
    for (int m = 1; m <= 4; m++) {
        for (const auto &t : enumerate_terms(m)) {
            cplx v = eval_term(t, rho);
            bool seen = false;
            for (const auto &u : values) {
                seen = seen || std::abs(u - v) < 1e-12;
            }
            if (!seen) {
                values.push_back(v);
            }
        }
    }
    EXPECT_EQ(values.size() + 1, count_canonical().reduced_total);
    EXPECT_EQ(CanonicalTerm::of("ABI").reduced_form, "arbrr");
    EXPECT_EQ(CanonicalTerm::of("AIB").reduced_form, "arrbr");
    cplx x = eval_term(term_from_word("ABI"), rho);
    cplx y = eval_term(term_from_word("AIB"), rho);
    EXPECT_LT(std::abs(x - y), 1e-12);
    EXPECT_LT(std::abs(x.imag()), 1e-12);
}

TEST(circuitcount, canonical_form) {
    EXPECT_EQ(minimal_rotation("RB"), minimal_rotation("BR"));
    EXPECT_EQ(minimal_rotation("RBAI"), "AIRB");
    auto t = CanonicalTerm::of("RI");
    EXPECT_TRUE(t.reduced);
    EXPECT_EQ(t.reduced_form, "rrr");
    EXPECT_FALSE(CanonicalTerm::of("RA").reduced);
    for (const auto &w : slot_words(3)) {
        std::string s = w;
        for (int r = 0; r < 3; r++) {
            std::rotate(s.begin(), s.begin() + 1, s.end());
            EXPECT_EQ(CanonicalTerm::of(s).canonical_form, CanonicalTerm::of(w).canonical_form);
        }
    }
}

TEST(circuitcount, tau_sq_count) {
    auto c = count_tau_sq();
    EXPECT_EQ(c.first_moment, 4u);
    EXPECT_EQ(c.second_moment, 10u);
    EXPECT_EQ(c.total, 14u);
}

TEST(circuitcount, rotation_values_agree) {
    auto rho = random_mixed(2, 3, 5);
    cplx a = eval_term(term_from_word("RB"), rho);
    cplx b = eval_term(term_from_word("BR"), rho);
    EXPECT_LT(std::abs(a - b), 1e-14);
    EXPECT_NEAR(a.real(), word_value(rho.matrix(), "RB").real(), 1e-12);
}

TEST(circuitcount, class_values_on_random_states) {
    double worst = 0;
    for (std::uint64_t t = 0; t < 100; t++) {
        Rng rng = Rng::for_trial(41, t);
        auto rho = random_mixed(2, 1 + t % 4, rng);
        auto rep = verify_class_values(rho);
        worst = std::max({worst, rep.max_cyclic_spread, rep.max_reduced_spread});
        for (const auto &c : rep.classes) {
            if (c.m == 1) {
                EXPECT_EQ(c.class_size, 1u);
            }
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(circuitcount, class_table_csv) {
    auto rep = verify_class_values(as_density(make_named("max_mixed")));
    std::string csv = class_table_csv(rep);
    EXPECT_EQ(csv.rfind("moment,canonical_word,class_size,sample_value\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 109);
    EXPECT_NE(csv.find("\n1,A,1,"), std::string::npos);
    std::size_t members = 0;
    for (const auto &c : rep.classes) {
        members += c.class_size;
    }
    EXPECT_EQ(members, 340u);
}
