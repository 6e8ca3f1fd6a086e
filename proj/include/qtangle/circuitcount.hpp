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

// Counting the distinct circuits of the separate-term strategy.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qtangle/errors.hpp"
#include "qtangle/momentcircuits.hpp"
#include "qtangle/states.hpp"

namespace qtangle {

inline constexpr std::size_t kCircuitBound = 111;

/// Lexicographically smallest rotation.
inline std::string minimal_rotation(std::string_view w) {
    std::string best(w);
    std::string s(w);
    for (std::size_t i = 1; i < s.size(); i++) {
        std::rotate(s.begin(), s.begin() + 1, s.end());
        best = std::min(best, s);
    }
    return best;
}

/// Word of rho-level factors: R -> "rr", A -> "ra", B -> "rb", I -> "r",
/// where r = rho, a = rho_A x 1, b = 1 x rho_B. An I slot drops a copy.
inline std::string factor_string(std::string_view word) {
    std::string out;
    for (char c : word) {
        switch (slot_from_letter(c)) {
            case SlotFactor::rho:
                out += "rr";
                break;
            case SlotFactor::rho_a_one:
                out += "ra";
                break;
            case SlotFactor::one_rho_b:
                out += "rb";
                break;
            default:
                out += "r";
        }
    }
    return out;
}

struct CanonicalTerm {
    int m = 0;
    std::string slot_word;
    std::string canonical_form;
    /// Cyclic class of the factor string; equal for words with equal value.
    std::string reduced_form;
    /// Some slot is the identity, so the term needs fewer copies.
    bool reduced = false;

    static CanonicalTerm of(std::string_view word) {
        detail::check_moment(static_cast<int>(word.size()));
        CanonicalTerm t;
        t.m = static_cast<int>(word.size());
        t.slot_word = std::string(word);
        t.canonical_form = minimal_rotation(word);
        t.reduced_form = minimal_rotation(factor_string(word));
        t.reduced = word.find('I') != std::string_view::npos;
        return t;
    }
};

/// Slot words of order m in enumeration order.
inline std::vector<std::string> slot_words(int m) {
    std::vector<std::string> out;
    for (const auto &t : enumerate_terms(m)) {
        out.push_back(t.word());
    }
    return out;
}

inline std::size_t count_raw_moment(int m) {
    detail::check_moment(m);
    return std::size_t{1} << (2 * m);
}

inline std::size_t count_raw() {
    std::size_t total = 0;
    for (int m = 1; m <= kMaxMoment; m++) {
        total += count_raw_moment(m);
    }
    return total;
}

/// (1/m) sum_{d | m} phi(d) k^{m/d}.
inline std::size_t necklace_formula(std::size_t k, std::size_t m) {
    std::size_t total = 0;
    for (std::size_t d = 1; d <= m; d++) {
        if (m % d != 0) {
            continue;
        }
        std::size_t phi = 0;
        for (std::size_t i = 1; i <= d; i++) {
            phi += std::gcd(i, d) == 1;
        }
        std::size_t power = 1;
        for (std::size_t i = 0; i < m / d; i++) {
            power *= k;
        }
        total += phi * power;
    }
    return total / m;
}

struct CountReport {
    std::array<std::size_t, kMaxMoment> raw{};
    std::size_t raw_total = 0;
    /// cyclic classes per moment, by enumeration
    std::array<std::size_t, kMaxMoment> cyclic{};
    std::size_t cyclic_total = 0;
    /// factor-string classes not already met at a lower moment
    std::array<std::size_t, kMaxMoment> reduced_new{};
    std::size_t reduced_total = 0;
    /// reduced classes minus the trivial Tr rho = 1 circuit
    std::size_t runs = 0;
    std::size_t bound = kCircuitBound;
};

/// Brute-force enumeration of cyclic classes, then Tr rho = 1 reductions.
/// Throws NumericalFailure if the enumeration disagrees with the necklace
/// formula or exceeds the bound.
inline CountReport count_canonical() {
    CountReport r;
    std::set<std::string> reduced_seen;
    for (int m = 1; m <= kMaxMoment; m++) {
        auto k = static_cast<std::size_t>(m - 1);
        std::set<std::string> classes;
        std::set<std::string> fresh;
        for (const auto &w : slot_words(m)) {
            auto t = CanonicalTerm::of(w);
            classes.insert(t.canonical_form);
            if (!reduced_seen.count(t.reduced_form)) {
                fresh.insert(t.reduced_form);
            }
        }
        reduced_seen.insert(fresh.begin(), fresh.end());
        r.raw[k] = count_raw_moment(m);
        r.cyclic[k] = classes.size();
        r.reduced_new[k] = fresh.size();
        if (r.cyclic[k] != necklace_formula(4, static_cast<std::size_t>(m))) {
            std::ostringstream ss;
            ss << "count_canonical: " << r.cyclic[k] << " classes at m = " << m << " disagree with the necklace formula";
            throw NumericalFailure(ss.str());
        }
        r.raw_total += r.raw[k];
        r.cyclic_total += r.cyclic[k];
        r.reduced_total += r.reduced_new[k];
    }
    // "r" is Tr rho = 1 and needs no run.
    r.runs = r.reduced_total - (reduced_seen.count("r") ? 1 : 0);
    if (r.cyclic_total > r.bound) {
        std::ostringstream ss;
        ss << "count_canonical: " << r.cyclic_total << " classes exceed the bound " << r.bound;
        throw NumericalFailure(ss.str());
    }
    return r;
}

struct TauSqCount {
    std::size_t first_moment = 0;
    std::size_t second_moment = 0;
    std::size_t total = 0;
};

/// p1 terms (squared classically) plus the cyclic classes of p2.
inline TauSqCount count_tau_sq() {
    TauSqCount c;
    c.first_moment = count_raw_moment(1);
    std::set<std::string> classes;
    for (const auto &w : slot_words(2)) {
        classes.insert(minimal_rotation(w));
    }
    c.second_moment = classes.size();
    c.total = c.first_moment + c.second_moment;
    return c;
}

struct ClassValue {
    int m = 0;
    std::string canonical_word;
    std::size_t class_size = 0;
    cplx sample_value;
    double spread = 0;
};

struct ClassReport {
    std::vector<ClassValue> classes;
    double max_cyclic_spread = 0;
    double max_reduced_spread = 0;
};

/// Evaluates every term and compares values inside each cyclic class and
/// each factor-string class. Terms can be complex from m = 3 on, so the
/// comparison is on complex values.
inline ClassReport verify_class_values(const DensityMatrix &rho, double tolerance = 1e-10) {
    ClassReport rep;
    std::map<std::string, std::vector<cplx>> reduced;
    for (int m = 1; m <= kMaxMoment; m++) {
        std::map<std::string, std::vector<cplx>> cyclic;
        for (const auto &t : enumerate_terms(m)) {
            auto ct = CanonicalTerm::of(t.word());
            cplx v = eval_term(t, rho);
            cyclic[ct.canonical_form].push_back(v);
            reduced[ct.reduced_form].push_back(v);
        }
        for (const auto &[word, vals] : cyclic) {
            ClassValue cv;
            cv.m = m;
            cv.canonical_word = word;
            cv.class_size = vals.size();
            cv.sample_value = eval_term(term_from_word(word), rho);
            for (const auto &v : vals) {
                cv.spread = std::max(cv.spread, std::abs(v - cv.sample_value));
            }
            rep.max_cyclic_spread = std::max(rep.max_cyclic_spread, cv.spread);
            rep.classes.push_back(cv);
        }
    }
    for (const auto &[word, vals] : reduced) {
        for (const auto &v : vals) {
            rep.max_reduced_spread = std::max(rep.max_reduced_spread, std::abs(v - vals.front()));
        }
    }
    if (rep.max_cyclic_spread > tolerance || rep.max_reduced_spread > tolerance) {
        std::ostringstream ss;
        ss << "verify_class_values: class members disagree (cyclic " << rep.max_cyclic_spread << ", reduced "
           << rep.max_reduced_spread << ")";
        throw NumericalFailure(ss.str());
    }
    return rep;
}

/// CSV with header moment,canonical_word,class_size,sample_value. The value
/// column is the real part.
inline std::string class_table_csv(const ClassReport &rep) {
    std::string out = "moment,canonical_word,class_size,sample_value\n";
    char buf[128];
    for (const auto &c : rep.classes) {
        std::snprintf(buf, sizeof buf, "%d,%s,%zu,%.17g\n", c.m, c.canonical_word.c_str(), c.class_size,
                      c.sample_value.real());
        out += buf;
    }
    return out;
}

}  // namespace qtangle
