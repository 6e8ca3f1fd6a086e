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

#include "qtangle/linalg.hpp"

#include "gtest/gtest.h"
#include "qtangle/rng.hpp"

using namespace qtangle;

namespace {

const CMatrix X = CMatrix::from_rows({{0, 1}, {1, 0}});
const CMatrix SY = CMatrix::from_rows({{0, cplx(0, 1)}, {cplx(0, -1), 0}});

CMatrix random_matrix(Rng &rng, std::size_t r, std::size_t c) {
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; i++) {
        for (std::size_t j = 0; j < c; j++) {
            m(i, j) = rng.complex_normal();
        }
    }
    return m;
}

CMatrix random_hermitian(Rng &rng, std::size_t n) {
    CMatrix g = random_matrix(rng, n, n);
    return (g + g.adjoint()) * cplx(0.5);
}

}  // namespace

TEST(linalg, matmul_examples) {
    ASSERT_EQ(CMatrix::identity(2) * X, X);
    ASSERT_EQ(X * X, CMatrix::identity(2));
    ASSERT_EQ(CMatrix::diagonal({1, 2}) * CMatrix::diagonal({3, 4}), CMatrix::diagonal({3, 8}));
    ASSERT_THROW(matmul(CMatrix(2, 3), CMatrix(2, 3)), InvalidInput);
}

TEST(linalg, kron_examples) {
    ASSERT_EQ(kron(CMatrix::identity(2), CMatrix::identity(2)), CMatrix::identity(4));

    // sy x sy by hand: anti-diagonal (-1, 1, 1, -1).
    CMatrix yy = kron(SY, SY);
    CMatrix expected(4, 4);
    expected(0, 3) = -1;
    expected(1, 2) = 1;
    expected(2, 1) = 1;
    expected(3, 0) = -1;
    ASSERT_EQ(yy, expected);

    CMatrix zero_proj = CMatrix::diagonal({1, 0});
    ASSERT_EQ(kron(zero_proj, CMatrix::identity(2)), CMatrix::diagonal({1, 1, 0, 0}));
}

TEST(linalg, kron_mixed_product_property) {
    Rng rng(11);
    for (int trial = 0; trial < 200; trial++) {
        CMatrix a = random_matrix(rng, 2, 3), b = random_matrix(rng, 3, 2);
        CMatrix c = random_matrix(rng, 3, 2), d = random_matrix(rng, 2, 4);
        ASSERT_LT(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)), 1e-12);
    }
}

TEST(linalg, partial_trace_examples) {
    double s = std::sqrt(0.5);
    std::vector<cplx> bell{s, 0, 0, s};
    CMatrix rho = CMatrix::outer(bell, bell);
    ASSERT_LT(max_abs_diff(partial_trace(rho, {2, 2}, {0}), CMatrix::identity(2) * cplx(0.5)), 1e-15);

    CMatrix product = kron(CMatrix::diagonal({1, 0}), CMatrix::diagonal({0, 1}));
    ASSERT_EQ(partial_trace(product, {2, 2}, {1}), CMatrix::diagonal({0, 1}));

    CMatrix mixed = CMatrix::identity(4) * cplx(0.25);
    ASSERT_EQ(partial_trace(mixed, {2, 2}, {0}), CMatrix::identity(2) * cplx(0.5));
}

TEST(linalg, partial_trace_keeps_order_and_traces) {
    Rng rng(5);
    CMatrix a = random_hermitian(rng, 2), b = random_hermitian(rng, 2), c = random_hermitian(rng, 2);
    CMatrix abc = kron(kron(a, b), c);
    CMatrix ac = partial_trace(abc, {2, 2, 2}, {2, 0});
    ASSERT_LT(max_abs_diff(ac, kron(a, c) * b.trace()), 1e-12);

    for (int trial = 0; trial < 100; trial++) {
        CMatrix m = random_matrix(rng, 8, 8);
        for (std::vector<std::size_t> keep : {std::vector<std::size_t>{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}}) {
            ASSERT_LT(std::abs(partial_trace(m, {2, 2, 2}, keep).trace() - m.trace()), 1e-12);
        }
    }
}

TEST(linalg, partial_trace_errors) {
    ASSERT_THROW(partial_trace(CMatrix::identity(4), {2, 3}, {0}), InvalidInput);
    ASSERT_THROW(partial_trace(CMatrix::identity(4), {2, 2}, {}), InvalidInput);
    ASSERT_THROW(partial_trace(CMatrix::identity(4), {2, 2}, {2}), InvalidInput);
}

TEST(linalg, partial_transpose_of_product) {
    Rng rng(8);
    CMatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2);
    ASSERT_LT(max_abs_diff(partial_transpose(kron(a, b), {2, 2}, 1), kron(a, b.transpose())), 1e-15);
    ASSERT_LT(max_abs_diff(partial_transpose(kron(a, b), {2, 2}, 0), kron(a.transpose(), b)), 1e-15);
}

TEST(linalg, herm_eig_examples) {
    auto e = herm_eig(CMatrix::diagonal({3, 1}));
    ASSERT_EQ(e.eigenvalues, (std::vector<double>{3, 1}));

    e = herm_eig(X);
    ASSERT_NEAR(e.eigenvalues[0], 1, 1e-14);
    ASSERT_NEAR(e.eigenvalues[1], -1, 1e-14);
    // Columns are |+> and |-> up to phase.
    double s = std::sqrt(0.5);
    ASSERT_NEAR(std::abs(e.eigenvectors(0, 0) * s + e.eigenvectors(1, 0) * s), 1, 1e-14);
    ASSERT_NEAR(std::abs(e.eigenvectors(0, 1) * s - e.eigenvectors(1, 1) * s), 1, 1e-14);

    e = herm_eig(CMatrix::from_rows({{2, 1}, {1, 2}}));
    ASSERT_NEAR(e.eigenvalues[0], 3, 1e-14);
    ASSERT_NEAR(e.eigenvalues[1], 1, 1e-14);

    ASSERT_THROW(herm_eig(CMatrix::from_rows({{0, 1}, {0, 0}})), InvalidInput);
}

TEST(linalg, herm_eig_reconstruction_property) {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; trial++) {
        CMatrix h = random_hermitian(rng, 4);
        auto e = herm_eig(h);
        for (std::size_t k = 1; k < 4; k++) {
            ASSERT_GE(e.eigenvalues[k - 1], e.eigenvalues[k]);
        }
        CMatrix rebuilt = spectral_apply(e, [](double w) { return w; });
        ASSERT_LT(max_abs_diff(rebuilt, h), 1e-10);
        ASSERT_LT(max_abs_diff(e.eigenvectors.adjoint() * e.eigenvectors, CMatrix::identity(4)), 1e-10);
    }
}

TEST(linalg, psd_sqrt_examples) {
    ASSERT_LT(max_abs_diff(psd_sqrt(CMatrix::identity(4)), CMatrix::identity(4)), 1e-15);
    ASSERT_LT(max_abs_diff(psd_sqrt(CMatrix::diagonal({4, 0})), CMatrix::diagonal({2, 0})), 1e-15);
    double s = std::sqrt(0.5);
    std::vector<cplx> bell{s, 0, 0, s};
    CMatrix rho = CMatrix::outer(bell, bell);
    ASSERT_LT(max_abs_diff(psd_sqrt(rho), rho), 1e-12);
    ASSERT_THROW(psd_sqrt(CMatrix::diagonal({1, -1e-6})), InvalidInput);
    ASSERT_NO_THROW(psd_sqrt(CMatrix::diagonal({1, -1e-12})));
}

TEST(linalg, psd_sqrt_property) {
    Rng rng(77);
    for (int trial = 0; trial < 1000; trial++) {
        CMatrix g = random_matrix(rng, 4, 1 + trial % 4);
        CMatrix m = g * g.adjoint();
        CMatrix s = psd_sqrt(m);
        ASSERT_TRUE(is_hermitian(s, 1e-12));
        ASSERT_LT(max_abs_diff(s * s, m), 1e-9);
        ASSERT_GE(herm_eig(s).eigenvalues.back(), -1e-10);
    }
}

TEST(linalg, rejects_non_finite) {
    ASSERT_THROW(CMatrix(1, 1, {cplx(NAN, 0)}), InvalidInput);
    ASSERT_THROW(CMatrix(2, 2, {1, 2, 3}), InvalidInput);
}
