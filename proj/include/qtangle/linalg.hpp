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

// Dense complex matrices and the handful of kernels the rest of the library
// is built from. Everything here is small (at most a few thousand rows), so
// storage is a flat row-major vector and algorithms are the textbook ones.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtangle/errors.hpp"

namespace qtangle {

using cplx = std::complex<double>;
using Dims = std::vector<std::size_t>;

class CMatrix {
   public:
    CMatrix() = default;

    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    }

    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            std::ostringstream ss;
            ss << "CMatrix: " << rows_ << "x" << cols_ << " needs " << rows_ * cols_ << " entries, got "
               << data_.size();
            throw InvalidInput(ss.str());
        }
        for (const auto &z : data_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw InvalidInput("CMatrix: non-finite entry");
            }
        }
    }

    /// Row-major nested initializer, e.g. `CMatrix::from_rows({{0, 1}, {1, 0}})`.
    static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<cplx> data;
        data.reserve(r * c);
        for (const auto &row : rows) {
            if (row.size() != c) {
                throw InvalidInput("CMatrix::from_rows: ragged rows");
            }
            data.insert(data.end(), row.begin(), row.end());
        }
        return CMatrix(r, c, std::move(data));
    }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; i++) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static CMatrix diagonal(std::span<const cplx> d) {
        CMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); i++) {
            m(i, i) = d[i];
        }
        return m;
    }

    static CMatrix diagonal(std::initializer_list<cplx> d) {
        return diagonal(std::span<const cplx>(d.begin(), d.size()));
    }

    /// |v><w|
    static CMatrix outer(std::span<const cplx> v, std::span<const cplx> w) {
        CMatrix m(v.size(), w.size());
        for (std::size_t i = 0; i < v.size(); i++) {
            for (std::size_t j = 0; j < w.size(); j++) {
                m(i, j) = v[i] * std::conj(w[j]);
            }
        }
        return m;
    }

    std::size_t rows() const noexcept {
        return rows_;
    }
    std::size_t cols() const noexcept {
        return cols_;
    }
    bool is_square() const noexcept {
        return rows_ == cols_;
    }

    cplx &operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }
    const cplx &operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    std::span<const cplx> data() const noexcept {
        return data_;
    }

    CMatrix adjoint() const {
        CMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; i++) {
            for (std::size_t j = 0; j < cols_; j++) {
                out(j, i) = std::conj((*this)(i, j));
            }
        }
        return out;
    }

    CMatrix transpose() const {
        CMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; i++) {
            for (std::size_t j = 0; j < cols_; j++) {
                out(j, i) = (*this)(i, j);
            }
        }
        return out;
    }

    CMatrix conjugate() const {
        CMatrix out = *this;
        for (auto &z : out.data_) {
            z = std::conj(z);
        }
        return out;
    }

    cplx trace() const {
        require_square("trace");
        cplx t = 0;
        for (std::size_t i = 0; i < rows_; i++) {
            t += (*this)(i, i);
        }
        return t;
    }

    CMatrix &operator+=(const CMatrix &o) {
        require_same_shape(o, "+");
        for (std::size_t k = 0; k < data_.size(); k++) {
            data_[k] += o.data_[k];
        }
        return *this;
    }
    CMatrix &operator-=(const CMatrix &o) {
        require_same_shape(o, "-");
        for (std::size_t k = 0; k < data_.size(); k++) {
            data_[k] -= o.data_[k];
        }
        return *this;
    }
    CMatrix &operator*=(cplx s) {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix &b) {
        return a += b;
    }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) {
        return a -= b;
    }
    friend CMatrix operator*(CMatrix a, cplx s) {
        return a *= s;
    }
    friend CMatrix operator*(cplx s, CMatrix a) {
        return a *= s;
    }
    friend CMatrix operator*(const CMatrix &a, const CMatrix &b);

    bool operator==(const CMatrix &o) const = default;

   private:
    void require_square(const char *op) const {
        if (rows_ != cols_) {
            throw InvalidInput(std::string("CMatrix::") + op + ": matrix is not square");
        }
    }
    void require_same_shape(const CMatrix &o, const char *op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw InvalidInput(std::string("CMatrix ") + op + ": shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline CMatrix matmul(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows()) {
        std::ostringstream ss;
        ss << "matmul: dimension mismatch " << a.rows() << "x" << a.cols() << " * " << b.rows() << "x"
           << b.cols();
        throw InvalidInput(ss.str());
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t k = 0; k < a.cols(); k++) {
            cplx aik = a(i, k);
            if (aik == cplx(0)) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); j++) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

inline CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    return matmul(a, b);
}

/// Kronecker product; the left factor is the slow index.
inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t j = 0; j < a.cols(); j++) {
            cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); k++) {
                for (std::size_t l = 0; l < b.cols(); l++) {
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

inline double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidInput("max_abs_diff: shape mismatch");
    }
    double m = 0;
    for (std::size_t k = 0; k < a.data().size(); k++) {
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    }
    return m;
}

inline double max_abs(const CMatrix &a) {
    double m = 0;
    for (const auto &z : a.data()) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

inline double frobenius_norm(const CMatrix &a) {
    double s = 0;
    for (const auto &z : a.data()) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

/// Largest |m - m^dagger| entry; zero for exactly Hermitian input.
inline double hermiticity_defect(const CMatrix &m) {
    if (!m.is_square()) {
        return INFINITY;
    }
    double d = 0;
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = i; j < m.cols(); j++) {
            d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    }
    return d;
}

inline bool is_hermitian(const CMatrix &m, double tol = 1e-10) {
    return hermiticity_defect(m) <= tol * std::max(1.0, max_abs(m));
}

inline bool is_unitary(const CMatrix &u, double tol = 1e-10) {
    if (!u.is_square()) {
        return false;
    }
    return max_abs_diff(u.adjoint() * u, CMatrix::identity(u.rows())) <= tol;
}

namespace detail {

inline std::size_t product(const Dims &dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline std::vector<std::size_t> strides(const Dims &dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) {
        s[k - 1] = s[k] * dims[k];
    }
    return s;
}

}  // namespace detail

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// ascending order.
inline CMatrix partial_trace(const CMatrix &m, const Dims &dims, std::vector<std::size_t> keep) {
    std::size_t total = detail::product(dims);
    if (!m.is_square() || m.rows() != total) {
        std::ostringstream ss;
        ss << "partial_trace: dims multiply to " << total << " but matrix is " << m.rows() << "x" << m.cols();
        throw InvalidInput(ss.str());
    }
    if (keep.empty()) {
        throw InvalidInput("partial_trace: empty keep set");
    }
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end() || keep.back() >= dims.size()) {
        throw InvalidInput("partial_trace: keep set has duplicates or out-of-range subsystems");
    }

    auto stride = detail::strides(dims);
    std::vector<bool> kept(dims.size(), false);
    Dims kept_dims;
    for (auto k : keep) {
        kept[k] = true;
        kept_dims.push_back(dims[k]);
    }
    auto kept_stride = detail::strides(kept_dims);

    // Split a full index into (kept index, traced index) pair.
    std::vector<std::size_t> kidx(total), tidx(total);
    for (std::size_t i = 0; i < total; i++) {
        std::size_t ki = 0, ti = 0, kpos = 0;
        for (std::size_t s = 0; s < dims.size(); s++) {
            std::size_t digit = (i / stride[s]) % dims[s];
            if (kept[s]) {
                ki += digit * kept_stride[kpos++];
            } else {
                ti = ti * dims[s] + digit;
            }
        }
        kidx[i] = ki;
        tidx[i] = ti;
    }

    std::size_t out_dim = detail::product(kept_dims);
    CMatrix out(out_dim, out_dim);
    for (std::size_t r = 0; r < total; r++) {
        for (std::size_t c = 0; c < total; c++) {
            if (tidx[r] == tidx[c]) {
                out(kidx[r], kidx[c]) += m(r, c);
            }
        }
    }
    return out;
}

/// Transposes subsystem `sys` in the computational basis.
inline CMatrix partial_transpose(const CMatrix &m, const Dims &dims, std::size_t sys) {
    std::size_t total = detail::product(dims);
    if (!m.is_square() || m.rows() != total || sys >= dims.size()) {
        throw InvalidInput("partial_transpose: dims do not match matrix");
    }
    auto stride = detail::strides(dims);
    CMatrix out(total, total);
    for (std::size_t r = 0; r < total; r++) {
        for (std::size_t c = 0; c < total; c++) {
            std::size_t dr = (r / stride[sys]) % dims[sys];
            std::size_t dc = (c / stride[sys]) % dims[sys];
            std::size_t r2 = r - dr * stride[sys] + dc * stride[sys];
            std::size_t c2 = c - dc * stride[sys] + dr * stride[sys];
            out(r2, c2) = m(r, c);
        }
    }
    return out;
}

struct HermEig {
    std::vector<double> eigenvalues;  // descending
    CMatrix eigenvectors;             // columns, matching eigenvalues
};

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot element, then applies
/// the real symmetric Jacobi rotation to the resulting 2x2 block. Sweeps stop
/// once the off-diagonal Frobenius norm falls to rounding level (at most 100
/// sweeps; failure to get below 1e-12 relative is reported).
inline HermEig herm_eig(const CMatrix &m, double hermitian_tol = 1e-10) {
    if (!m.is_square()) {
        throw InvalidInput("herm_eig: matrix is not square");
    }
    double scale = std::max(1.0, max_abs(m));
    double defect = hermiticity_defect(m);
    if (defect > hermitian_tol * scale) {
        std::ostringstream ss;
        ss << "herm_eig: input is not Hermitian (max |m - m^dagger| = " << defect << ")";
        throw InvalidInput(ss.str());
    }

    const std::size_t n = m.rows();
    CMatrix a = m;
    // Symmetrize away the tolerated defect so rotations stay exactly Hermitian.
    for (std::size_t i = 0; i < n; i++) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; j++) {
            cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    CMatrix v = CMatrix::identity(n);

    auto off_norm = [&]() {
        double s = 0;
        for (std::size_t i = 0; i < n; i++) {
            for (std::size_t j = 0; j < n; j++) {
                if (i != j) {
                    s += std::norm(a(i, j));
                }
            }
        }
        return std::sqrt(s);
    };
    const double norm = std::max(frobenius_norm(a), 1e-300);

    int sweep = 0;
    for (; sweep < 100; sweep++) {
        double off = off_norm();
        if (off <= 1e-15 * norm) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; p++) {
            for (std::size_t q = p + 1; q < n; q++) {
                cplx apq = a(p, q);
                double g = std::abs(apq);
                if (g <= 1e-300) {
                    continue;
                }
                cplx phase_conj = std::conj(apq / g);
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double theta = (aqq - app) / (2.0 * g);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
                cplx jpp = c, jpq = s, jqp = -s * phase_conj, jqq = c * phase_conj;

                for (std::size_t k = 0; k < n; k++) {
                    cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; k++) {
                    cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; k++) {
                    cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if (off_norm() > 1e-12 * std::max(1.0, norm)) {
        throw NumericalFailure("herm_eig: Jacobi sweeps did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
    HermEig out{std::vector<double>(n), CMatrix(n, n)};
    for (std::size_t k = 0; k < n; k++) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; r++) {
            out.eigenvectors(r, k) = v(r, order[k]);
        }
    }
    return out;
}

/// Eigenvalues only, descending.
inline std::vector<double> herm_eigenvalues(const CMatrix &m) {
    return herm_eig(m).eigenvalues;
}

/// Builds V diag(f(w)) V^dagger from an eigendecomposition.
template <typename F>
CMatrix spectral_apply(const HermEig &eig, F &&f) {
    const std::size_t n = eig.eigenvalues.size();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; k++) {
        double fk = f(eig.eigenvalues[k]);
        if (fk == 0) {
            continue;
        }
        for (std::size_t i = 0; i < n; i++) {
            cplx vik = eig.eigenvectors(i, k) * fk;
            for (std::size_t j = 0; j < n; j++) {
                out(i, j) += vik * std::conj(eig.eigenvectors(j, k));
            }
        }
    }
    return out;
}

/// Hermitian PSD square root. Eigenvalues in [-1e-10, 0) are treated as zero.
inline CMatrix psd_sqrt(const CMatrix &m) {
    HermEig eig = herm_eig(m);
    double lowest = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
    if (lowest < -1e-10) {
        std::ostringstream ss;
        ss << "psd_sqrt: matrix has eigenvalue " << lowest << " < -1e-10";
        throw InvalidInput(ss.str());
    }
    return spectral_apply(eig, [](double w) { return w > 0 ? std::sqrt(w) : 0.0; });
}

}  // namespace qtangle
