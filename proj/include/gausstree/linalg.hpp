#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gausstree/error.hpp"

namespace gausstree {

/// Dense row-major matrix. Only used for small factors and intermediates.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric n x n matrix. Writes go through set() so both triangles stay equal.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
        if (n == 0) {
            throw std::invalid_argument("SymMatrix: dimension must be positive");
        }
    }

    static SymMatrix identity(std::size_t n) {
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.set(i, i, 1.0);
        }
        return s;
    }

    static SymMatrix diagonal(std::span<const double> d) {
        SymMatrix s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            s.set(i, i, d[i]);
        }
        return s;
    }

    /// Builds from nested rows. Rows must be square and symmetric up to a
    /// 1e-12 relative tolerance; the stored matrix is the exact symmetrization.
    static SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t n = rows.size();
        SymMatrix s(n);
        double scale = 0.0;
        for (const auto& r : rows) {
            if (r.size() != n) {
                throw std::invalid_argument("SymMatrix: rows must form a square matrix");
            }
            for (double v : r) {
                if (!std::isfinite(v)) {
                    throw std::invalid_argument("SymMatrix: non-finite entry");
                }
                scale = std::max(scale, std::abs(v));
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                if (std::abs(rows[i][j] - rows[j][i]) > 1e-12 * std::max(scale, 1.0)) {
                    throw std::invalid_argument("SymMatrix: input is not symmetric");
                }
                s.set(i, j, i == j ? rows[i][i] : 0.5 * (rows[i][j] + rows[j][i]));
            }
        }
        return s;
    }

    static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        std::vector<std::vector<double>> v;
        for (const auto& r : rows) {
            v.emplace_back(r);
        }
        return from_rows(v);
    }

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, double v) noexcept {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }

    std::vector<std::vector<double>> rows() const {
        std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                out[i][j] = (*this)(i, j);
            }
        }
        return out;
    }

    SymMatrix scaled(double c) const {
        SymMatrix s = *this;
        for (double& v : s.data_) {
            v *= c;
        }
        return s;
    }

    /// Principal submatrix on `idx`, in the order given.
    SymMatrix submatrix(std::span<const std::size_t> idx) const {
        SymMatrix s(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) {
            for (std::size_t b = a; b < idx.size(); ++b) {
                s.set(a, b, (*this)(idx[a], idx[b]));
            }
        }
        return s;
    }

    double max_abs_diff(const SymMatrix& other) const {
        if (other.n_ != n_) {
            throw std::invalid_argument("SymMatrix: dimension mismatch");
        }
        double d = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            d = std::max(d, std::abs(data_[i] - other.data_[i]));
        }
        return d;
    }

    bool operator==(const SymMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Cholesky pivots at or below this value are rejected as not positive definite.
inline constexpr double kPivotTolerance = 1e-12;

/// Lower-triangular L with S = L L^T.
inline Matrix cholesky(const SymMatrix& s) {
    const std::size_t n = s.size();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            d -= l(j, k) * l(j, k);
        }
        if (!(d > kPivotTolerance)) {
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is " + std::to_string(d));
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                v -= l(i, k) * l(j, k);
            }
            l(i, j) = v / ljj;
        }
    }
    return l;
}

inline bool is_positive_definite(const SymMatrix& s) {
    try {
        (void)cholesky(s);
        return true;
    } catch (const NotPositiveDefinite&) {
        return false;
    }
}

namespace detail {

// Partial-pivot LU on a copy; returns (sign, log|det|) with sign 0 for singular input.
inline std::pair<int, double> lu_log_det(const SymMatrix& s) {
    const std::size_t n = s.size();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = s(i, j);
        }
    }
    int sign = 1;
    double log_abs = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a(r, c)) > std::abs(a(p, c))) {
                p = r;
            }
        }
        if (a(p, c) == 0.0) {
            return {0, -INFINITY};
        }
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(p, j), a(c, j));
            }
            sign = -sign;
        }
        const double piv = a(c, c);
        if (piv < 0) {
            sign = -sign;
        }
        log_abs += std::log(std::abs(piv));
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a(r, c) / piv;
            for (std::size_t j = c + 1; j < n; ++j) {
                a(r, j) -= f * a(c, j);
            }
        }
    }
    return {sign, log_abs};
}

} // namespace detail

/// Determinant: closed form for n <= 3, partial-pivot LU above that.
inline double determinant(const SymMatrix& s) {
    switch (s.size()) {
    case 1:
        return s(0, 0);
    case 2:
        return s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1);
    case 3:
        return s(0, 0) * (s(1, 1) * s(2, 2) - s(1, 2) * s(1, 2))
             - s(0, 1) * (s(0, 1) * s(2, 2) - s(1, 2) * s(0, 2))
             + s(0, 2) * (s(0, 1) * s(1, 2) - s(1, 1) * s(0, 2));
    default: {
        const auto [sign, log_abs] = detail::lu_log_det(s);
        return sign == 0 ? 0.0 : sign * std::exp(log_abs);
    }
    }
}

/// Natural log of a positive determinant; throws SingularSubmatrix otherwise.
/// Stays finite for large block-diagonal matrices where determinant() would overflow.
inline double log_determinant(const SymMatrix& s) {
    if (s.size() <= 3) {
        const double d = determinant(s);
        if (!(d > 0.0)) {
            throw SingularSubmatrix("determinant is not positive: " + std::to_string(d));
        }
        return std::log(d);
    }
    const auto [sign, log_abs] = detail::lu_log_det(s);
    if (sign <= 0) {
        throw SingularSubmatrix("determinant is not positive");
    }
    return log_abs;
}

/// Inverse of a positive-definite matrix through its Cholesky factor.
inline SymMatrix inverse_pd(const SymMatrix& s) {
    const std::size_t n = s.size();
    const Matrix l = cholesky(s);
    // Invert L column by column (forward substitution), then S^-1 = L^-T L^-1.
    Matrix linv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        linv(c, c) = 1.0 / l(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            double v = 0.0;
            for (std::size_t k = c; k < i; ++k) {
                v -= l(i, k) * linv(k, c);
            }
            linv(i, c) = v / l(i, i);
        }
    }
    SymMatrix inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double v = 0.0;
            for (std::size_t k = j; k < n; ++k) {
                v += linv(k, i) * linv(k, j);
            }
            inv.set(i, j, v);
        }
    }
    return inv;
}

/// m x k block of i.i.d. draws, stored column-major so each variable is a contiguous span.
class SampleBatch {
public:
    SampleBatch() = default;

    /// `columns[j]` holds the m draws of variable j.
    SampleBatch(std::vector<std::vector<double>> columns, std::uint64_t seed = 0, std::string origin = {})
        : seed_(seed), origin_(std::move(origin)) {
        if (columns.empty() || columns.front().empty()) {
            throw std::invalid_argument("SampleBatch: need m >= 1 and k >= 1");
        }
        k_ = columns.size();
        m_ = columns.front().size();
        data_.reserve(m_ * k_);
        for (const auto& c : columns) {
            if (c.size() != m_) {
                throw LengthMismatch("SampleBatch: columns have different lengths");
            }
            for (double v : c) {
                if (!std::isfinite(v)) {
                    throw std::invalid_argument("SampleBatch: non-finite entry");
                }
            }
            data_.insert(data_.end(), c.begin(), c.end());
        }
    }

    static SampleBatch from_rows(const std::vector<std::vector<double>>& rows, std::uint64_t seed = 0,
                                 std::string origin = {}) {
        if (rows.empty() || rows.front().empty()) {
            throw std::invalid_argument("SampleBatch: need m >= 1 and k >= 1");
        }
        const std::size_t k = rows.front().size();
        std::vector<std::vector<double>> cols(k, std::vector<double>(rows.size()));
        for (std::size_t t = 0; t < rows.size(); ++t) {
            if (rows[t].size() != k) {
                throw LengthMismatch("SampleBatch: ragged rows");
            }
            for (std::size_t j = 0; j < k; ++j) {
                cols[j][t] = rows[t][j];
            }
        }
        return SampleBatch(std::move(cols), seed, std::move(origin));
    }

    /// Adopts `data` laid out column-major (entry (t, j) at j*m + t).
    static SampleBatch from_column_major(std::size_t m, std::size_t k, std::vector<double> data,
                                         std::uint64_t seed = 0, std::string origin = {}) {
        if (m == 0 || k == 0) {
            throw std::invalid_argument("SampleBatch: need m >= 1 and k >= 1");
        }
        if (data.size() != m * k) {
            throw LengthMismatch("SampleBatch: data size is not m * k");
        }
        for (double v : data) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("SampleBatch: non-finite entry");
            }
        }
        SampleBatch b;
        b.m_ = m;
        b.k_ = k;
        b.data_ = std::move(data);
        b.seed_ = seed;
        b.origin_ = std::move(origin);
        return b;
    }

    std::size_t rows() const noexcept { return m_; }
    std::size_t cols() const noexcept { return k_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& origin() const noexcept { return origin_; }

    std::span<const double> column(std::size_t j) const {
        if (j >= k_) {
            throw std::out_of_range("SampleBatch: column index out of range");
        }
        return {data_.data() + j * m_, m_};
    }

    double operator()(std::size_t t, std::size_t j) const noexcept { return data_[j * m_ + t]; }

    bool operator==(const SampleBatch&) const = default;

private:
    std::size_t m_ = 0;
    std::size_t k_ = 0;
    std::vector<double> data_;
    std::uint64_t seed_ = 0;
    std::string origin_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("dot: lengths differ");
    }
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct CovarianceOptions {
    bool centered = false; ///< subtract column means first
    bool unbiased = false; ///< divide by m - 1 instead of m (requires centered)
};

/// Empirical second-moment matrix of a batch, 1/m-normalized by default.
inline SymMatrix empirical_covariance(const SampleBatch& batch, CovarianceOptions opts = {}) {
    const std::size_t m = batch.rows();
    const std::size_t k = batch.cols();
    if (opts.unbiased && !opts.centered) {
        throw std::invalid_argument("empirical_covariance: unbiased normalization requires centering");
    }
    if (opts.centered && m < 2) {
        throw InsufficientSamples("empirical_covariance: centering needs m >= 2");
    }
    std::vector<std::vector<double>> cols(k);
    for (std::size_t j = 0; j < k; ++j) {
        auto c = batch.column(j);
        cols[j].assign(c.begin(), c.end());
        if (opts.centered) {
            const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(m);
            for (double& v : cols[j]) {
                v -= mean;
            }
        }
    }
    const double denom = static_cast<double>(opts.unbiased ? m - 1 : m);
    SymMatrix s(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            s.set(i, j, dot(cols[i], cols[j]) / denom);
        }
        if (s(i, i) == 0.0) {
            throw DegenerateSample("empirical_covariance: constant column", i);
        }
    }
    return s;
}

} // namespace gausstree
