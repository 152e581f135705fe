#pragma once

// Graphical lasso baseline:
//   argmin_{Theta > 0} tr(S Theta) - log det Theta + lambda * sum_ij |Theta_ij|
// solved by exact block coordinate descent on the primal, one row/column of
// Theta at a time. Each block step solves a lasso sub-problem to high accuracy,
// so the objective never increases and every iterate stays positive definite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gausstree/error.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/structure_learning.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

struct GlassoOptions {
    double tol = 1e-6;          ///< max KKT residual at convergence
    std::size_t max_iter = 500; ///< outer sweeps over all columns
    std::size_t inner_max_iter = 10000;
    double inner_tol = 1e-13;
};

struct GlassoResult {
    SymMatrix theta;
    double lambda = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    std::vector<double> objective_trace; ///< objective after initialization and after each sweep
};

inline double glasso_objective(const SymMatrix& s, const SymMatrix& theta, double lambda) {
    const std::size_t n = s.size();
    double tr = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            tr += s(i, j) * theta(j, i);
            l1 += std::abs(theta(i, j));
        }
    }
    return tr - log_determinant(theta) + lambda * l1;
}

/// Largest violation of the stationarity conditions W - S = lambda * sign(Theta)
/// (subgradient in [-lambda, lambda] where Theta_ij = 0), W = Theta^-1.
inline double glasso_kkt_residual(const SymMatrix& s, const SymMatrix& theta, double lambda) {
    const SymMatrix w = inverse_pd(theta);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i; j < s.size(); ++j) {
            const double g = w(i, j) - s(i, j);
            const double r = theta(i, j) != 0.0 ? std::abs(g - lambda * (theta(i, j) > 0 ? 1.0 : -1.0))
                                                : std::max(0.0, std::abs(g) - lambda);
            worst = std::max(worst, r);
        }
    }
    return worst;
}

namespace detail {

inline double soft_threshold(double u, double lambda) noexcept {
    if (u > lambda) {
        return u - lambda;
    }
    if (u < -lambda) {
        return u + lambda;
    }
    return 0.0;
}

// Minimizes s^T b + 1/2 b^T A b + lambda |b|_1 by cyclic coordinate descent, warm-started at b.
inline void lasso_cd(const Matrix& a, const std::vector<double>& s, double lambda, std::vector<double>& b,
                     std::size_t max_iter, double tol) {
    const std::size_t p = b.size();
    for (std::size_t it = 0; it < max_iter; ++it) {
        double max_delta = 0.0;
        double max_coef = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            double r = s[k];
            for (std::size_t l = 0; l < p; ++l) {
                if (l != k) {
                    r += a(k, l) * b[l];
                }
            }
            const double next = -soft_threshold(r, lambda) / a(k, k);
            max_delta = std::max(max_delta, std::abs(next - b[k]));
            max_coef = std::max(max_coef, std::abs(next));
            b[k] = next;
        }
        if (max_delta <= tol * std::max(1.0, max_coef)) {
            return;
        }
    }
}

} // namespace detail

inline GlassoResult graphical_lasso(const SymMatrix& s, double lambda, GlassoOptions opts = {}) {
    const std::size_t n = s.size();
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("graphical_lasso: lambda must be >= 0");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(s(i, i) > 0.0)) {
            throw std::invalid_argument("graphical_lasso: covariance diagonal must be positive");
        }
    }
    SymMatrix shifted = s;
    for (std::size_t i = 0; i < n; ++i) {
        shifted.set(i, i, s(i, i) + lambda);
    }
    (void)cholesky(shifted); // S + lambda I must be PD for the problem to be bounded

    GlassoResult res;
    res.lambda = lambda;
    res.theta = SymMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        res.theta.set(i, i, 1.0 / (s(i, i) + lambda));
    }
    res.objective_trace.push_back(glasso_objective(s, res.theta, lambda));
    res.kkt_residual = glasso_kkt_residual(s, res.theta, lambda);
    if (res.kkt_residual <= opts.tol) {
        res.converged = true;
        return res;
    }
    if (n == 1) {
        res.converged = true;
        return res;
    }

    std::vector<std::size_t> rest(n - 1);
    std::vector<double> s12(n - 1);
    std::vector<double> b(n - 1);
    for (std::size_t sweep = 1; sweep <= opts.max_iter; ++sweep) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0, r = 0; k < n; ++k) {
                if (k != j) {
                    rest[r++] = k;
                }
            }
            const SymMatrix inv11 = inverse_pd(res.theta.submatrix(rest));
            const double scale = s(j, j) + lambda;
            Matrix a(n - 1, n - 1);
            for (std::size_t p = 0; p < n - 1; ++p) {
                for (std::size_t q = 0; q < n - 1; ++q) {
                    a(p, q) = scale * inv11(p, q);
                }
                s12[p] = s(rest[p], j);
                b[p] = res.theta(rest[p], j);
            }
            detail::lasso_cd(a, s12, lambda, b, opts.inner_max_iter, opts.inner_tol);
            double quad = 0.0;
            for (std::size_t p = 0; p < n - 1; ++p) {
                for (std::size_t q = 0; q < n - 1; ++q) {
                    quad += b[p] * inv11(p, q) * b[q];
                }
            }
            for (std::size_t p = 0; p < n - 1; ++p) {
                res.theta.set(rest[p], j, b[p]);
            }
            res.theta.set(j, j, 1.0 / scale + quad);
        }
        res.iterations = sweep;
        res.objective_trace.push_back(glasso_objective(s, res.theta, lambda));
        res.kkt_residual = glasso_kkt_residual(s, res.theta, lambda);
        if (res.kkt_residual <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

/// Tree read off a precision matrix: maximum spanning tree over |Theta_ij|.
/// For three variables this drops the smallest off-diagonal entry, and on ties
/// drops the lexicographically larger pair.
inline Tree precision_to_tree(const SymMatrix& theta) {
    const std::size_t n = theta.size();
    WeightedEdgeList w(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            w.set(i, j, std::abs(theta(i, j)));
        }
    }
    return maximum_spanning_tree(w);
}

} // namespace gausstree
