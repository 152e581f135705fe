#pragma once

// Population-level Gaussian quantities. Everything here is exact (closed form)
// and serves as the ground truth the sample-based estimators are checked against.
// All information quantities are in nats.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausstree/distribution.hpp"
#include "gausstree/error.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

using IndexSet = std::vector<std::size_t>;

/// Three-variable linear structural model in (X, Y, Z) order:
///   Z = mu_z + N(0, a^2),  X = mu_x + alpha (Z - mu_z) + N(0, b^2),
///   Y = mu_y + beta (X - mu_x) + gamma (Z - mu_z) + N(0, c^2).
struct LinearSEM3 {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double mu_x = 0.0;
    double mu_y = 0.0;
    double mu_z = 0.0;

    void validate() const {
        if (!(a > 0.0 && b > 0.0 && c > 0.0)) {
            throw std::invalid_argument("LinearSEM3: standard deviations a, b, c must be positive");
        }
    }
};

/// A tree together with the Gaussian that is Markov on it.
struct TreeGaussian {
    Tree tree;
    GaussianDistribution base;
};

namespace detail {

inline void check_index_set(const IndexSet& s, std::size_t n, const char* name) {
    if (s.empty()) {
        throw std::invalid_argument(std::string("index set ") + name + " is empty");
    }
    for (std::size_t i : s) {
        if (i >= n) {
            throw std::invalid_argument(std::string("index set ") + name + " has out-of-range index "
                                        + std::to_string(i));
        }
    }
}

inline bool disjoint(const IndexSet& a, const IndexSet& b) {
    for (std::size_t i : a) {
        if (std::find(b.begin(), b.end(), i) != b.end()) {
            return false;
        }
    }
    return true;
}

inline IndexSet sorted_union(const IndexSet& a, const IndexSet& b) {
    IndexSet u = a;
    u.insert(u.end(), b.begin(), b.end());
    std::sort(u.begin(), u.end());
    return u;
}

inline double sub_log_det(const SymMatrix& cov, IndexSet idx) {
    std::sort(idx.begin(), idx.end());
    return log_determinant(cov.submatrix(idx));
}

} // namespace detail

/// I(X_S; X_T) = 1/2 ln(det M_S det M_T / det M_{S u T}) for a covariance matrix.
inline double gaussian_mi(const SymMatrix& cov, const IndexSet& s, const IndexSet& t) {
    detail::check_index_set(s, cov.size(), "S");
    detail::check_index_set(t, cov.size(), "T");
    if (!detail::disjoint(s, t)) {
        throw std::invalid_argument("gaussian_mi: S and T must be disjoint");
    }
    const double ls = detail::sub_log_det(cov, s);
    const double lt = detail::sub_log_det(cov, t);
    const double lst = log_determinant(cov.submatrix(detail::sorted_union(s, t)));
    return 0.5 * (ls + lt - lst);
}

inline double gaussian_mi(const GaussianDistribution& dist, const IndexSet& s, const IndexSet& t) {
    return gaussian_mi(dist.cov(), s, t);
}

/// I(X_S; X_T | X_R) = I(X_S; X_{R u T}) - I(X_S; X_R); empty R reduces to gaussian_mi.
inline double gaussian_cmi(const SymMatrix& cov, const IndexSet& s, const IndexSet& t, const IndexSet& r) {
    if (r.empty()) {
        return gaussian_mi(cov, s, t);
    }
    detail::check_index_set(r, cov.size(), "R");
    if (!detail::disjoint(s, r) || !detail::disjoint(t, r)) {
        throw std::invalid_argument("gaussian_cmi: S, T, R must be pairwise disjoint");
    }
    return gaussian_mi(cov, s, detail::sorted_union(r, t)) - gaussian_mi(cov, s, r);
}

inline double gaussian_cmi(const GaussianDistribution& dist, const IndexSet& s, const IndexSet& t,
                           const IndexSet& r) {
    return gaussian_cmi(dist.cov(), s, t, r);
}

inline double correlation(const SymMatrix& cov, std::size_t i, std::size_t j) {
    return cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
}

/// Differential entropy 1/2 ln((2 pi e)^n det cov).
inline double differential_entropy(const SymMatrix& cov) {
    const double n = static_cast<double>(cov.size());
    return 0.5 * (n * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_determinant(cov));
}

/// D_KL(p || q) including the mean term 1/2 (mu_q - mu_p)^T cov_q^-1 (mu_q - mu_p).
inline double gaussian_kl(const GaussianDistribution& p, const GaussianDistribution& q) {
    const std::size_t n = p.dim();
    if (q.dim() != n) {
        throw std::invalid_argument("gaussian_kl: dimension mismatch");
    }
    SymMatrix q_inv;
    try {
        q_inv = inverse_pd(q.cov());
    } catch (const NotPositiveDefinite& e) {
        throw SingularSubmatrix(std::string("gaussian_kl: covariance of q is not invertible: ") + e.what());
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            trace += q_inv(i, j) * p.cov()(j, i);
        }
    }
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double di = q.mean()[i] - p.mean()[i];
        for (std::size_t j = 0; j < n; ++j) {
            quad += di * q_inv(i, j) * (q.mean()[j] - p.mean()[j]);
        }
    }
    const double log_ratio = log_determinant(q.cov()) - log_determinant(p.cov());
    return 0.5 * (trace - static_cast<double>(n) + log_ratio + quad);
}

/// Covariance implied by the structural model, variable order (X, Y, Z).
inline GaussianDistribution sem_to_distribution(const LinearSEM3& sem) {
    sem.validate();
    const double a2 = sem.a * sem.a;
    const double var_z = a2;
    const double cov_xz = sem.alpha * a2;
    const double var_x = sem.alpha * sem.alpha * a2 + sem.b * sem.b;
    const double cov_yz = (sem.alpha * sem.beta + sem.gamma) * a2;
    const double cov_xy = sem.beta * var_x + sem.gamma * cov_xz;
    const double var_y = sem.beta * sem.beta * var_x + sem.gamma * sem.gamma * var_z
                       + 2.0 * sem.beta * sem.gamma * cov_xz + sem.c * sem.c;
    SymMatrix cov(3);
    cov.set(0, 0, var_x);
    cov.set(1, 1, var_y);
    cov.set(2, 2, var_z);
    cov.set(0, 1, cov_xy);
    cov.set(0, 2, cov_xz);
    cov.set(1, 2, cov_yz);
    return GaussianDistribution({sem.mu_x, sem.mu_y, sem.mu_z}, cov, "sem3");
}

/// I(X; Y | Z) = 1/2 ln(1 + beta^2 b^2 / c^2).
inline double sem_cmi_closed_form(const LinearSEM3& sem) {
    sem.validate();
    return 0.5 * std::log1p(sem.beta * sem.beta * sem.b * sem.b / (sem.c * sem.c));
}

/// Unconditional I(X; Y) of the structural model, expanded from its covariance:
///   1/2 ln( (alpha^2 a^2 + b^2) ((alpha beta + gamma)^2 a^2 + beta^2 b^2 + c^2)
///           / (a^2 b^2 gamma^2 + c^2 (alpha^2 a^2 + b^2)) ).
/// Cross-check only; gaussian_mi on sem_to_distribution is authoritative.
inline double sem_mi_closed_form(const LinearSEM3& sem) {
    sem.validate();
    const double a2 = sem.a * sem.a;
    const double b2 = sem.b * sem.b;
    const double c2 = sem.c * sem.c;
    const double var_x = sem.alpha * sem.alpha * a2 + b2;
    const double ab_g = sem.alpha * sem.beta + sem.gamma;
    const double var_y = ab_g * ab_g * a2 + sem.beta * sem.beta * b2 + c2;
    const double det_xy = a2 * b2 * sem.gamma * sem.gamma + c2 * var_x;
    return 0.5 * std::log(var_x * var_y / det_xy);
}

/// Gaussian Markov on `tree` that keeps every variance and every edge correlation of
/// `dist`; a non-edge correlation is the product of edge correlations along the tree path.
/// This is the reverse-KL-closest T-structured Gaussian.
inline TreeGaussian tree_projection(const GaussianDistribution& dist, const Tree& tree) {
    const std::size_t n = dist.dim();
    if (tree.vertex_count() != n) {
        throw std::invalid_argument("tree_projection: tree does not span the distribution's variables");
    }
    const SymMatrix& cov = dist.cov();
    const auto adj = tree.adjacency();
    SymMatrix projected(n);
    std::vector<double> prod(n);
    std::vector<bool> seen(n);
    for (std::size_t root = 0; root < n; ++root) {
        std::fill(seen.begin(), seen.end(), false);
        prod[root] = 1.0;
        seen[root] = true;
        std::vector<std::size_t> stack{root};
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t w : adj[u]) {
                if (!seen[w]) {
                    seen[w] = true;
                    prod[w] = prod[u] * correlation(cov, u, w);
                    stack.push_back(w);
                }
            }
        }
        for (std::size_t v = root; v < n; ++v) {
            projected.set(root, v, root == v ? cov(v, v) : prod[v] * std::sqrt(cov(root, root) * cov(v, v)));
        }
    }
    try {
        return TreeGaussian{tree, GaussianDistribution(dist.mean(), projected, dist.label() + "|tree-projection")};
    } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(std::string("tree_projection: internal error, projection lost definiteness: ")
                                  + e.what());
    }
}

/// Sum over tree edges of the pairwise mutual information.
inline double tree_weight(const SymMatrix& cov, const Tree& tree) {
    double w = 0.0;
    for (const auto& [u, v] : tree.edges()) {
        w += gaussian_mi(cov, {u}, {v});
    }
    return w;
}

/// sum_v H(P_v) - H(P): the tree-independent part of the Chow-Liu decomposition.
inline double total_correlation(const SymMatrix& cov) {
    double h = 0.0;
    for (std::size_t v = 0; v < cov.size(); ++v) {
        h += differential_entropy(cov.submatrix(std::vector<std::size_t>{v}));
    }
    return h - differential_entropy(cov);
}

/// D_KL(P || P_T) = J_P - wt_P(T).
inline double kl_via_decomposition(const GaussianDistribution& dist, const Tree& tree) {
    if (tree.vertex_count() != dist.dim()) {
        throw std::invalid_argument("kl_via_decomposition: tree does not span the distribution's variables");
    }
    return total_correlation(dist.cov()) - tree_weight(dist.cov(), tree);
}

} // namespace gausstree
