#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gausstree/distribution.hpp"
#include "gausstree/error.hpp"
#include "gausstree/estimators.hpp"
#include "gausstree/gaussian_model.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

/// Complete graph on n vertices with one nonnegative weight per unordered pair.
/// Pairs are indexed in canonical order (0,1), (0,2), ..., (0,n-1), (1,2), ...
class WeightedEdgeList {
public:
    explicit WeightedEdgeList(std::size_t n) : n_(n), weights_(n * (n - 1) / 2, 0.0) {
        if (n < 2) {
            throw std::invalid_argument("WeightedEdgeList: need n >= 2");
        }
    }

    WeightedEdgeList(std::size_t n, std::vector<double> weights) : WeightedEdgeList(n) {
        if (weights.size() != weights_.size()) {
            throw LengthMismatch("WeightedEdgeList: expected n(n-1)/2 weights");
        }
        for (std::size_t p = 0; p < weights.size(); ++p) {
            check(weights[p]);
        }
        weights_ = std::move(weights);
    }

    std::size_t vertex_count() const noexcept { return n_; }
    std::size_t pair_count() const noexcept { return weights_.size(); }
    const std::vector<double>& weights() const noexcept { return weights_; }

    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) {
            std::swap(i, j);
        }
        if (i == j || j >= n_) {
            throw std::out_of_range("WeightedEdgeList: invalid pair");
        }
        return i * n_ - i * (i + 1) / 2 + (j - i - 1);
    }

    /// Inverse of index().
    Edge pair(std::size_t p) const {
        std::size_t i = 0;
        std::size_t row = n_ - 1;
        while (p >= row) {
            p -= row;
            ++i;
            --row;
        }
        return {i, i + 1 + p};
    }

    double operator()(std::size_t i, std::size_t j) const { return weights_[index(i, j)]; }

    void set(std::size_t i, std::size_t j, double w) {
        check(w);
        weights_[index(i, j)] = w;
    }

    WeightedEdgeList scaled(double c) const {
        WeightedEdgeList out = *this;
        for (double& w : out.weights_) {
            w *= c;
        }
        return out;
    }

    double total(const Tree& tree) const {
        double s = 0.0;
        for (const auto& [u, v] : tree.edges()) {
            s += (*this)(u, v);
        }
        return s;
    }

private:
    static void check(double w) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("WeightedEdgeList: weights must be finite and nonnegative");
        }
    }

    std::size_t n_;
    std::vector<double> weights_;
};

/// Maximum spanning tree by Kruskal. Edges are scanned by descending weight and
/// then ascending canonical pair, so ties resolve toward lexicographically small
/// pairs and an all-equal graph yields the star at vertex 0.
inline Tree maximum_spanning_tree(const WeightedEdgeList& w) {
    const std::size_t n = w.vertex_count();
    std::vector<std::size_t> order(w.pair_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& weights = w.weights();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    UnionFind uf(n);
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (std::size_t p : order) {
        const Edge e = w.pair(p);
        if (uf.unite(e.first, e.second)) {
            edges.push_back(e);
            if (edges.size() == n - 1) {
                break;
            }
        }
    }
    return Tree(n, std::move(edges));
}

/// weight(i, j) = empirical_mi(column i, column j).i_hat.
inline WeightedEdgeList pairwise_empirical_mi(const SampleBatch& batch) {
    const std::size_t n = batch.cols();
    if (batch.rows() < 2) {
        throw InsufficientSamples("pairwise_empirical_mi: need m >= 2");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (dot(batch.column(j), batch.column(j)) == 0.0) {
            throw DegenerateSample("pairwise_empirical_mi: zero-norm column", j);
        }
    }
    WeightedEdgeList w(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            w.set(i, j, empirical_mi(batch.column(i), batch.column(j)).i_hat);
        }
    }
    return w;
}

/// Population pairwise mutual information of a covariance matrix.
inline WeightedEdgeList pairwise_oracle_mi(const SymMatrix& cov) {
    WeightedEdgeList w(cov.size());
    for (std::size_t i = 0; i < cov.size(); ++i) {
        for (std::size_t j = i + 1; j < cov.size(); ++j) {
            // Rounding can leave an exactly-independent pair at -1e-17.
            w.set(i, j, std::max(0.0, gaussian_mi(cov, {i}, {j})));
        }
    }
    return w;
}

/// Chow-Liu: maximum spanning tree of the empirical pairwise-MI graph. O(m n^2).
inline Tree chow_liu(const SampleBatch& batch) {
    return maximum_spanning_tree(pairwise_empirical_mi(batch));
}

/// Scores learned trees against a fixed ground truth. Since
/// D_KL(P || P_T) = J_P - wt_P(T), the excess over the optimal tree is
/// wt_P(T*) - wt_P(T); the oracle weights and optimum are cached.
class TreeGapEvaluator {
public:
    explicit TreeGapEvaluator(const GaussianDistribution& dist)
        : oracle_(pairwise_oracle_mi(dist.cov())),
          optimum_(maximum_spanning_tree(oracle_)),
          best_weight_(oracle_.total(optimum_)) {}

    const WeightedEdgeList& oracle_weights() const noexcept { return oracle_; }
    const Tree& optimal_tree() const noexcept { return optimum_; }

    double gap(const Tree& learned) const {
        if (learned.vertex_count() != oracle_.vertex_count()) {
            throw std::invalid_argument("TreeGapEvaluator: tree size mismatch");
        }
        return best_weight_ - oracle_.total(learned);
    }

private:
    WeightedEdgeList oracle_;
    Tree optimum_;
    double best_weight_;
};

/// D_KL(P || P_learned) - min_T D_KL(P || P_T); the minimum is attained by the
/// maximum spanning tree of the oracle pairwise MIs.
inline double approximation_gap(const GaussianDistribution& dist, const Tree& learned) {
    const Tree best = maximum_spanning_tree(pairwise_oracle_mi(dist.cov()));
    return kl_via_decomposition(dist, learned) - kl_via_decomposition(dist, best);
}

} // namespace gausstree
