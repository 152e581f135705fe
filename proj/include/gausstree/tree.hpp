#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gausstree {

using Edge = std::pair<std::size_t, std::size_t>;

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns false if a and b were already connected.
    bool unite(std::size_t a, std::size_t b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        if (size_[a] < size_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Undirected spanning tree on vertices 0..n-1. Edges are kept canonical:
/// each pair sorted, the list sorted lexicographically, so equal trees compare equal.
class Tree {
public:
    Tree() = default;

    /// Validates that `edges` span [0, n) without cycles; throws std::invalid_argument otherwise.
    Tree(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        if (n == 0) {
            throw std::invalid_argument("Tree: need at least one vertex");
        }
        if (edges_.size() != n - 1) {
            throw std::invalid_argument("Tree: a spanning tree on " + std::to_string(n) + " vertices has "
                                        + std::to_string(n - 1) + " edges, got "
                                        + std::to_string(edges_.size()));
        }
        UnionFind uf(n);
        for (auto& [u, v] : edges_) {
            if (u >= n || v >= n || u == v) {
                throw std::invalid_argument("Tree: invalid edge (" + std::to_string(u) + ", "
                                            + std::to_string(v) + ")");
            }
            if (u > v) {
                std::swap(u, v);
            }
            if (!uf.unite(u, v)) {
                throw std::invalid_argument("Tree: edges contain a cycle");
            }
        }
        std::sort(edges_.begin(), edges_.end());
    }

    /// Star centred at vertex 0: the tree chosen whenever all weights tie.
    static Tree star(std::size_t n) {
        std::vector<Edge> e;
        for (std::size_t v = 1; v < n; ++v) {
            e.emplace_back(0, v);
        }
        return Tree(n, std::move(e));
    }

    std::size_t vertex_count() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    bool contains(std::size_t u, std::size_t v) const {
        const Edge e = u < v ? Edge{u, v} : Edge{v, u};
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    std::vector<std::vector<std::size_t>> adjacency() const {
        std::vector<std::vector<std::size_t>> adj(n_);
        for (const auto& [u, v] : edges_) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        return adj;
    }

    /// Vertices on the unique path from `from` to `to`, both endpoints included.
    std::vector<std::size_t> path(std::size_t from, std::size_t to) const {
        if (from >= n_ || to >= n_) {
            throw std::out_of_range("Tree::path: vertex out of range");
        }
        const auto adj = adjacency();
        std::vector<std::optional<std::size_t>> parent(n_);
        std::vector<std::size_t> stack{from};
        parent[from] = from;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t w : adj[u]) {
                if (!parent[w]) {
                    parent[w] = u;
                    stack.push_back(w);
                }
            }
        }
        std::vector<std::size_t> out{to};
        while (out.back() != from) {
            out.push_back(*parent[out.back()]);
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

    bool operator==(const Tree&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

} // namespace gausstree
