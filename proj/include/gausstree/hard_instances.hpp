#pragma once

// Hard-instance generators for the sample-complexity lower bounds. Every
// three-variable block is laid out (X, Y, Z); block b of a composition
// occupies indices 3b, 3b+1, 3b+2. Per-block strength is t = epsilon / n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausstree/distribution.hpp"
#include "gausstree/error.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/random.hpp"

namespace gausstree {

struct InstancePair {
    GaussianDistribution first;
    GaussianDistribution second;
};

enum class BlockKind { Realizable, NonRealizable };

/// Which realizable three-node construction to use.
///  SharedNoise: X = U, Y = V + B, Z = sqrt(t) X + W + B (and the mirrored second tree);
///               det = 3 and KL = t in both directions.
///  Chain:       Y = U, Z = (1 - gamma) Y + W, X = sqrt(t) Z + V (second tree attaches X to Y).
enum class RealizableVariant { SharedNoise, Chain };

struct BlockSpec {
    BlockKind kind = BlockKind::Realizable;
    std::vector<std::uint8_t> bits;   ///< 1 selects the first tree of a pair, 0 the second
    double epsilon = 0.1;
    std::size_t n = 1;                ///< block count used in the epsilon / n scaling
    RealizableVariant variant = RealizableVariant::SharedNoise;
    double gamma = 0.5;               ///< Chain variant only

    void validate() const {
        if (bits.empty()) {
            throw std::invalid_argument("BlockSpec: need at least one block");
        }
        for (auto b : bits) {
            if (b > 1) {
                throw std::invalid_argument("BlockSpec: bits must be 0 or 1");
            }
        }
        if (!(epsilon > 0.0 && epsilon < 1.0)) {
            throw std::invalid_argument("BlockSpec: epsilon must lie in (0, 1)");
        }
        if (n == 0) {
            throw std::invalid_argument("BlockSpec: n must be >= 1");
        }
    }
};

struct CodeBook {
    std::size_t n = 0;
    std::size_t min_distance = 0;
    std::vector<std::vector<std::uint8_t>> words;
};

namespace detail {

inline void check_open_unit(double epsilon, const char* who) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument(std::string(who) + ": epsilon must lie in (0, 1)");
    }
}

inline void check_which(int which, const char* who) {
    if (which != 1 && which != 2) {
        throw std::invalid_argument(std::string(who) + ": which must be 1 or 2");
    }
}

} // namespace detail

/// H0: independent standard pair. H1: Y = sqrt(eps) X + V, so I(H1) = 1/2 ln(1 + eps)
/// and D_KL(H0 || H1) = eps / 2.
inline InstancePair mi_test_pair(double epsilon) {
    detail::check_open_unit(epsilon, "mi_test_pair");
    const double s = std::sqrt(epsilon);
    return {GaussianDistribution(SymMatrix::identity(2), "mi-test/H0"),
            GaussianDistribution(SymMatrix::from_rows({{1.0, s}, {s, 1.0 + epsilon}}), "mi-test/H1")};
}

/// H0: Y = (1/2 + eps) X + V.  H1: Y = (1/2 - eps) X + V.
/// Both have unit determinant and D_KL = 2 eps^2 either way.
inline InstancePair additive_estimation_pair(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("additive_estimation_pair: epsilon must lie in [0, 1)");
    }
    const auto make = [](double slope, const char* label) {
        return GaussianDistribution(SymMatrix::from_rows({{1.0, slope}, {slope, slope * slope + 1.0}}), label);
    };
    return {make(0.5 + epsilon, "additive/H0"), make(0.5 - epsilon, "additive/H1")};
}

inline SymMatrix realizable_block_cov(double epsilon, std::size_t n, int which,
                                      RealizableVariant variant = RealizableVariant::SharedNoise,
                                      double gamma = 0.5) {
    detail::check_open_unit(epsilon, "realizable_block");
    detail::check_which(which, "realizable_block");
    if (n == 0) {
        throw std::invalid_argument("realizable_block: n must be >= 1");
    }
    const double t = epsilon / static_cast<double>(n);
    const double s = std::sqrt(t);
    if (variant == RealizableVariant::SharedNoise) {
        if (which == 1) {
            return SymMatrix::from_rows({{1.0, 0.0, s}, {0.0, 2.0, 1.0}, {s, 1.0, 2.0 + t}});
        }
        return SymMatrix::from_rows({{1.0, s, 0.0}, {s, 2.0 + t, 1.0}, {0.0, 1.0, 2.0}});
    }
    const double g = 1.0 - gamma;
    const double var_z = g * g + 1.0;
    if (which == 1) {
        // Y = U, Z = g Y + W, X = s Z + V
        return SymMatrix::from_rows({{t * var_z + 1.0, s * g, s * var_z}, {s * g, 1.0, g}, {s * var_z, g, var_z}});
    }
    // Y = U, Z = g Y + W, X = s Y + V
    return SymMatrix::from_rows({{t + 1.0, s, s * g}, {s, 1.0, g}, {s * g, g, var_z}});
}

/// Realizable three-node block; the first tree is Y - Z - X, the second X - Y - Z.
inline GaussianDistribution realizable_block(double epsilon, std::size_t n, int which,
                                             RealizableVariant variant = RealizableVariant::SharedNoise,
                                             double gamma = 0.5) {
    return GaussianDistribution(realizable_block_cov(epsilon, n, which, variant, gamma),
                                "realizable/R" + std::to_string(which));
}

/// Cov = I + v v^T with v = (1 + t, 1 + 2t, 1 + 3t) for the first block and
/// (1 + t, 1 + 3t, 1 + 2t) for the second: one shared latent factor, no tree structure.
inline SymMatrix nonrealizable_block_cov(double epsilon, std::size_t n, int which) {
    detail::check_open_unit(epsilon, "nonrealizable_block");
    detail::check_which(which, "nonrealizable_block");
    if (n == 0) {
        throw std::invalid_argument("nonrealizable_block: n must be >= 1");
    }
    const double t = epsilon / static_cast<double>(n);
    const double v[3] = {1.0 + t, which == 1 ? 1.0 + 2.0 * t : 1.0 + 3.0 * t,
                         which == 1 ? 1.0 + 3.0 * t : 1.0 + 2.0 * t};
    SymMatrix cov(3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i; j < 3; ++j) {
            cov.set(i, j, v[i] * v[j] + (i == j ? 1.0 : 0.0));
        }
    }
    return cov;
}

inline GaussianDistribution nonrealizable_block(double epsilon, std::size_t n, int which) {
    return GaussianDistribution(nonrealizable_block_cov(epsilon, n, which), "nonrealizable/R" + std::to_string(which));
}

/// Block-diagonal composition of independent three-node blocks.
inline GaussianDistribution compose_blocks(const BlockSpec& spec) {
    spec.validate();
    const std::size_t blocks = spec.bits.size();
    SymMatrix cov(3 * blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const int which = spec.bits[b] == 1 ? 1 : 2;
        const SymMatrix block = spec.kind == BlockKind::Realizable
                                    ? realizable_block_cov(spec.epsilon, spec.n, which, spec.variant, spec.gamma)
                                    : nonrealizable_block_cov(spec.epsilon, spec.n, which);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i; j < 3; ++j) {
                cov.set(3 * b + i, 3 * b + j, block(i, j));
            }
        }
    }
    std::string label = spec.kind == BlockKind::Realizable ? "realizable/" : "nonrealizable/";
    for (auto bit : spec.bits) {
        label += bit ? '1' : '0';
    }
    return GaussianDistribution(cov, label);
}

inline std::size_t hamming_distance(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("hamming_distance: words have different lengths");
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += a[i] != b[i];
    }
    return d;
}

/// ceil(n / 5), the separation used for the far family of compositions.
inline std::size_t default_code_distance(std::size_t n) {
    return (n + 4) / 5;
}

/// Greedy randomized Gilbert-Varshamov construction: draw uniform words and keep each
/// one that is at distance >= min_distance from every word kept so far. Gives up after
/// 64 * target_size draws. Words are always distinct, even when min_distance is 0.
inline CodeBook gilbert_varshamov_code(std::size_t n, std::size_t min_distance, std::size_t target_size,
                                       std::uint64_t seed) {
    if (n < 5) {
        throw std::invalid_argument("gilbert_varshamov_code: need n >= 5");
    }
    if (target_size == 0) {
        throw std::invalid_argument("gilbert_varshamov_code: target_size must be positive");
    }
    if (n < 64 && target_size > (std::uint64_t{1} << n)) {
        throw std::invalid_argument("gilbert_varshamov_code: target_size exceeds 2^n distinct words");
    }
    const std::size_t distance = std::max<std::size_t>(min_distance, 1);
    CodeBook code{n, distance, {}};
    std::mt19937_64 rng(seed);
    const std::size_t budget = 64 * target_size;
    std::vector<std::uint8_t> word(n);
    for (std::size_t draw = 0; draw < budget && code.words.size() < target_size; ++draw) {
        for (std::size_t i = 0; i < n; ++i) {
            word[i] = static_cast<std::uint8_t>(rng() >> 63);
        }
        bool ok = true;
        for (const auto& w : code.words) {
            if (hamming_distance(w, word) < distance) {
                ok = false;
                break;
            }
        }
        if (ok) {
            code.words.push_back(word);
        }
    }
    if (code.words.size() < target_size) {
        throw TargetUnreachable("gilbert_varshamov_code: greedy search stalled before reaching "
                                    + std::to_string(target_size) + " words",
                                code.words.size());
    }
    return code;
}

} // namespace gausstree
