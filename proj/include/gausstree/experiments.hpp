#pragma once

// Monte-Carlo experiment harness: minimum sample size searches, estimator
// convergence curves and the Chow-Liu versus graphical-lasso recovery study.
// Every trial draws from its own substream keyed by (master seed, ..., trial),
// and trial results are reduced in index order, so outputs do not depend on
// the number of worker threads.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gausstree/distribution.hpp"
#include "gausstree/error.hpp"
#include "gausstree/estimators.hpp"
#include "gausstree/gaussian_model.hpp"
#include "gausstree/glasso.hpp"
#include "gausstree/hard_instances.hpp"
#include "gausstree/io.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/parallel.hpp"
#include "gausstree/random.hpp"
#include "gausstree/structure_learning.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
    std::string experiment = "eps-vs-m";
    /// Instance family for eps-vs-m: "realizable" (three-node chain) or "nonrealizable".
    std::string instance = "realizable";
    std::vector<double> epsilons{0.1, 0.07, 0.05, 0.03, 0.02, 0.015, 0.01};
    std::size_t trials = 1000;
    double success_threshold = 0.95;
    double kl_tolerance_factor = 0.25;
    std::uint64_t seed = 0;
    std::size_t m_min = 8;
    std::size_t m_max = std::size_t{1} << 24;
    std::size_t threads = 0; ///< 0 = hardware concurrency; never affects results

    void validate() const {
        if (epsilons.empty()) {
            throw std::invalid_argument("ExperimentConfig: epsilon list is empty");
        }
        for (double e : epsilons) {
            if (!(e > 0.0 && e < 1.0)) {
                throw std::invalid_argument("ExperimentConfig: epsilon values must lie in (0, 1)");
            }
        }
        if (trials == 0) {
            throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
        }
        if (!(success_threshold > 0.0 && success_threshold < 1.0)) {
            throw std::invalid_argument("ExperimentConfig: success_threshold must lie in (0, 1)");
        }
        if (!(kl_tolerance_factor > 0.0)) {
            throw std::invalid_argument("ExperimentConfig: kl_tolerance_factor must be positive");
        }
        if (m_min < 2 || m_max < m_min) {
            throw std::invalid_argument("ExperimentConfig: need 2 <= m_min <= m_max");
        }
        if (instance != "realizable" && instance != "nonrealizable") {
            throw std::invalid_argument("ExperimentConfig: instance must be 'realizable' or 'nonrealizable'");
        }
    }
};

inline json config_to_json(const ExperimentConfig& c) {
    return {{"experiment", c.experiment},
            {"instance", c.instance},
            {"epsilons", c.epsilons},
            {"trials", c.trials},
            {"success_threshold", c.success_threshold},
            {"kl_tolerance_factor", c.kl_tolerance_factor},
            {"seed", c.seed},
            {"m_min", c.m_min},
            {"m_max", c.m_max}};
}

/// Missing keys keep their defaults. "threads" is accepted but is not part of the hash.
inline ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: expected a JSON object");
    }
    ExperimentConfig c;
    c.experiment = j.value("experiment", c.experiment);
    c.instance = j.value("instance", c.instance);
    c.epsilons = j.value("epsilons", c.epsilons);
    c.trials = j.value("trials", c.trials);
    c.success_threshold = j.value("success_threshold", c.success_threshold);
    c.kl_tolerance_factor = j.value("kl_tolerance_factor", c.kl_tolerance_factor);
    c.seed = j.value("seed", c.seed);
    c.m_min = j.value("m_min", c.m_min);
    c.m_max = j.value("m_max", c.m_max);
    c.threads = j.value("threads", c.threads);
    c.validate();
    return c;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) {
    return fnv1a64(config_to_json(c).dump());
}

// ---------------------------------------------------------------------------
// Log-log regression

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points; ///< (ln x, ln y)
};

/// Ordinary least squares of ln y on ln x.
inline SlopeFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw LengthMismatch("fit_log_log: x and y differ in length");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("fit_log_log: need at least two points");
    }
    SlopeFit fit;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("fit_log_log: values must be positive");
        }
        fit.points.emplace_back(std::log(x[i]), std::log(y[i]));
        mx += fit.points.back().first;
        my += fit.points.back().second;
    }
    const double k = static_cast<double>(x.size());
    mx /= k;
    my /= k;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
        syy += (ly - my) * (ly - my);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_log_log: x values must not all coincide");
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        const double r = ly - (fit.intercept + fit.slope * lx);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

// ---------------------------------------------------------------------------
// Minimum sample size search

struct MStarResult {
    double epsilon = 0.0;
    std::size_t m_star = 0;
    double success_rate = 0.0;                       ///< success(m_star)
    std::map<std::size_t, double> evaluated;         ///< every m probed, with its success rate
};

/// Fraction of trials in which Chow-Liu on m samples lands within
/// tolerance of the optimal tree, measured as the KL gap.
inline double chow_liu_success_rate(const GaussianDistribution& dist, const TreeGapEvaluator& scorer, double tolerance,
                                    std::size_t m, std::size_t trials, std::uint64_t stream, std::size_t threads) {
    const auto hits = parallel_map(
        trials,
        [&](std::size_t trial) -> std::uint8_t {
            const SampleBatch batch = sample_mvn(dist, m, substream_seed(stream, {m, trial}));
            try {
                return scorer.gap(chow_liu(batch)) <= tolerance ? 1 : 0;
            } catch (const DegenerateSample&) {
                return 0;
            }
        },
        threads);
    std::size_t ok = 0;
    for (auto h : hits) {
        ok += h;
    }
    return static_cast<double>(ok) / static_cast<double>(trials);
}

/// Smallest m with success(m) >= threshold: double from m_min until success,
/// then binary search between the last failing and first passing sizes.
inline MStarResult find_m_star(const GaussianDistribution& dist, double epsilon, const ExperimentConfig& cfg) {
    cfg.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("find_m_star: epsilon must lie in (0, 1)");
    }
    const TreeGapEvaluator scorer(dist);
    const double tolerance = cfg.kl_tolerance_factor * epsilon;
    const std::uint64_t stream = substream_seed(cfg.seed, {std::bit_cast<std::uint64_t>(epsilon)});

    MStarResult res;
    res.epsilon = epsilon;
    const auto success = [&](std::size_t m) {
        auto it = res.evaluated.find(m);
        if (it == res.evaluated.end()) {
            it = res.evaluated.emplace(m, chow_liu_success_rate(dist, scorer, tolerance, m, cfg.trials, stream,
                                                                cfg.threads))
                     .first;
        }
        return it->second >= cfg.success_threshold;
    };

    std::size_t lo = 0; // largest size known to fail (0 = none)
    std::size_t hi = cfg.m_min;
    while (!success(hi)) {
        lo = hi;
        if (hi == cfg.m_max) {
            throw SearchExhausted("find_m_star: no sample size up to " + std::to_string(cfg.m_max)
                                  + " reaches the success threshold");
        }
        hi = std::min(hi * 2, cfg.m_max);
    }
    while (lo != 0 && hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (success(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    res.m_star = hi;
    res.success_rate = res.evaluated.at(hi);
    return res;
}

/// The three-node instance used for eps-vs-m. Realizable runs use the chain
/// construction (true tree Y - Z - X, wrong trees a constant fraction of epsilon
/// worse); non-realizable runs use the shared-latent-factor block.
inline GaussianDistribution eps_vs_m_instance(const std::string& instance, double epsilon) {
    if (instance == "realizable") {
        return realizable_block(epsilon, 1, 1, RealizableVariant::Chain, 0.5);
    }
    if (instance == "nonrealizable") {
        return nonrealizable_block(epsilon, 1, 1);
    }
    throw std::invalid_argument("unknown instance '" + instance + "'");
}

struct EpsVsMResult {
    std::vector<MStarResult> rows;
    SlopeFit fit; ///< ln m* against ln(1/epsilon)
};

inline EpsVsMResult run_eps_vs_m(const ExperimentConfig& cfg) {
    cfg.validate();
    EpsVsMResult out;
    std::vector<double> inv_eps;
    std::vector<double> m_star;
    for (double e : cfg.epsilons) {
        out.rows.push_back(find_m_star(eps_vs_m_instance(cfg.instance, e), e, cfg));
        inv_eps.push_back(1.0 / e);
        m_star.push_back(static_cast<double>(out.rows.back().m_star));
    }
    if (cfg.epsilons.size() >= 2) {
        out.fit = fit_log_log(inv_eps, m_star);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Estimator convergence

enum class ConvergenceKind { Independent, Dependent, CmiIndependent, CmiDependent };

inline const char* to_string(ConvergenceKind k) noexcept {
    switch (k) {
    case ConvergenceKind::Independent: return "independent";
    case ConvergenceKind::Dependent: return "dependent";
    case ConvergenceKind::CmiIndependent: return "cmi-independent";
    case ConvergenceKind::CmiDependent: return "cmi-dependent";
    }
    return "?";
}

inline ConvergenceKind convergence_kind_from_string(const std::string& s) {
    for (auto k : {ConvergenceKind::Independent, ConvergenceKind::Dependent, ConvergenceKind::CmiIndependent,
                   ConvergenceKind::CmiDependent}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown convergence kind '" + s + "'");
}

/// Generating distribution (order X, Y[, Z]) and the true MI or CMI for each kind.
///  Independent:    X, Y independent standard normals; I = 0.
///  Dependent:      Y = X + V; I = ln(2) / 2.
///  CmiIndependent: X = Z + V, Y = Z + U; I(X; Y | Z) = 0.
///  CmiDependent:   Z ~ N(0,1), X = Z + V, Y = X + Z + U; I(X; Y | Z) = ln(2) / 2.
inline std::pair<GaussianDistribution, double> convergence_model(ConvergenceKind kind) {
    switch (kind) {
    case ConvergenceKind::Independent:
        return {GaussianDistribution(SymMatrix::identity(2), "independent"), 0.0};
    case ConvergenceKind::Dependent:
        return {GaussianDistribution(SymMatrix::from_rows({{1.0, 1.0}, {1.0, 2.0}}), "dependent"), 0.5 * std::log(2.0)};
    case ConvergenceKind::CmiIndependent:
        return {GaussianDistribution(SymMatrix::from_rows({{2.0, 1.0, 1.0}, {1.0, 2.0, 1.0}, {1.0, 1.0, 1.0}}),
                                     "cmi-independent"),
                0.0};
    case ConvergenceKind::CmiDependent: {
        LinearSEM3 sem;
        sem.alpha = 1.0;
        sem.beta = 1.0;
        sem.gamma = 1.0;
        return {sem_to_distribution(sem), sem_cmi_closed_form(sem)};
    }
    }
    throw std::invalid_argument("unknown convergence kind");
}

struct ConvergencePoint {
    std::size_t m = 0;
    double mean = 0.0;     ///< mean over trials of |estimate - truth|
    double variance = 0.0; ///< unbiased trial variance of the same statistic
    std::size_t retries = 0;
};

struct ConvergenceResult {
    ConvergenceKind kind = ConvergenceKind::Independent;
    double truth = 0.0;
    std::vector<ConvergencePoint> points;
    SlopeFit fit; ///< ln mean against ln m
};

inline ConvergenceResult mi_convergence_curve(ConvergenceKind kind, const std::vector<std::size_t>& m_grid,
                                              std::size_t trials, std::uint64_t seed, std::size_t threads = 0) {
    if (m_grid.size() < 2) {
        throw std::invalid_argument("mi_convergence_curve: need at least two grid points");
    }
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (m_grid[i] < 4 || (i > 0 && m_grid[i] <= m_grid[i - 1])) {
            throw std::invalid_argument("mi_convergence_curve: m grid must be strictly increasing with m >= 4");
        }
    }
    if (trials < 2) {
        throw std::invalid_argument("mi_convergence_curve: need at least two trials");
    }
    auto [dist, truth] = convergence_model(kind);
    const bool conditional = kind == ConvergenceKind::CmiIndependent || kind == ConvergenceKind::CmiDependent;
    constexpr std::size_t kMaxRetries = 64;

    ConvergenceResult res;
    res.kind = kind;
    res.truth = truth;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t m : m_grid) {
        struct Outcome {
            double stat = 0.0;
            std::size_t retries = 0;
        };
        const auto outcomes = parallel_map(
            trials,
            [&](std::size_t trial) {
                Outcome o;
                for (std::uint64_t attempt = 0;; ++attempt) {
                    const SampleBatch b = sample_mvn(dist, m, substream_seed(seed, {m, trial, attempt}));
                    try {
                        const double est = conditional ? empirical_cmi(b.column(0), b.column(1), b.column(2)).i_hat
                                                       : empirical_mi(b.column(0), b.column(1)).i_hat;
                        o.stat = std::abs(est - truth);
                        return o;
                    } catch (const Error&) {
                        if (++o.retries > kMaxRetries) {
                            throw;
                        }
                    }
                }
            },
            threads);
        ConvergencePoint p;
        p.m = m;
        for (const auto& o : outcomes) {
            p.mean += o.stat;
            p.retries += o.retries;
        }
        p.mean /= static_cast<double>(trials);
        for (const auto& o : outcomes) {
            p.variance += (o.stat - p.mean) * (o.stat - p.mean);
        }
        p.variance /= static_cast<double>(trials - 1);
        res.points.push_back(p);
        xs.push_back(static_cast<double>(m));
        ys.push_back(p.mean);
    }
    res.fit = fit_log_log(xs, ys);
    return res;
}

// ---------------------------------------------------------------------------
// Chow-Liu versus graphical lasso

inline const std::vector<double>& default_lambda_grid() {
    static const std::vector<double> grid{0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
    return grid;
}

struct RecoveryPoint {
    std::size_t m = 0;
    double chow_liu_freq = 0.0;
    double glasso_freq = 0.0;          ///< best over the lambda grid
    double glasso_best_lambda = 0.0;
    std::vector<double> glasso_by_lambda;
};

/// Correct-tree frequencies on the three-node realizable chain at epsilon
/// (true tree: X - Z, Y - Z). The graphical lasso runs on the centered unbiased
/// sample covariance; a fit that fails or does not converge counts as a miss.
inline std::vector<RecoveryPoint> recovery_comparison(double epsilon, const std::vector<std::size_t>& m_grid,
                                                      std::size_t trials, std::uint64_t seed,
                                                      const std::vector<double>& lambdas = default_lambda_grid(),
                                                      std::size_t threads = 0) {
    if (trials == 0) {
        throw std::invalid_argument("recovery_comparison: trials must be >= 1");
    }
    if (lambdas.empty()) {
        throw std::invalid_argument("recovery_comparison: lambda grid is empty");
    }
    for (std::size_t m : m_grid) {
        if (m < 2) {
            throw std::invalid_argument("recovery_comparison: every m must be >= 2");
        }
    }
    const GaussianDistribution dist = realizable_block(epsilon, 1, 1, RealizableVariant::Chain, 0.5);
    const Tree truth(3, {{0, 2}, {1, 2}});
    GlassoOptions gopts;
    gopts.max_iter = 200;

    std::vector<RecoveryPoint> out;
    for (std::size_t m : m_grid) {
        // hits[0] = Chow-Liu, hits[1 + l] = glasso at lambdas[l]
        const auto hits = parallel_map(
            trials,
            [&](std::size_t trial) {
                std::vector<std::uint8_t> h(1 + lambdas.size(), 0);
                const SampleBatch b = sample_mvn(dist, m, substream_seed(seed, {m, trial}));
                try {
                    h[0] = chow_liu(b) == truth ? 1 : 0;
                } catch (const Error&) {
                }
                std::optional<SymMatrix> s;
                try {
                    s = empirical_covariance(b, {.centered = true, .unbiased = true});
                } catch (const Error&) {
                }
                if (s) {
                    for (std::size_t l = 0; l < lambdas.size(); ++l) {
                        try {
                            const GlassoResult g = graphical_lasso(*s, lambdas[l], gopts);
                            h[1 + l] = g.converged && precision_to_tree(g.theta) == truth ? 1 : 0;
                        } catch (const Error&) {
                        } catch (const std::invalid_argument&) {
                        }
                    }
                }
                return h;
            },
            threads);
        RecoveryPoint p;
        p.m = m;
        std::vector<std::size_t> counts(1 + lambdas.size(), 0);
        for (const auto& h : hits) {
            for (std::size_t i = 0; i < h.size(); ++i) {
                counts[i] += h[i];
            }
        }
        const double denom = static_cast<double>(trials);
        p.chow_liu_freq = static_cast<double>(counts[0]) / denom;
        p.glasso_freq = -1.0;
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
            const double f = static_cast<double>(counts[1 + l]) / denom;
            p.glasso_by_lambda.push_back(f);
            if (f > p.glasso_freq) {
                p.glasso_freq = f;
                p.glasso_best_lambda = lambdas[l];
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV tables

inline std::string metadata_line(std::uint64_t seed, std::uint64_t hash, const std::string& extra = {}) {
    std::string s = "seed=" + std::to_string(seed) + " config_hash=" + hex64(hash);
    if (!extra.empty()) {
        s += " " + extra;
    }
    return s;
}

inline CsvTable eps_vs_m_table(const EpsVsMResult& r, const ExperimentConfig& cfg) {
    CsvTable t;
    t.comments.push_back(metadata_line(cfg.seed, config_hash(cfg), "experiment=eps-vs-m instance=" + cfg.instance));
    t.header = {"epsilon", "m_star"};
    for (const auto& row : r.rows) {
        t.rows.push_back({row.epsilon, static_cast<double>(row.m_star)});
    }
    return t;
}

inline CsvTable convergence_table(const ConvergenceResult& r, std::uint64_t seed, std::uint64_t hash) {
    CsvTable t;
    t.comments.push_back(metadata_line(seed, hash, std::string("experiment=mi-convergence kind=") + to_string(r.kind)
                                                       + " slope=" + format_double(r.fit.slope)));
    t.header = {"m", "mean_abs_error", "variance", "retries"};
    for (const auto& p : r.points) {
        t.rows.push_back({static_cast<double>(p.m), p.mean, p.variance, static_cast<double>(p.retries)});
    }
    return t;
}

inline CsvTable recovery_table(const std::vector<RecoveryPoint>& r, std::uint64_t seed, std::uint64_t hash) {
    CsvTable t;
    t.comments.push_back(metadata_line(seed, hash, "experiment=recovery"));
    t.header = {"m", "chow_liu_freq", "glasso_freq", "glasso_best_lambda"};
    for (const auto& p : r) {
        t.rows.push_back({static_cast<double>(p.m), p.chow_liu_freq, p.glasso_freq, p.glasso_best_lambda});
    }
    return t;
}

} // namespace gausstree
