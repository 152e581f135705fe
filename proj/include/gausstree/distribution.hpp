#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gausstree/error.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/random.hpp"

namespace gausstree {

/// N(mean, cov) with a positive-definite covariance. Construction validates both.
class GaussianDistribution {
public:
    GaussianDistribution() = default;

    explicit GaussianDistribution(SymMatrix cov, std::string label = {})
        : mean_(cov.size(), 0.0), cov_(std::move(cov)), label_(std::move(label)) {
        factor_ = cholesky(cov_);
    }

    GaussianDistribution(std::vector<double> mean, SymMatrix cov, std::string label = {})
        : mean_(std::move(mean)), cov_(std::move(cov)), label_(std::move(label)) {
        if (mean_.size() != cov_.size()) {
            throw std::invalid_argument("GaussianDistribution: mean length differs from covariance dimension");
        }
        factor_ = cholesky(cov_);
    }

    std::size_t dim() const noexcept { return cov_.size(); }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const SymMatrix& cov() const noexcept { return cov_; }
    const std::string& label() const noexcept { return label_; }

    /// Cholesky factor of cov, computed once at construction.
    const Matrix& factor() const noexcept { return factor_; }

private:
    std::vector<double> mean_;
    SymMatrix cov_;
    Matrix factor_;
    std::string label_;
};

/// m i.i.d. rows of mean + L g, g standard normal. Deterministic in `seed`.
inline SampleBatch sample_mvn(const GaussianDistribution& dist, std::size_t m, std::uint64_t seed) {
    if (m == 0) {
        throw std::invalid_argument("sample_mvn: m must be >= 1");
    }
    const std::size_t k = dist.dim();
    const Matrix& l = dist.factor();
    const auto& mu = dist.mean();
    NormalSampler normal(seed);
    std::vector<double> data(m * k);
    std::vector<double> g(k);
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t j = 0; j < k; ++j) {
            g[j] = normal();
        }
        for (std::size_t i = 0; i < k; ++i) {
            double v = mu[i];
            for (std::size_t j = 0; j <= i; ++j) {
                v += l(i, j) * g[j];
            }
            data[i * m + t] = v;
        }
    }
    return SampleBatch::from_column_major(m, k, std::move(data), seed, dist.label());
}

} // namespace gausstree
