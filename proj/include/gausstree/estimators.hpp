#pragma once

// Regression-based estimators of mutual information and conditional mutual
// information for zero-mean Gaussian samples, and the threshold testers built
// on them. All inner products are raw (uncentered); route nonzero-mean data
// through center_by_differencing first.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausstree/error.hpp"
#include "gausstree/linalg.hpp"

namespace gausstree {

/// rho^2 is capped here before taking the log, so collinear columns stay finite.
inline constexpr double kMaxSquaredCorrelation = 1.0 - 1e-12;

/// Relative tolerance below which the (X, Z) regression is treated as collinear.
inline constexpr double kCollinearityTolerance = 1e-12;

struct MiEstimate {
    double rho_hat = 0.0;
    double i_hat = 0.0;
    std::size_t m = 0;
};

struct CmiEstimate {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double gamma_hat = 0.0;
    double rho_tilde = 0.0;
    double i_hat = 0.0;
    std::size_t m = 0;
};

enum class Decision { Independent, Dependent };

inline const char* to_string(Decision d) noexcept {
    return d == Decision::Dependent ? "Dependent" : "Independent";
}

struct TestVerdict {
    Decision decision = Decision::Independent;
    double estimate = 0.0;
    double threshold = 0.0;
    double epsilon = 0.0;
    std::size_t m = 0;
};

/// -1/2 ln(1 - min(rho^2, 1 - 1e-12)).
inline double mi_from_correlation(double rho) noexcept {
    const double r2 = std::min(rho * rho, kMaxSquaredCorrelation);
    return -0.5 * std::log1p(-r2);
}

/// Dependent iff estimate >= epsilon / 8 (boundary inclusive).
inline TestVerdict make_verdict(double estimate, double epsilon, std::size_t m) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("tester: epsilon must lie in (0, 1)");
    }
    const double threshold = epsilon / 8.0;
    return {estimate >= threshold ? Decision::Dependent : Decision::Independent, estimate, threshold, epsilon, m};
}

namespace detail {

inline void require_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("estimator: columns have lengths " + std::to_string(a.size()) + " and "
                             + std::to_string(b.size()));
    }
}

} // namespace detail

/// rho_hat = (x.z) / sqrt((x.x)(z.z)); i_hat = -1/2 ln(1 - rho_hat^2).
inline MiEstimate empirical_mi(std::span<const double> x, std::span<const double> z) {
    detail::require_same_length(x, z);
    if (x.size() < 2) {
        throw InsufficientSamples("empirical_mi: need m >= 2");
    }
    double xx = 0.0;
    double zz = 0.0;
    double xz = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        xx += x[t] * x[t];
        zz += z[t] * z[t];
        xz += x[t] * z[t];
    }
    if (xx == 0.0) {
        throw DegenerateSample("empirical_mi: first column has zero norm", 0);
    }
    if (zz == 0.0) {
        throw DegenerateSample("empirical_mi: second column has zero norm", 1);
    }
    const double rho = std::clamp(xz / std::sqrt(xx * zz), -1.0, 1.0);
    return {rho, mi_from_correlation(rho), x.size()};
}

/// Same estimator as empirical_mi. With m on the order of 1/eps^2 samples the
/// additive error |i_hat - I| is at most eps with high probability.
inline MiEstimate additive_mi_estimate(std::span<const double> x, std::span<const double> y) {
    return empirical_mi(x, y);
}

/// Estimates I(X; Y | Z) by regressing out Z:
///   alpha = (x.z)/(z.z), (beta, gamma) = OLS of y on (x, z),
///   x~ = x - alpha z, y~ = y - (alpha beta + gamma) z,
/// then the correlation of the residuals x~, y~.
inline CmiEstimate empirical_cmi(std::span<const double> x, std::span<const double> y, std::span<const double> z) {
    detail::require_same_length(x, y);
    detail::require_same_length(x, z);
    const std::size_t m = x.size();
    if (m < 4) {
        throw InsufficientSamples("empirical_cmi: need m >= 4");
    }
    double xx = 0.0, yy = 0.0, zz = 0.0, xy = 0.0, xz = 0.0, yz = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        xx += x[t] * x[t];
        yy += y[t] * y[t];
        zz += z[t] * z[t];
        xy += x[t] * y[t];
        xz += x[t] * z[t];
        yz += y[t] * z[t];
    }
    if (zz == 0.0) {
        throw DegenerateSample("empirical_cmi: conditioning column has zero norm", 2);
    }
    const double denom = xx * zz - xz * xz;
    if (!(denom > kCollinearityTolerance * xx * zz)) {
        throw DegenerateSample("empirical_cmi: X and Z columns are collinear");
    }
    CmiEstimate est;
    est.m = m;
    est.alpha_hat = xz / zz;
    est.beta_hat = (xy * zz - xz * yz) / denom;
    est.gamma_hat = (yz * xx - xz * xy) / denom;
    const double y_coef = est.alpha_hat * est.beta_hat + est.gamma_hat;

    double rxx = 0.0, ryy = 0.0, rxy = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const double rx = x[t] - est.alpha_hat * z[t];
        const double ry = y[t] - y_coef * z[t];
        rxx += rx * rx;
        ryy += ry * ry;
        rxy += rx * ry;
    }
    if (!(ryy > kCollinearityTolerance * yy)) {
        throw DegenerateSample("empirical_cmi: Y residual vanishes after regressing out Z", 1);
    }
    if (!(rxx > 0.0)) {
        throw DegenerateSample("empirical_cmi: X residual vanishes after regressing out Z", 0);
    }
    est.rho_tilde = std::clamp(rxy / std::sqrt(rxx * ryy), -1.0, 1.0);
    est.i_hat = mi_from_correlation(est.rho_tilde);
    return est;
}

/// Decides I(X; Z) = 0 versus I(X; Z) >= epsilon.
inline TestVerdict test_mi(std::span<const double> x, std::span<const double> z, double epsilon) {
    const MiEstimate e = empirical_mi(x, z);
    return make_verdict(e.i_hat, epsilon, e.m);
}

/// Decides I(X; Y | Z) = 0 versus I(X; Y | Z) >= epsilon.
inline TestVerdict test_cmi(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                            double epsilon) {
    const CmiEstimate e = empirical_cmi(x, y, z);
    return make_verdict(e.i_hat, epsilon, e.m);
}

/// Row t of the output is row 2t minus row 2t+1; a trailing odd row is dropped.
/// The result is zero-mean with covariance 2 Sigma, so every MI/CMI is unchanged.
inline SampleBatch center_by_differencing(const SampleBatch& batch) {
    const std::size_t m = batch.rows();
    if (m < 2) {
        throw InsufficientSamples("center_by_differencing: need m >= 2");
    }
    const std::size_t half = m / 2;
    const std::size_t k = batch.cols();
    std::vector<double> data(half * k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto c = batch.column(j);
        for (std::size_t t = 0; t < half; ++t) {
            data[j * half + t] = c[2 * t] - c[2 * t + 1];
        }
    }
    return SampleBatch::from_column_major(half, k, std::move(data), batch.seed(), batch.origin() + "|differenced");
}

/// Empirical I(X; (Y, Z)) = 1/2 ln(s_xx det(M_yz) / det(M)) from the 1/m-normalized
/// second-moment matrix M of (Z, X, Y). Equals empirical_mi(x, z) + empirical_cmi(x, y, z).
inline double empirical_mi_joint(std::span<const double> x, std::span<const double> y, std::span<const double> z) {
    detail::require_same_length(x, y);
    detail::require_same_length(x, z);
    const std::size_t m = x.size();
    if (m < 4) {
        throw InsufficientSamples("empirical_mi_joint: need m >= 4");
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    const double sxx = dot(x, x) * inv_m;
    const double syy = dot(y, y) * inv_m;
    const double szz = dot(z, z) * inv_m;
    const double sxy = dot(x, y) * inv_m;
    const double sxz = dot(x, z) * inv_m;
    const double syz = dot(y, z) * inv_m;
    SymMatrix full(3);
    full.set(0, 0, szz);
    full.set(1, 1, sxx);
    full.set(2, 2, syy);
    full.set(0, 1, sxz);
    full.set(0, 2, syz);
    full.set(1, 2, sxy);
    const double det_full = determinant(full);
    const double det_yz = syy * szz - syz * syz;
    if (!(det_full > 0.0) || !(det_yz > 0.0) || !(sxx > 0.0)) {
        throw DegenerateSample("empirical_mi_joint: empirical second-moment matrix is singular");
    }
    return 0.5 * std::log(sxx * det_yz / det_full);
}

} // namespace gausstree
