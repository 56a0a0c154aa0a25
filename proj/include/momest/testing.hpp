#ifndef MOMEST_TESTING_HPP
#define MOMEST_TESTING_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "momest/asymptotics.hpp"
#include "momest/errors.hpp"
#include "momest/special.hpp"

namespace momest {

/// Outcome of a marginal Gaussian test (df = 0, normal reference) or of the
/// omnibus chi-square test (df = 2).
struct TestReport {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    bool reject_at_5pct = false;
    std::optional<SigmaMethod> sigma_method;
};

/// Two-sided 5% critical value of the standard normal, Phi^{-1}(0.975).
inline double normal_critical_5pct() {
    static const double z = normal_quantile(0.975);
    return z;
}

/// z = sqrt(n / var_entry) (theta_hat - theta0); rejects when |z| strictly
/// exceeds the 97.5% normal quantile.
inline TestReport marginal_test(double theta_hat, double theta0, double var_entry, std::size_t n,
                                std::optional<SigmaMethod> method = std::nullopt) {
    if (!(var_entry > 0.0)) throw SingularCovariance("marginal test needs a positive variance entry");
    if (n < 2) throw InsufficientData("marginal test needs n >= 2");
    TestReport r;
    r.statistic = std::sqrt(static_cast<double>(n) / var_entry) * (theta_hat - theta0);
    r.df = 0;
    r.p_value = std::min(1.0, std::erfc(std::abs(r.statistic) / std::numbers::sqrt2));
    r.reject_at_5pct = std::abs(r.statistic) > normal_critical_5pct();
    r.sigma_method = method;
    return r;
}

/// Singularity guard for the omnibus test: det must exceed 1e-12 * max(1, s11 s22).
inline double det_floor(const Covariance2& sigma) {
    return 1e-12 * std::max(1.0, sigma.s11() * sigma.s22());
}

/// Q_n = n / det [s22 (a_hat - a0)^2 + s11 (b_hat - b0)^2 - 2 s12 (a_hat - a0)(b_hat - b0)],
/// referred to chi-square with two degrees of freedom.
inline TestReport omnibus_test(double a_hat, double b_hat, double a0, double b0, std::size_t n,
                               const Covariance2& sigma) {
    if (n < 2) throw InsufficientData("omnibus test needs n >= 2");
    if (!(sigma.det() > det_floor(sigma))) {
        throw SingularCovariance("omnibus test: covariance determinant is at or below the singularity floor");
    }
    const double da = a_hat - a0;
    const double db = b_hat - b0;
    const double form = sigma.s22() * da * da + sigma.s11() * db * db - 2.0 * sigma.s12() * da * db;
    TestReport r;
    r.statistic = static_cast<double>(n) * form / sigma.det();
    r.df = 2;
    r.p_value = chisq_sf(std::max(0.0, r.statistic), 2);
    r.reject_at_5pct = r.p_value < 0.05;
    r.sigma_method = sigma.method();
    return r;
}

}  // namespace momest

#endif  // MOMEST_TESTING_HPP
