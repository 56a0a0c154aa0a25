#ifndef MOMEST_ASYMPTOTICS_HPP
#define MOMEST_ASYMPTOTICS_HPP

// Influence functions of the moment estimators and the asymptotic covariance
// of (sqrt(n)(a_hat - a), sqrt(n)(b_hat - b)).
//
// Every influence function lives in the span of h1(x) = x and h2(x) = x^2.
// H is always the influence of a_hat and L the influence of b_hat.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "momest/distributions.hpp"
#include "momest/errors.hpp"
#include "momest/estimation.hpp"
#include "momest/special.hpp"

namespace momest {

/// c1 * x + c2 * x^2 - center, where center = E[c1 X + c2 X^2] under the law
/// the coefficients were built for.
struct QuadraticInfluence {
    double c1 = 0.0;
    double c2 = 0.0;
    double center = 0.0;

    double raw(double x) const noexcept { return c1 * x + c2 * x * x; }
    double operator()(double x) const noexcept { return raw(x) - center; }
    int degree() const noexcept { return c2 != 0.0 ? 2 : (c1 != 0.0 ? 1 : 0); }
};

struct InfluencePair {
    QuadraticInfluence H;  // influence of a_hat
    QuadraticInfluence L;  // influence of b_hat
};

/// Canonical: delta-method gradient of the estimator map.
/// PaperVerbatim: the closed forms as printed, typos included, for errata tables.
enum class CoefficientMode { Canonical, PaperVerbatim };

inline std::string_view to_string(CoefficientMode mode) {
    return mode == CoefficientMode::Canonical ? "canonical" : "verbatim";
}

inline CoefficientMode parse_coefficient_mode(std::string_view text) {
    if (text == "canonical") return CoefficientMode::Canonical;
    if (text == "verbatim") return CoefficientMode::PaperVerbatim;
    throw DomainError("unknown coefficient mode '" + std::string(text) + "' (expected canonical or verbatim)");
}

enum class SigmaMethod { ExactQuadrature, ExactMoments, PluginSample, Replication };

inline std::string_view to_string(SigmaMethod method) {
    switch (method) {
        case SigmaMethod::ExactQuadrature: return "exact_quadrature";
        case SigmaMethod::ExactMoments: return "exact_moments";
        case SigmaMethod::PluginSample: return "plugin";
        case SigmaMethod::Replication: return "replication";
    }
    return "unknown";
}

inline SigmaMethod parse_sigma_method(std::string_view text) {
    if (text == "exact_quadrature" || text == "quadrature") return SigmaMethod::ExactQuadrature;
    if (text == "exact_moments" || text == "exact") return SigmaMethod::ExactMoments;
    if (text == "plugin" || text == "emp") return SigmaMethod::PluginSample;
    if (text == "replication" || text == "samp") return SigmaMethod::Replication;
    throw DomainError("unknown sigma method '" + std::string(text) + "'");
}

/// Symmetric 2x2 covariance [[s11, s12], [s12, s22]] tagged with how it was obtained.
class Covariance2 {
public:
    Covariance2(double s11, double s22, double s12, SigmaMethod method)
        : s11_(s11), s22_(s22), s12_(s12), det_(s11 * s22 - s12 * s12), method_(method) {}

    double s11() const noexcept { return s11_; }
    double s22() const noexcept { return s22_; }
    double s12() const noexcept { return s12_; }
    double det() const noexcept { return det_; }
    SigmaMethod method() const noexcept { return method_; }

    double correlation() const noexcept { return s12_ / std::sqrt(s11_ * s22_); }

    bool is_valid(double tol = 1e-9) const noexcept {
        return s11_ >= 0.0 && s22_ >= 0.0 && std::abs(s12_) <= std::sqrt(s11_ * s22_) + tol;
    }

private:
    double s11_, s22_, s12_, det_;
    SigmaMethod method_;
};

/// Partial derivatives of (a_hat, b_hat) with respect to (m1, m2).
struct DeltaGradient {
    double da_dm1, da_dm2, db_dm1, db_dm2;
};

/// Analytic gradient of the estimator map g(m1, m2), with the variance taken
/// as m2 - m1^2 (the n / (n - 1) factor is asymptotically one).
inline DeltaGradient delta_gradient(LawKind kind, double m1, double m2) {
    const double v = m2 - m1 * m1;
    switch (kind) {
        case LawKind::Gamma: {
            if (!(v > 0.0 && m1 > 0.0)) throw DomainError("delta_gradient: gamma needs m2 > m1^2 and m1 > 0");
            const double v2 = v * v;
            return {2.0 * m1 * m2 / v2, -m1 * m1 / v2, (m2 + m1 * m1) / v2, -m1 / v2};
        }
        case LawKind::Beta: {
            const double gap = m1 - m2;
            if (!(v > 0.0 && gap > 0.0)) throw DomainError("delta_gradient: beta needs m2 > m1^2 and m1 > m2");
            const double v2 = v * v;
            return {((gap + m1) * v + 2.0 * m1 * m1 * gap) / v2, -m1 * (v + gap) / v2,
                    ((1.0 - m1 - gap) * v + 2.0 * m1 * (1.0 - m1) * gap) / v2, (m1 - 1.0) * (v + gap) / v2};
        }
        case LawKind::Uniform: {
            if (!(v > 0.0)) throw DomainError("delta_gradient: uniform needs m2 > m1^2");
            const double sd = std::sqrt(v);
            const double lam = kUniformLambda;
            return {1.0 + lam * m1 / sd, -lam / (2.0 * sd), 1.0 - lam * m1 / sd, lam / (2.0 * sd)};
        }
        case LawKind::Fisher: {
            const double denom = v * (2.0 - m1) - m1 * m1 * (m1 - 1.0);
            if (!(m1 > 1.0 && denom > 0.0)) {
                throw DomainError("delta_gradient: fisher needs m1 > 1 and a positive a-denominator");
            }
            const double d_denom_dm1 = -2.0 * m1 * (2.0 - m1) - v - 3.0 * m1 * m1 + 2.0 * m1;
            const double d_denom_dm2 = 2.0 - m1;
            const double d2 = denom * denom;
            return {4.0 * m1 / denom - 2.0 * m1 * m1 * d_denom_dm1 / d2, -2.0 * m1 * m1 * d_denom_dm2 / d2,
                    -2.0 / ((m1 - 1.0) * (m1 - 1.0)), 0.0};
        }
    }
    throw DomainError("delta_gradient: unknown law");
}

namespace detail {

inline QuadraticInfluence centered(double c1, double c2, double m1, double m2) {
    return {c1, c2, c1 * m1 + c2 * m2};
}

// Coefficients exactly as printed with the closed-form theorems. For the Gamma
// law the h2 sign follows the derivation and the R script (the theorem
// statement prints +mu^2/sigma^4); the sigma^2 + 1 and sigma^2 + 2 mu factors
// are kept as printed.
inline InfluencePair verbatim_pair(LawKind kind, double mu, double m2, double var) {
    const double sd = std::sqrt(var);
    const double var2 = var * var;
    switch (kind) {
        case LawKind::Gamma:
            return {centered(2.0 * mu * (var + 1.0) / var2, -mu * mu / var2, mu, m2),
                    centered((var + 2.0 * mu) / var2, -mu / var2, mu, m2)};
        case LawKind::Beta: {
            const double gap = mu - m2;
            return {centered((var * (2.0 * mu - m2) + 2.0 * mu * mu * gap) / var2, -(var * mu + mu * gap) / var2, mu,
                             m2),
                    centered((var * (m2 - 2.0 * mu + 1.0) + 2.0 * mu * (1.0 - mu) * gap) / var2,
                             (mu - 1.0) * (var + gap) / var2, mu, m2)};
        }
        case LawKind::Uniform: {
            const double lam = kUniformLambda;
            return {centered(1.0 + lam * mu / sd, -lam / (2.0 * sd), mu, m2),
                    centered(1.0 - lam * mu / sd, lam / (2.0 * sd), mu, m2)};
        }
        case LawKind::Fisher: {
            const double beta = var + 2.0 * mu * (2.0 - mu) - mu * (3.0 * mu - 2.0);
            return {centered(2.0 * mu * (2.0 - mu) / beta, -2.0 * mu * mu * (2.0 - mu) / (beta * beta), mu, m2),
                    centered(-2.0 / ((mu - 1.0) * (mu - 1.0)), 0.0, mu, m2)};
        }
    }
    throw DomainError("influence_pair: unknown law");
}

}  // namespace detail

/// Influence functions (H for a_hat, L for b_hat) at the law's own moments.
inline InfluencePair influence_pair(const LawSpec& law, CoefficientMode mode = CoefficientMode::Canonical) {
    const MomentSet ms = theoretical_moments(law);
    if (!ms.m2 || !ms.variance) {
        throw MomentDomainError("influence functions need the second moment (fisher: b > 4)", 2);
    }
    const double m1 = *ms.m1;
    const double m2 = *ms.m2;
    if (mode == CoefficientMode::PaperVerbatim) return detail::verbatim_pair(law.kind(), m1, m2, *ms.variance);
    const DeltaGradient g = delta_gradient(law.kind(), m1, m2);
    return {detail::centered(g.da_dm1, g.da_dm2, m1, m2), detail::centered(g.db_dm1, g.db_dm2, m1, m2)};
}

namespace detail {

// Highest raw moment needed for second moments of H and L.
inline void require_second_moments(const LawSpec& law, const InfluencePair& p, const MomentSet& ms) {
    const int order = 2 * std::max(p.H.degree(), p.L.degree());
    if (order == 0) return;
    if (!ms.raw(order)) {
        if (order == 4) {
            throw MomentDomainError(law.name() + ": exact covariance needs the fourth moment; fourth moment requires b>8",
                                    4);
        }
        throw MomentDomainError(law.name() + ": exact covariance needs the second moment; second moment requires b>4",
                                2);
    }
}

}  // namespace detail

/// Closed-form covariance from raw moments:
/// Cov(c1 X + c2 X^2, d1 X + d2 X^2) = c1 d1 var + (c1 d2 + c2 d1)(m3 - m1 m2) + c2 d2 (m4 - m2^2).
inline Covariance2 covariance_exact_moments(const LawSpec& law, const QuadraticInfluence& H,
                                            const QuadraticInfluence& L) {
    const MomentSet ms = theoretical_moments(law);
    detail::require_second_moments(law, {H, L}, ms);
    const double var = *ms.variance;
    const double m1 = *ms.m1;
    const double m2 = *ms.m2;
    const double m3 = ms.m3.value_or(0.0);
    const double m4 = ms.m4.value_or(0.0);
    const double k13 = m3 - m1 * m2;
    const double k22 = m4 - m2 * m2;
    auto cov = [&](const QuadraticInfluence& f, const QuadraticInfluence& g) {
        double s = f.c1 * g.c1 * var;
        if (f.c2 != 0.0 || g.c2 != 0.0) s += (f.c1 * g.c2 + f.c2 * g.c1) * k13;
        if (f.c2 != 0.0 && g.c2 != 0.0) s += f.c2 * g.c2 * k22;
        return s;
    };
    return {cov(H, H), cov(L, L), cov(H, L), SigmaMethod::ExactMoments};
}

inline Covariance2 covariance_exact_moments(const LawSpec& law, const InfluencePair& p) {
    return covariance_exact_moments(law, p.H, p.L);
}

/// Covariance from quantile integrals: s11 = int H(Q(u))^2 du - (int H(Q(u)) du)^2, etc.
inline Covariance2 covariance_exact_quadrature(const LawSpec& law, const QuadraticInfluence& H,
                                               const QuadraticInfluence& L, const QuadratureConfig& cfg = {}) {
    detail::require_second_moments(law, {H, L}, theoretical_moments(law));
    const double eh = expect_via_quantile(law, [&](double x) { return H(x); }, cfg);
    const double el = expect_via_quantile(law, [&](double x) { return L(x); }, cfg);
    const double ehh = expect_via_quantile(law, [&](double x) { return H(x) * H(x); }, cfg);
    const double ell = expect_via_quantile(law, [&](double x) { return L(x) * L(x); }, cfg);
    const double ehl = expect_via_quantile(law, [&](double x) { return H(x) * L(x); }, cfg);
    return {ehh - eh * eh, ell - el * el, ehl - eh * el, SigmaMethod::ExactQuadrature};
}

inline Covariance2 covariance_exact_quadrature(const LawSpec& law, const InfluencePair& p,
                                               const QuadratureConfig& cfg = {}) {
    return covariance_exact_quadrature(law, p.H, p.L, cfg);
}

namespace detail {

// Sample covariance matrix (divisor n - 1) of paired series, two-pass.
inline Covariance2 paired_covariance(std::span<const double> u, std::span<const double> w, SigmaMethod method) {
    const std::size_t n = u.size();
    double su = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        su += u[i];
        sw += w[i];
    }
    const double mu = su / static_cast<double>(n);
    const double mw = sw / static_cast<double>(n);
    double cuu = 0.0, cww = 0.0, cuw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double du = u[i] - mu;
        const double dw = w[i] - mw;
        cuu += du * du;
        cww += dw * dw;
        cuw += du * dw;
    }
    const double denom = static_cast<double>(n - 1);
    return {cuu / denom, cww / denom, cuw / denom, method};
}

}  // namespace detail

/// Plug-in covariance: sample (co)variances of H(X_i) and L(X_i) on one sample,
/// with the coefficients fixed at the hypothesized law.
inline Covariance2 covariance_plugin(std::span<const double> sample, const QuadraticInfluence& H,
                                     const QuadraticInfluence& L) {
    if (sample.size() < 2) throw InsufficientData("plug-in covariance needs at least two observations");
    std::vector<double> h(sample.size()), l(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        h[i] = H(sample[i]);
        l[i] = L(sample[i]);
    }
    return detail::paired_covariance(h, l, SigmaMethod::PluginSample);
}

/// Covariance of replicated deviations sqrt(n)(a_hat - a), sqrt(n)(b_hat - b).
inline Covariance2 covariance_replication(std::span<const double> dev_a, std::span<const double> dev_b) {
    if (dev_a.size() != dev_b.size()) throw DomainError("covariance_replication: deviation lists differ in length");
    if (dev_a.size() < 2) throw InsufficientData("covariance_replication: need at least two replications");
    return detail::paired_covariance(dev_a, dev_b, SigmaMethod::Replication);
}

/// Functional empirical process G_n(f) = n^{-1/2} sum (f(X_i) - E f(X)).
inline double empirical_process(std::span<const double> sample, const QuadraticInfluence& f) {
    double s = 0.0;
    for (double x : sample) s += f(x);
    return s / std::sqrt(static_cast<double>(sample.size()));
}

}  // namespace momest

#endif  // MOMEST_ASYMPTOTICS_HPP
