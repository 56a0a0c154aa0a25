#ifndef MOMEST_ESTIMATION_HPP
#define MOMEST_ESTIMATION_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "momest/distributions.hpp"
#include "momest/errors.hpp"

namespace momest {

/// Sample summary feeding the moment estimators.
struct EmpiricalMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double mean_sq = 0.0;       // (1/n) sum x^2
    double var_unbiased = 0.0;  // S_n^2, divisor n - 1
    double var_biased = 0.0;    // mean_sq - mean^2, divisor n
};

/// Two-pass summary. mean_sq is reported as var_biased + mean^2 so that the
/// identity between the fields holds exactly.
inline EmpiricalMoments empirical_moments(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 2) throw InsufficientData("empirical moments need at least two observations");
    double sum = 0.0;
    for (double x : sample) sum += x;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    EmpiricalMoments em;
    em.n = n;
    em.mean = mean;
    em.var_biased = ss / static_cast<double>(n);
    em.var_unbiased = ss / static_cast<double>(n - 1);
    em.mean_sq = em.var_biased + mean * mean;
    return em;
}

struct ParamEstimate {
    LawKind kind;
    double a_hat;
    double b_hat;
    std::size_t n;
};

/// sqrt(12) / 2.
inline constexpr double kUniformLambda = std::numbers::sqrt3;

struct ParamPair {
    double a;
    double b;
};

/// Closed-form moment inversion shared by the estimators and by the
/// population-level checks. `variance` is S_n^2 for Gamma, Uniform and Fisher;
/// Beta ignores it and uses mean_sq - mean^2 as in its displayed estimator.
inline ParamPair invert_moments(LawKind kind, double mean, double mean_sq, double variance) {
    switch (kind) {
        case LawKind::Gamma:
            if (!(variance > 0.0)) throw DegenerateSample("gamma estimator needs S² > 0 (S²=0 sample)");
            if (!(mean > 0.0)) throw DegenerateSample("gamma estimator needs a positive sample mean");
            return {mean * mean / variance, mean / variance};
        case LawKind::Beta: {
            const double spread = mean_sq - mean * mean;
            const double numer = mean - mean_sq;
            if (!(spread > 0.0)) throw DegenerateSample("beta estimator needs mean_sq - mean^2 > 0");
            if (!(numer > 0.0)) throw DegenerateSample("beta estimator needs mean - mean_sq > 0");
            if (!(mean < 1.0)) throw DegenerateSample("beta estimator needs a sample mean below 1");
            return {mean * numer / spread, (1.0 - mean) * numer / spread};
        }
        case LawKind::Uniform: {
            if (!(variance >= 0.0)) throw DegenerateSample("uniform estimator needs S² >= 0");
            const double half_width = kUniformLambda * std::sqrt(variance);
            return {mean - half_width, mean + half_width};
        }
        case LawKind::Fisher: {
            if (!(mean > 1.0)) throw InfeasibleMoment("fisher estimator needs a sample mean above 1");
            const double denom = variance * (2.0 - mean) - mean * mean * (mean - 1.0);
            if (!(denom > 0.0)) {
                throw DegenerateSample("fisher estimator needs S² (2 - mean) - mean^2 (mean - 1) > 0");
            }
            return {2.0 * mean * mean / denom, 2.0 * mean / (mean - 1.0)};
        }
    }
    throw DomainError("invert_moments: unknown law");
}

inline ParamEstimate estimate(LawKind kind, const EmpiricalMoments& em) {
    const double variance = kind == LawKind::Beta ? em.var_biased : em.var_unbiased;
    const ParamPair p = invert_moments(kind, em.mean, em.mean_sq, variance);
    if (!std::isfinite(p.a) || !std::isfinite(p.b)) throw DegenerateSample("estimate is not finite");
    return {kind, p.a, p.b, em.n};
}

inline ParamEstimate estimate(LawKind kind, std::span<const double> sample) {
    return estimate(kind, empirical_moments(sample));
}

}  // namespace momest

#endif  // MOMEST_ESTIMATION_HPP
