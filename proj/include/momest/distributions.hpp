#ifndef MOMEST_DISTRIBUTIONS_HPP
#define MOMEST_DISTRIBUTIONS_HPP

// The four parametric laws: Gamma(shape a, rate b), Beta(a, b), Uniform(a, b)
// and Fisher F(a, b) with a and b degrees of freedom.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "momest/errors.hpp"
#include "momest/rng.hpp"
#include "momest/special.hpp"

namespace momest {

enum class LawKind { Gamma, Beta, Uniform, Fisher };

inline std::string_view to_string(LawKind kind) {
    switch (kind) {
        case LawKind::Gamma: return "gamma";
        case LawKind::Beta: return "beta";
        case LawKind::Uniform: return "uniform";
        case LawKind::Fisher: return "fisher";
    }
    return "unknown";
}

inline LawKind parse_law_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "gamma") return LawKind::Gamma;
    if (lower == "beta") return LawKind::Beta;
    if (lower == "uniform") return LawKind::Uniform;
    if (lower == "fisher" || lower == "f") return LawKind::Fisher;
    throw DomainError("unknown law '" + std::string(text) + "' (expected gamma, beta, uniform or fisher)");
}

/// A law together with its parameter pair. Construction validates the domain.
class LawSpec {
public:
    LawSpec(LawKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {
        if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("law parameters must be finite");
        switch (kind) {
            case LawKind::Gamma:
            case LawKind::Beta:
            case LawKind::Fisher:
                if (!(a > 0.0 && b > 0.0)) {
                    throw DomainError(std::string(to_string(kind)) + " law needs a > 0 and b > 0");
                }
                break;
            case LawKind::Uniform:
                // Any a < b is accepted; positivity of a plays no role in the formulas.
                if (!(b > a)) throw DomainError("uniform law needs b > a");
                break;
        }
    }

    static LawSpec gamma(double shape, double rate) { return {LawKind::Gamma, shape, rate}; }
    static LawSpec beta(double a, double b) { return {LawKind::Beta, a, b}; }
    static LawSpec uniform(double lo, double hi) { return {LawKind::Uniform, lo, hi}; }
    static LawSpec fisher(double df1, double df2) { return {LawKind::Fisher, df1, df2}; }

    LawKind kind() const noexcept { return kind_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    std::string name() const {
        std::ostringstream os;
        os << to_string(kind_) << '(' << a_ << ", " << b_ << ')';
        return os.str();
    }

    friend bool operator==(const LawSpec&, const LawSpec&) = default;

private:
    LawKind kind_;
    double a_;
    double b_;
};

/// Raw moments m_k = E X^k (k = 1..4) and the variance. An entry is empty when
/// the moment does not exist for the parameter values (Fisher: m_k needs b > 2k).
struct MomentSet {
    std::optional<double> m1, m2, m3, m4;
    std::optional<double> variance;

    std::optional<double> raw(int k) const {
        switch (k) {
            case 1: return m1;
            case 2: return m2;
            case 3: return m3;
            case 4: return m4;
            default: return std::nullopt;
        }
    }
};

namespace detail {

inline std::optional<double> raw_moment(const LawSpec& law, int k) {
    const double a = law.a();
    const double b = law.b();
    double m = 1.0;
    switch (law.kind()) {
        case LawKind::Gamma:
            for (int j = 0; j < k; ++j) m *= (a + j) / b;
            return m;
        case LawKind::Beta:
            for (int j = 0; j < k; ++j) m *= (a + j) / (a + b + j);
            return m;
        case LawKind::Uniform: {
            // (b^{k+1} - a^{k+1}) / ((k+1)(b-a)) written without the cancellation.
            double sum = 0.0;
            for (int i = 0; i <= k; ++i) sum += std::pow(a, i) * std::pow(b, k - i);
            return sum / (k + 1);
        }
        case LawKind::Fisher:
            if (!(b > 2.0 * k)) return std::nullopt;
            for (int j = 0; j < k; ++j) m *= (b / a) * (a + 2.0 * j) / (b - 2.0 - 2.0 * j);
            return m;
    }
    return std::nullopt;
}

}  // namespace detail

inline MomentSet theoretical_moments(const LawSpec& law) {
    MomentSet ms;
    ms.m1 = detail::raw_moment(law, 1);
    ms.m2 = detail::raw_moment(law, 2);
    ms.m3 = detail::raw_moment(law, 3);
    ms.m4 = detail::raw_moment(law, 4);
    const double a = law.a();
    const double b = law.b();
    switch (law.kind()) {
        case LawKind::Gamma: ms.variance = a / (b * b); break;
        case LawKind::Beta: ms.variance = a * b / ((a + b) * (a + b) * (a + b + 1.0)); break;
        case LawKind::Uniform: ms.variance = (b - a) * (b - a) / 12.0; break;
        case LawKind::Fisher:
            if (b > 4.0) ms.variance = 2.0 * b * b * (a + b - 2.0) / (a * (b - 2.0) * (b - 2.0) * (b - 4.0));
            break;
    }
    return ms;
}

/// Density; zero outside the support. The Fisher density is the canonical
/// F(a, b) form, normalized through B(a/2, b/2).
inline double pdf(const LawSpec& law, double x) {
    const double a = law.a();
    const double b = law.b();
    switch (law.kind()) {
        case LawKind::Gamma:
            if (x < 0.0) return 0.0;
            if (x == 0.0) return a < 1.0 ? HUGE_VAL : (a == 1.0 ? b : 0.0);
            return std::exp(a * std::log(b) + (a - 1.0) * std::log(x) - b * x - ln_gamma(a));
        case LawKind::Beta:
            if (x < 0.0 || x > 1.0) return 0.0;
            if (x == 0.0) return a < 1.0 ? HUGE_VAL : (a == 1.0 ? b : 0.0);
            if (x == 1.0) return b < 1.0 ? HUGE_VAL : (b == 1.0 ? a : 0.0);
            return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln_beta(a, b));
        case LawKind::Uniform:
            return (x >= a && x <= b) ? 1.0 / (b - a) : 0.0;
        case LawKind::Fisher:
            if (x < 0.0) return 0.0;
            if (x == 0.0) return a < 2.0 ? HUGE_VAL : (a == 2.0 ? 1.0 : 0.0);
            return std::exp(0.5 * a * std::log(a / b) + (0.5 * a - 1.0) * std::log(x) -
                            0.5 * (a + b) * std::log1p(a * x / b) - ln_beta(0.5 * a, 0.5 * b));
    }
    return 0.0;
}

inline double cdf(const LawSpec& law, double x) {
    const double a = law.a();
    const double b = law.b();
    switch (law.kind()) {
        case LawKind::Gamma: return x <= 0.0 ? 0.0 : reg_inc_gamma(a, b * x);
        case LawKind::Beta: return reg_inc_beta(a, b, std::clamp(x, 0.0, 1.0));
        case LawKind::Uniform: return std::clamp((x - a) / (b - a), 0.0, 1.0);
        case LawKind::Fisher:
            if (x <= 0.0) return 0.0;
            if (std::isinf(x)) return 1.0;
            return reg_inc_beta(0.5 * a, 0.5 * b, a * x / (a * x + b));
    }
    return 0.0;
}

/// Survival function 1 - cdf, evaluated directly in the upper tail.
inline double sf(const LawSpec& law, double x) {
    const double a = law.a();
    const double b = law.b();
    switch (law.kind()) {
        case LawKind::Gamma: return x <= 0.0 ? 1.0 : reg_inc_gamma_upper(a, b * x);
        case LawKind::Beta: return inc_beta_pair(a, b, std::clamp(x, 0.0, 1.0)).upper;
        case LawKind::Uniform: return std::clamp((b - x) / (b - a), 0.0, 1.0);
        case LawKind::Fisher:
            if (x <= 0.0) return 1.0;
            if (std::isinf(x)) return 0.0;
            return reg_inc_beta(0.5 * b, 0.5 * a, b / (a * x + b));
    }
    return 0.0;
}

/// x with cdf(x) = p, for p in [0, 1).
inline double quantile_lower(const LawSpec& law, double p) {
    const double a = law.a();
    const double b = law.b();
    switch (law.kind()) {
        case LawKind::Gamma: return inverse_reg_inc_gamma(a, p) / b;
        case LawKind::Beta: return inverse_reg_inc_beta(a, b, p);
        case LawKind::Uniform: return a + p * (b - a);
        case LawKind::Fisher: {
            const double y = inverse_reg_inc_beta(0.5 * a, 0.5 * b, p);
            return b * y / (a * (1.0 - y));
        }
    }
    return 0.0;
}

/// x with sf(x) = q, for q in (0, 1]. Accurate for tiny q.
inline double quantile_upper(const LawSpec& law, double q) {
    const double a = law.a();
    const double b = law.b();
    switch (law.kind()) {
        case LawKind::Gamma: return inverse_reg_inc_gamma_upper(a, q) / b;
        case LawKind::Beta: return 1.0 - inverse_reg_inc_beta(b, a, q);
        case LawKind::Uniform: return b - q * (b - a);
        case LawKind::Fisher: {
            const double z = inverse_reg_inc_beta(0.5 * b, 0.5 * a, q);
            return b * (1.0 - z) / (a * z);
        }
    }
    return 0.0;
}

/// Generalized inverse of the cdf on (0, 1).
inline double quantile(const LawSpec& law, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: probability must lie in (0, 1)");
    return u <= 0.5 ? quantile_lower(law, u) : quantile_upper(law, 1.0 - u);
}

/// Half-width of the normal-score range used by `expect_via_quantile`;
/// Phi(-37) is about 6e-300.
inline constexpr double kNormalScoreLimit = 37.0;

/// E g(X) = integral over (0, 1) of g(Q(u)) du.
///
/// The unit interval is mapped through u = Phi(t), which turns the integrable
/// endpoint singularities of the quantile integrand into tails that decay like
/// the normal density, and the trapezoid rule is applied on
/// [-kNormalScoreLimit, kNormalScoreLimit]. Quantiles for t > 0 come from the
/// upper-tail inverse so no precision is lost near u = 1.
template <class G>
double expect_via_quantile(const LawSpec& law, G&& g, const QuadratureConfig& cfg = {}) {
    auto integrand = [&](double t) {
        const double x = t <= 0.0 ? quantile_lower(law, normal_cdf(t)) : quantile_upper(law, normal_cdf(-t));
        return g(x) * normal_pdf(t);
    };
    return trapezoid_integrate(integrand, -kNormalScoreLimit, kNormalScoreLimit, cfg);
}

namespace detail {

// Marsaglia-Tsang squeeze method; shapes below one use the U^{1/shape} boost.
inline double standard_gamma(double shape, Rng& rng) {
    if (shape < 1.0) {
        const double g = standard_gamma(shape + 1.0, rng);
        return g * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace detail

/// One draw from the law.
inline double draw(const LawSpec& law, Rng& rng) {
    const double a = law.a();
    const double b = law.b();
    switch (law.kind()) {
        case LawKind::Gamma: return detail::standard_gamma(a, rng) / b;
        case LawKind::Beta: {
            const double g1 = detail::standard_gamma(a, rng);
            const double g2 = detail::standard_gamma(b, rng);
            return g1 / (g1 + g2);
        }
        case LawKind::Uniform: return a + (b - a) * rng.uniform();
        case LawKind::Fisher: {
            // Ratio of independent chi-squares scaled by their degrees of freedom.
            const double g1 = detail::standard_gamma(0.5 * a, rng);
            const double g2 = detail::standard_gamma(0.5 * b, rng);
            return (g1 * b) / (g2 * a);
        }
    }
    return 0.0;
}

inline void sample_into(const LawSpec& law, std::span<double> out, Rng& rng) {
    for (double& x : out) x = draw(law, rng);
}

/// n i.i.d. draws, fully determined by `seed`.
inline std::vector<double> sample(const LawSpec& law, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("sample: n must be at least 1");
    std::vector<double> out(n);
    Rng rng(seed);
    sample_into(law, out, rng);
    return out;
}

}  // namespace momest

#endif  // MOMEST_DISTRIBUTIONS_HPP
