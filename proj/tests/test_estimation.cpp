#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "momest/distributions.hpp"
#include "momest/estimation.hpp"
#include "momest/rng.hpp"
#include "oracles.hpp"

using namespace momest;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("empirical moments by hand", "[estimation]") {
    const std::vector<double> xs{1.0, 2.0, 4.0, 5.0};
    const EmpiricalMoments em = empirical_moments(xs);
    CHECK(em.n == 4);
    CHECK_THAT(em.mean, WithinRel(3.0, 1e-15));
    CHECK_THAT(em.mean_sq, WithinRel(11.5, 1e-15));
    CHECK_THAT(em.var_unbiased, WithinRel(10.0 / 3.0, 1e-15));
    CHECK_THAT(em.var_biased, WithinRel(2.5, 1e-15));
    CHECK_THROWS_AS(empirical_moments(std::vector<double>{1.0}), InsufficientData);
}

TEST_CASE("uniform estimator on {0, 2}", "[estimation]") {
    const ParamEstimate e = estimate(LawKind::Uniform, std::vector<double>{0.0, 2.0});
    // S^2 = 2, so the bounds are 1 -/+ sqrt(3) sqrt(2).
    CHECK_THAT(e.a_hat, WithinRel(1.0 - std::sqrt(3.0) * std::sqrt(2.0), 1e-15));
    CHECK_THAT(e.b_hat, WithinRel(1.0 + std::sqrt(3.0) * std::sqrt(2.0), 1e-15));
    CHECK(e.n == 2);
}

TEST_CASE("gamma and beta estimators by hand", "[estimation]") {
    const std::vector<double> xs{1.0, 2.0, 4.0, 5.0};
    const ParamEstimate g = estimate(LawKind::Gamma, xs);
    CHECK_THAT(g.a_hat, WithinRel(9.0 / (10.0 / 3.0), 1e-15));
    CHECK_THAT(g.b_hat, WithinRel(3.0 / (10.0 / 3.0), 1e-15));

    // Beta uses the divisor-n variance: mean 0.4, v = 0.02.
    const std::vector<double> ys{0.2, 0.4, 0.6, 0.4};
    const ParamEstimate b = estimate(LawKind::Beta, ys);
    const double common = 0.4 * 0.6 / 0.02 - 1.0;
    CHECK_THAT(b.a_hat, WithinRel(0.4 * common, 1e-12));
    CHECK_THAT(b.b_hat, WithinRel(0.6 * common, 1e-12));
}

TEST_CASE("estimator failure modes", "[estimation]") {
    const std::vector<double> ones(4, 1.0);
    CHECK_THROWS_AS(estimate(LawKind::Gamma, ones), DegenerateSample);
    CHECK_THROWS_WITH(estimate(LawKind::Gamma, ones), ContainsSubstring("S²=0"));
    CHECK_THROWS_AS(estimate(LawKind::Beta, std::vector<double>{0.5, 0.5, 0.5}), DegenerateSample);
    CHECK_THROWS_AS(estimate(LawKind::Beta, std::vector<double>{1.5, 2.5}), DegenerateSample);
    CHECK_THROWS_AS(estimate(LawKind::Fisher, std::vector<double>{0.5, 0.9, 1.2}), InfeasibleMoment);
    // Mean above one but variance too large for a positive first-parameter denominator.
    CHECK_THROWS_AS(estimate(LawKind::Fisher, std::vector<double>{0.01, 0.01, 10.0}), DegenerateSample);
    CHECK_THROWS_AS(estimate(LawKind::Gamma, std::vector<double>{2.0}), InsufficientData);
    CHECK_NOTHROW(estimate(LawKind::Uniform, ones));
}

TEST_CASE("inverting exact moments returns the parameters", "[estimation]") {
    const std::vector<LawSpec> laws{LawSpec::gamma(2, 3), LawSpec::beta(2, 3), LawSpec::uniform(0, 1),
                                    LawSpec::fisher(5, 12), LawSpec::gamma(10, 3), LawSpec::uniform(-4, 7)};
    for (const auto& law : laws) {
        INFO(law.name());
        const MomentSet ms = theoretical_moments(law);
        const ParamPair p = invert_moments(law.kind(), *ms.m1, *ms.m2, *ms.variance);
        CHECK_THAT(p.a, WithinAbs(law.a(), 1e-12 * std::max(1.0, std::abs(law.a()))));
        CHECK_THAT(p.b, WithinAbs(law.b(), 1e-12 * std::max(1.0, std::abs(law.b()))));
        const auto o = oracle::estimator_map(static_cast<oracle::Law>(law.kind()), *ms.m1, *ms.variance);
        CHECK_THAT(p.a, WithinAbs(o[0], 1e-12 * std::max(1.0, std::abs(o[0]))));
        CHECK_THAT(p.b, WithinAbs(o[1], 1e-12 * std::max(1.0, std::abs(o[1]))));
    }
}

TEST_CASE("large seeded gamma(10, 3) sample", "[estimation][sampling]") {
    const auto xs = sample(LawSpec::gamma(10, 3), 1000000, 31337);
    const ParamEstimate e = estimate(LawKind::Gamma, xs);
    CHECK_THAT(e.a_hat, WithinRel(10.0, 0.02));
    CHECK_THAT(e.b_hat, WithinRel(3.0, 0.02));
}

TEST_CASE("consistency: error at n = 1e5 below error at n = 1e2", "[estimation][sampling][slow]") {
    const std::vector<LawSpec> laws{LawSpec::gamma(2, 3), LawSpec::beta(2, 3), LawSpec::uniform(0, 1),
                                    LawSpec::fisher(5, 12)};
    const std::size_t reps = 200;
    for (const auto& law : laws) {
        std::size_t better = 0, comparable = 0;
        std::vector<double> small(100), large(100000);
        for (std::size_t j = 0; j < reps; ++j) {
            Rng rng(derive_seed(555, j));
            sample_into(law, small, rng);
            sample_into(law, large, rng);
            double err_small;
            try {
                err_small = std::abs(estimate(law.kind(), small).a_hat - law.a());
            } catch (const InfeasibleMoment&) {
                err_small = INFINITY;
            } catch (const DegenerateSample&) {
                err_small = INFINITY;
            }
            const double err_large = std::abs(estimate(law.kind(), large).a_hat - law.a());
            ++comparable;
            better += err_large < err_small;
        }
        INFO(law.name() << " " << better << "/" << comparable);
        CHECK(static_cast<double>(better) >= 0.95 * static_cast<double>(comparable));
    }
}
