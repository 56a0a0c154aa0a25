// Estimate Gamma(10, 3) parameters from a seeded sample, then test H0: (10, 3)
// with the exact asymptotic covariance.

#include <cstdio>

#include "momest/momest.hpp"

int main() {
    using namespace momest;

    const LawSpec law = LawSpec::gamma(10.0, 3.0);
    const auto xs = sample(law, 2000, 20240601);

    const ParamEstimate est = estimate(law.kind(), xs);
    std::printf("a_hat = %.4f  b_hat = %.4f  (n = %zu)\n", est.a_hat, est.b_hat, est.n);

    const InfluencePair inf = influence_pair(law);
    const Covariance2 sigma = covariance_exact_moments(law, inf);
    std::printf("sigma = [[%.4f, %.4f], [%.4f, %.4f]]  correlation %.4f\n", sigma.s11(), sigma.s12(), sigma.s12(),
                sigma.s22(), sigma.correlation());

    const TestReport ta = marginal_test(est.a_hat, law.a(), sigma.s11(), xs.size());
    const TestReport tb = marginal_test(est.b_hat, law.b(), sigma.s22(), xs.size());
    const TestReport q = omnibus_test(est.a_hat, est.b_hat, law.a(), law.b(), xs.size(), sigma);
    std::printf("z(a) = %.3f  p = %.3f\n", ta.statistic, ta.p_value);
    std::printf("z(b) = %.3f  p = %.3f\n", tb.statistic, tb.p_value);
    std::printf("Q    = %.3f  p = %.3f  %s\n", q.statistic, q.p_value, q.reject_at_5pct ? "reject" : "accept");
    return 0;
}
