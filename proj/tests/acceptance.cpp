// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Every random quantity is driven by a fixed seed.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "momest/momest.hpp"
#include "oracles.hpp"

#ifndef MOMEST_CLI_PATH
#error "MOMEST_CLI_PATH must point at the momest executable"
#endif

using namespace momest;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

std::string num(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

const std::vector<LawSpec>& four_laws() {
    static const std::vector<LawSpec> laws{LawSpec::gamma(2, 3), LawSpec::beta(2, 3), LawSpec::uniform(0, 1),
                                           LawSpec::fisher(5, 12)};
    return laws;
}

SimulationReport simulate(const LawSpec& law, std::size_t n, std::size_t B, std::uint64_t seed,
                          std::vector<SigmaMethod> methods) {
    SimulationConfig cfg;
    cfg.law = law;
    cfg.n = n;
    cfg.B = B;
    cfg.master_seed = seed;
    cfg.sigma_methods = std::move(methods);
    cfg.workers = worker_count();
    return run_simulation(cfg);
}

// 1. Exact covariance for gamma(2, 3), moments and quadrature.
Outcome criterion_1() {
    Outcome o;
    const LawSpec law = LawSpec::gamma(2, 3);

    // Independent recomputation: moments by Simpson, Jacobian by finite differences.
    const oracle::Sigma ref = oracle::delta_sigma(oracle::Law::Gamma, 2, 3);
    o.require(rel_err(ref.s11, 12) < 1e-6 && rel_err(ref.s22, 31.5) < 1e-6 && rel_err(ref.s12, 18) < 1e-6,
              "oracle [[" + num(ref.s11, 8) + "," + num(ref.s12, 8) + "],[" + num(ref.s12, 8) + "," +
                  num(ref.s22, 8) + "]]");

    const auto t0 = Clock::now();
    const InfluencePair p = influence_pair(law);
    const Covariance2 em = covariance_exact_moments(law, p);
    const Covariance2 eq = covariance_exact_quadrature(law, p);
    const double elapsed = seconds_since(t0);

    o.require(rel_err(em.s11(), 12) < 1e-12 && rel_err(em.s22(), 31.5) < 1e-12 && rel_err(em.s12(), 18) < 1e-12,
              "moments s11=" + num(em.s11(), 10) + " s22=" + num(em.s22(), 10) + " s12=" + num(em.s12(), 10));
    o.require(rel_err(em.det(), 54) < 1e-10, "det=" + num(em.det(), 10));
    const double q = std::max({rel_err(eq.s11(), em.s11()), rel_err(eq.s22(), em.s22()), rel_err(eq.s12(), em.s12())});
    o.require(q <= 1e-5, "quadrature max rel diff " + num(q, 3));
    o.require(elapsed < 1.0, "time " + num(elapsed, 3) + "s");
    return o;
}

// 2. Replication covariance against the canonical exact covariance.
Outcome criterion_2() {
    Outcome o;
    const auto t0 = Clock::now();
    for (const auto& law : four_laws()) {
        const auto r = simulate(law, 5000, 5000, 20260101, {SigmaMethod::ExactMoments, SigmaMethod::Replication});
        const Covariance2& ex = *r.sigma(SigmaMethod::ExactMoments);
        const Covariance2& rep = *r.sigma(SigmaMethod::Replication);
        const double d = std::max({rel_err(rep.s11(), ex.s11()), rel_err(rep.s22(), ex.s22()),
                                   rel_err(rep.s12(), ex.s12())});
        o.require(d <= 0.10, law.name() + " max rel " + num(d, 3));
    }
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 120.0, "time " + num(elapsed, 3) + "s");
    return o;
}

// 3. Omnibus calibration.
Outcome criterion_3() {
    Outcome o;
    for (const auto& law : four_laws()) {
        const auto exact = simulate(law, 1000, 2000, 31415, {SigmaMethod::ExactMoments});
        const auto rate = exact.omnibus.at(0).rate;
        o.require(rate && *rate >= 0.035 && *rate <= 0.07,
                  law.name() + " exact n=1000 " + (rate ? pct(*rate) : exact.omnibus[0].note));
        const auto rep = simulate(law, 200, 2000, 27182, {SigmaMethod::Replication});
        const auto rr = rep.omnibus.at(0).rate;
        o.require(rr && *rr >= 0.03 && *rr <= 0.08,
                  law.name() + " replication n=200 " + (rr ? pct(*rr) : rep.omnibus[0].note));
    }
    return o;
}

// 4. Marginal rejection rates with the replication covariance, gamma(10, 3).
Outcome criterion_4() {
    Outcome o;
    for (std::size_t n : {50, 100, 200, 1000}) {
        const auto r = simulate(LawSpec::gamma(10, 3), n, 1000, 16180, {SigmaMethod::Replication});
        const auto& m = r.marginal.at(0);
        const bool ok = std::abs(m.rate_a - 0.05) <= 0.02 && std::abs(m.rate_b - 0.05) <= 0.02;
        o.require(ok, "n=" + std::to_string(n) + " a " + pct(m.rate_a) + " b " + pct(m.rate_b));
    }
    return o;
}

// 5. Error decay, gamma(10, 3).
Outcome criterion_5() {
    Outcome o;
    std::vector<double> mae;
    for (std::size_t n : {25, 100, 1000}) {
        const auto r = simulate(LawSpec::gamma(10, 3), n, 1000, 14142, {SigmaMethod::ExactMoments});
        mae.push_back(r.errors.a.mae);
    }
    o.require(mae[0] > mae[1] && mae[1] > mae[2],
              "MAE(a) " + num(mae[0]) + " -> " + num(mae[1]) + " -> " + num(mae[2]));
    o.require(mae[2] < mae[0] / 3.0, "ratio " + num(mae[0] / mae[2], 3));
    return o;
}

// 6. Verbatim coefficients against the published correlation.
Outcome criterion_6() {
    Outcome o;
    const LawSpec law = LawSpec::gamma(2, 3);
    const double published = 0.6976;
    const double verbatim =
        covariance_exact_quadrature(law, influence_pair(law, CoefficientMode::PaperVerbatim)).correlation();
    const double canonical =
        covariance_exact_quadrature(law, influence_pair(law, CoefficientMode::Canonical)).correlation();
    o.require(rel_err(verbatim, published) <= 0.10,
              "verbatim " + num(verbatim) + " vs " + num(published) + " (rel " + num(rel_err(verbatim, published), 3) +
                  ")");
    o.require(rel_err(canonical, published) > 0.10 && std::abs(canonical - 0.9258) < 1e-3,
              "canonical " + num(canonical));
    return o;
}

// 7. Special functions.
Outcome criterion_7() {
    Outcome o;
    double worst = 0.0;
    for (int i = 0; i <= 50000; ++i) {
        const double x = 50.0 * i / 50000.0;
        worst = std::max(worst, std::abs(chisq_cdf(x, 2) - (1.0 - std::exp(-x / 2.0))));
    }
    o.require(worst <= 1e-12, "chisq2 max abs " + num(worst, 3));

    double rt = 0.0;
    for (const auto& law : four_laws()) {
        for (double u = 1e-6; u < 1.0; u += 0.0137) {
            rt = std::max(rt, std::abs(cdf(law, quantile(law, u)) - u));
        }
        for (double u : {1e-12, 1e-9, 1e-7, 1.0 - 1e-7, 1.0 - 1e-9}) {
            rt = std::max(rt, std::abs(cdf(law, quantile(law, u)) - u));
        }
    }
    o.require(rt <= 1e-7, "roundtrip max " + num(rt, 3));

    double norm = 0.0;
    const QuadratureConfig cfg{100, 1e-10, 22};
    for (const auto& law : four_laws()) {
        double total = 0.0;
        if (law.kind() == LawKind::Gamma || law.kind() == LawKind::Fisher) {
            total = trapezoid_integrate(
                [&](double t) { return t >= 1.0 ? 0.0 : pdf(law, t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)); }, 0.0, 1.0,
                cfg);
        } else {
            const double lo = law.kind() == LawKind::Uniform ? law.a() : 0.0;
            const double hi = law.kind() == LawKind::Uniform ? law.b() : 1.0;
            total = trapezoid_integrate([&](double x) { return pdf(law, x); }, lo, hi, cfg);
        }
        norm = std::max(norm, std::abs(total - 1.0));
    }
    o.require(norm <= 1e-6, "pdf normalization max " + num(norm, 3));
    return o;
}

// 8. Joint behaviour of (G_n(x), G_n(x^2)) under gamma(2, 3).
Outcome criterion_8() {
    Outcome o;
    const LawSpec law = LawSpec::gamma(2, 3);
    const MomentSet ms = theoretical_moments(law);
    const QuadraticInfluence h1{1.0, 0.0, *ms.m1};
    const QuadraticInfluence h2{0.0, 1.0, *ms.m2};
    const Covariance2 gamma_exact = covariance_exact_moments(law, h1, h2);

    const std::size_t n = 5000, B = 5000;
    std::vector<double> g1(B), g2(B);
    std::vector<double> buf(n);
    for (std::size_t j = 0; j < B; ++j) {
        Rng rng(derive_seed(8080, j));
        sample_into(law, buf, rng);
        g1[j] = empirical_process(buf, h1);
        g2[j] = empirical_process(buf, h2);
    }
    const Covariance2 emp = covariance_replication(g1, g2);
    const double d = std::max({rel_err(emp.s11(), gamma_exact.s11()), rel_err(emp.s22(), gamma_exact.s22()),
                               rel_err(emp.s12(), gamma_exact.s12())});
    o.require(d <= 0.10, "cov max rel " + num(d, 3) + " (exact " + num(gamma_exact.s11()) + "," +
                             num(gamma_exact.s22()) + "," + num(gamma_exact.s12()) + ")");
    const double q1 = qq_correlation(g1);
    const double q2 = qq_correlation(g2);
    o.require(q1 >= 0.999 && q2 >= 0.999, "qq corr " + num(q1, 6) + ", " + num(q2, 6));
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" MOMEST_CLI_PATH "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 9. Byte-identical simulate output across reruns and worker counts.
Outcome criterion_9() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "momest_acceptance_determinism";
    fs::remove_all(root);
    const std::string base = "simulate gamma 10 3 --n 50,200 --B 500 --seed 424242 --mode verbatim "
                             "--sigma exact,quadrature,plugin,replication";
    const std::vector<std::pair<std::string, unsigned>> runs{{"w1", 1}, {"w1_again", 1}, {"w4", 4}, {"w8", 8}};
    for (const auto& [name, workers] : runs) {
        const int code = run_cli(base + " --workers " + std::to_string(workers) + " --out \"" + (root / name).string() + "\"");
        o.require(code == 0, name + " exit " + std::to_string(code));
    }
    std::size_t files = 0, mismatched = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "w1")) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), root / "w1");
        const std::string ref = slurp(entry.path());
        for (const auto& [name, workers] : runs) {
            if (slurp(root / name / rel) != ref) ++mismatched;
        }
        ++files;
    }
    o.require(files >= 16 && mismatched == 0,
              std::to_string(files) + " files x " + std::to_string(runs.size()) + " runs, " +
                  std::to_string(mismatched) + " mismatches");
    fs::remove_all(root);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"exact covariance gamma(2,3)", criterion_1},
        {"replication vs delta-method covariance", criterion_2},
        {"omnibus calibration", criterion_3},
        {"marginal rates gamma(10,3), replication sigma", criterion_4},
        {"error decay gamma(10,3)", criterion_5},
        {"verbatim coefficient correlation", criterion_6},
        {"special-function accuracy", criterion_7},
        {"empirical-process CLT gamma(2,3)", criterion_8},
        {"determinism across workers", criterion_9},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
