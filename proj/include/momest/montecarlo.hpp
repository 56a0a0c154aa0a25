#ifndef MOMEST_MONTECARLO_HPP
#define MOMEST_MONTECARLO_HPP

// Replicated estimation under a known law: deviations, plug-in and replication
// covariance estimates, error tables, empirical rejection frequencies of the
// marginal and omnibus tests, and figure data (QQ points, Parzen curves).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "momest/asymptotics.hpp"
#include "momest/distributions.hpp"
#include "momest/errors.hpp"
#include "momest/estimation.hpp"
#include "momest/rng.hpp"
#include "momest/special.hpp"
#include "momest/testing.hpp"

namespace momest {

struct SimulationConfig {
    LawSpec law = LawSpec::gamma(2.0, 3.0);
    std::size_t n = 50;
    std::size_t B = 1000;
    std::uint64_t master_seed = 0;
    CoefficientMode mode = CoefficientMode::Canonical;
    // Methods whose marginal and omnibus rejection rates are reported.
    std::vector<SigmaMethod> sigma_methods = {SigmaMethod::ExactMoments, SigmaMethod::PluginSample,
                                              SigmaMethod::Replication};
    QuadratureConfig quadrature{};
    // Wall-clock only: reports do not depend on the worker count.
    unsigned workers = 1;

    void validate() const {
        if (n < 2) throw DomainError("simulation: n must be >= 2");
        if (B < 2) throw DomainError("simulation: B must be >= 2");
        if (workers < 1) throw DomainError("simulation: workers must be >= 1");
        if (sigma_methods.empty()) throw DomainError("simulation: at least one sigma method is required");
        quadrature.validate();
    }
};

struct ErrorRow {
    double me = 0.0;    // mean(theta_hat - theta)
    double mae = 0.0;   // mean |theta_hat - theta|
    double rmse = 0.0;  // sqrt(mean (theta_hat - theta)^2)
    double sd = 0.0;    // sd(theta_hat - theta), divisor B - 1; omits the bias term
};

struct ErrorTable {
    ErrorRow a;
    ErrorRow b;
};

inline ErrorRow error_row(std::span<const double> estimates, double truth) {
    if (estimates.empty()) throw InsufficientData("error table needs at least one estimate");
    const double count = static_cast<double>(estimates.size());
    double sum = 0.0, sum_abs = 0.0, sum_sq = 0.0;
    for (double e : estimates) {
        const double d = e - truth;
        sum += d;
        sum_abs += std::abs(d);
        sum_sq += d * d;
    }
    ErrorRow r;
    r.me = sum / count;
    r.mae = sum_abs / count;
    r.rmse = std::sqrt(sum_sq / count);
    if (estimates.size() > 1) {
        double ss = 0.0;
        for (double e : estimates) ss += (e - truth - r.me) * (e - truth - r.me);
        r.sd = std::sqrt(ss / (count - 1.0));
    }
    return r;
}

inline ErrorTable error_table(std::span<const double> achap, std::span<const double> bchap, double a, double b) {
    return {error_row(achap, a), error_row(bchap, b)};
}

/// Estimated-over-exact ratios for the plug-in (emp) and replication (samp)
/// covariance estimates.
struct RatioTable {
    double q1_emp, q2_emp, q12_emp;
    double q1_samp, q2_samp, q12_samp;
};

inline RatioTable ratio_table(const Covariance2& plugin, const Covariance2& replication, const Covariance2& exact) {
    if (exact.s11() == 0.0 || exact.s22() == 0.0 || exact.s12() == 0.0) {
        throw DomainError("ratio_table: exact covariance has a zero entry");
    }
    return {plugin.s11() / exact.s11(),      plugin.s22() / exact.s22(),      plugin.s12() / exact.s12(),
            replication.s11() / exact.s11(), replication.s22() / exact.s22(), replication.s12() / exact.s12()};
}

/// Pairs (Phi^{-1}((i - 0.5)/n), i-th smallest value).
inline std::vector<std::pair<double, double>> qq_plot_data(std::span<const double> values) {
    if (values.size() < 2) throw InsufficientData("qq plot needs at least two values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> out;
    out.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        out.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / n), sorted[i]);
    }
    return out;
}

/// Pearson correlation of the QQ pairs.
inline double qq_correlation(std::span<const double> values) {
    const auto pts = qq_plot_data(values);
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

namespace detail {

// Sample quantile, linear interpolation between order statistics (R type 7).
inline double sorted_quantile(std::span<const double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// 0.9 min(sd, IQR / 1.34) n^{-1/5}; falls back to sd when the IQR vanishes.
inline double silverman_bandwidth(std::span<const double> values) {
    if (values.size() < 2) throw InsufficientData("bandwidth needs at least two values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = detail::sorted_quantile(sorted, 0.75) - detail::sorted_quantile(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) throw DegenerateSample("bandwidth: sample has zero spread; pass a bandwidth explicitly");
    return 0.9 * spread * std::pow(n, -0.2);
}

/// Gaussian-kernel (Parzen) density on an evenly spaced grid.
inline std::vector<std::pair<double, double>> parzen_density(std::span<const double> values, double grid_lo,
                                                             double grid_hi, std::size_t grid_points,
                                                             std::optional<double> bandwidth = std::nullopt) {
    if (values.size() < 2) throw InsufficientData("parzen density needs at least two values");
    if (!(grid_lo < grid_hi)) throw DomainError("parzen density: need grid_lo < grid_hi");
    if (grid_points < 2) throw DomainError("parzen density: need at least two grid points");
    if (bandwidth && !(*bandwidth > 0.0)) throw DomainError("parzen density: bandwidth must be positive");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
    const double norm = 1.0 / (static_cast<double>(values.size()) * h);
    std::vector<std::pair<double, double>> out;
    out.reserve(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = grid_lo + (grid_hi - grid_lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        double acc = 0.0;
        for (double v : values) acc += normal_pdf((x - v) / h);
        out.emplace_back(x, acc * norm);
    }
    return out;
}

/// Rejection frequencies of the two marginal tests for one covariance estimate.
struct MarginalRates {
    SigmaMethod method;
    double rate_a;
    double rate_b;
};

/// Omnibus rejection frequency; empty with a note when the covariance is singular.
struct OmnibusRate {
    SigmaMethod method;
    std::optional<double> rate;
    std::string note;
};

/// Figure data for one standardized statistic (z of a_hat or b_hat under one sigma).
struct FigureSeries {
    std::string parameter;  // "a" or "b"
    SigmaMethod method;
    std::vector<std::pair<double, double>> qq;
    std::vector<std::pair<double, double>> parzen;
};

struct SimulationReport {
    SimulationConfig config;
    InfluencePair influence;

    // Per feasible replication, in replication-index order.
    std::vector<std::size_t> replication;
    std::vector<double> achap, bchap;
    std::vector<double> DA, DB;       // sqrt(n)(estimate - truth)
    std::vector<double> VH, VL, VHL;  // sd(H(X)), sd(L(X)), cov(H(X), L(X)) per sample
    std::size_t infeasible_count = 0;

    ErrorTable errors;
    std::vector<Covariance2> sigmas;  // exact methods (as available) + plug-in + replication
    std::optional<RatioTable> ratios;
    std::vector<MarginalRates> marginal;
    std::vector<OmnibusRate> omnibus;
    std::vector<FigureSeries> figures;

    const Covariance2* sigma(SigmaMethod m) const {
        for (const auto& s : sigmas)
            if (s.method() == m) return &s;
        return nullptr;
    }
};

/// Plug-in covariance aggregated over replications. Canonical mode averages the
/// per-sample variances; verbatim mode squares the average standard deviation.
inline Covariance2 aggregate_plugin(std::span<const double> vh, std::span<const double> vl,
                                    std::span<const double> vhl, CoefficientMode mode) {
    const double count = static_cast<double>(vh.size());
    double s_h = 0.0, s_l = 0.0, s_hl = 0.0;
    for (std::size_t i = 0; i < vh.size(); ++i) {
        if (mode == CoefficientMode::Canonical) {
            s_h += vh[i] * vh[i];
            s_l += vl[i] * vl[i];
        } else {
            s_h += vh[i];
            s_l += vl[i];
        }
        s_hl += vhl[i];
    }
    s_h /= count;
    s_l /= count;
    if (mode == CoefficientMode::PaperVerbatim) {
        s_h *= s_h;
        s_l *= s_l;
    }
    return {s_h, s_l, s_hl / count, SigmaMethod::PluginSample};
}

namespace detail {

struct ReplicationOutcome {
    bool feasible = false;
    double a_hat = 0.0, b_hat = 0.0;
    double vh = 0.0, vl = 0.0, vhl = 0.0;
};

inline ReplicationOutcome run_replication(const SimulationConfig& cfg, const InfluencePair& inf, std::size_t j,
                                          std::vector<double>& buffer) {
    Rng rng(derive_seed(cfg.master_seed, j));
    sample_into(cfg.law, buffer, rng);
    ReplicationOutcome out;
    try {
        const ParamEstimate est = estimate(cfg.law.kind(), std::span<const double>(buffer));
        out.a_hat = est.a_hat;
        out.b_hat = est.b_hat;
    } catch (const DegenerateSample&) {
        return out;
    } catch (const InfeasibleMoment&) {
        return out;
    }
    const Covariance2 plug = covariance_plugin(buffer, inf.H, inf.L);
    out.feasible = true;
    out.vh = std::sqrt(plug.s11());
    out.vl = std::sqrt(plug.s22());
    out.vhl = plug.s12();
    return out;
}

inline std::vector<ReplicationOutcome> run_replications(const SimulationConfig& cfg, const InfluencePair& inf) {
    std::vector<ReplicationOutcome> outcomes(cfg.B);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, cfg.B));
    auto work = [&](unsigned w, std::exception_ptr& error) {
        try {
            std::vector<double> buffer(cfg.n);
            for (std::size_t j = w; j < cfg.B; j += workers) outcomes[j] = run_replication(cfg, inf, j, buffer);
        } catch (...) {
            error = std::current_exception();
        }
    };
    std::vector<std::exception_ptr> errors(workers);
    if (workers == 1) {
        work(0, errors[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, std::ref(errors[w]));
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return outcomes;
}

inline bool is_exact(SigmaMethod m) {
    return m == SigmaMethod::ExactMoments || m == SigmaMethod::ExactQuadrature;
}

}  // namespace detail

/// Grid on which Parzen curves of standardized statistics are tabulated.
inline constexpr double kFigureGridLimit = 4.0;
inline constexpr std::size_t kFigureGridPoints = 161;

inline SimulationReport run_simulation(const SimulationConfig& cfg) {
    cfg.validate();
    SimulationReport rep;
    rep.config = cfg;
    rep.influence = influence_pair(cfg.law, cfg.mode);

    // Exact covariances first so that moment-domain problems surface before any sampling.
    for (SigmaMethod m : cfg.sigma_methods) {
        if (m == SigmaMethod::ExactMoments && !rep.sigma(m)) {
            rep.sigmas.push_back(covariance_exact_moments(cfg.law, rep.influence));
        } else if (m == SigmaMethod::ExactQuadrature && !rep.sigma(m)) {
            rep.sigmas.push_back(covariance_exact_quadrature(cfg.law, rep.influence, cfg.quadrature));
        }
    }

    const auto outcomes = detail::run_replications(cfg, rep.influence);
    const double root_n = std::sqrt(static_cast<double>(cfg.n));
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
        const auto& o = outcomes[j];
        if (!o.feasible) {
            ++rep.infeasible_count;
            continue;
        }
        rep.replication.push_back(j);
        rep.achap.push_back(o.a_hat);
        rep.bchap.push_back(o.b_hat);
        rep.DA.push_back(root_n * (o.a_hat - cfg.law.a()));
        rep.DB.push_back(root_n * (o.b_hat - cfg.law.b()));
        rep.VH.push_back(o.vh);
        rep.VL.push_back(o.vl);
        rep.VHL.push_back(o.vhl);
    }
    if (rep.achap.empty()) throw HarnessError("simulation: every replication was infeasible");
    if (rep.achap.size() < 2) throw HarnessError("simulation: fewer than two feasible replications");

    rep.errors = error_table(rep.achap, rep.bchap, cfg.law.a(), cfg.law.b());
    rep.sigmas.push_back(aggregate_plugin(rep.VH, rep.VL, rep.VHL, cfg.mode));
    rep.sigmas.push_back(covariance_replication(rep.DA, rep.DB));

    const Covariance2* exact = rep.sigma(SigmaMethod::ExactMoments);
    if (!exact) exact = rep.sigma(SigmaMethod::ExactQuadrature);
    if (exact && exact->s11() != 0.0 && exact->s22() != 0.0 && exact->s12() != 0.0) {
        rep.ratios = ratio_table(*rep.sigma(SigmaMethod::PluginSample), *rep.sigma(SigmaMethod::Replication), *exact);
    }

    const std::size_t feasible = rep.achap.size();
    for (SigmaMethod m : cfg.sigma_methods) {
        if (std::any_of(rep.marginal.begin(), rep.marginal.end(), [&](const auto& r) { return r.method == m; })) {
            continue;
        }
        const Covariance2& s = *rep.sigma(m);

        std::size_t rej_a = 0, rej_b = 0;
        const bool marginal_ok = s.s11() > 0.0 && s.s22() > 0.0;
        if (marginal_ok) {
            for (std::size_t i = 0; i < feasible; ++i) {
                rej_a += marginal_test(rep.achap[i], cfg.law.a(), s.s11(), cfg.n, m).reject_at_5pct;
                rej_b += marginal_test(rep.bchap[i], cfg.law.b(), s.s22(), cfg.n, m).reject_at_5pct;
            }
            rep.marginal.push_back({m, static_cast<double>(rej_a) / static_cast<double>(feasible),
                                    static_cast<double>(rej_b) / static_cast<double>(feasible)});
        }

        OmnibusRate omni{m, std::nullopt, ""};
        if (s.det() > det_floor(s)) {
            std::size_t rej = 0;
            for (std::size_t i = 0; i < feasible; ++i) {
                rej += omnibus_test(rep.achap[i], rep.bchap[i], cfg.law.a(), cfg.law.b(), cfg.n, s).reject_at_5pct;
            }
            omni.rate = static_cast<double>(rej) / static_cast<double>(feasible);
        } else {
            omni.note = "singular covariance";
        }
        rep.omnibus.push_back(omni);

        if (marginal_ok) {
            for (int p = 0; p < 2; ++p) {
                const auto& dev = p == 0 ? rep.DA : rep.DB;
                const double scale = std::sqrt(p == 0 ? s.s11() : s.s22());
                std::vector<double> z(dev.size());
                for (std::size_t i = 0; i < dev.size(); ++i) z[i] = dev[i] / scale;
                FigureSeries fig{p == 0 ? "a" : "b", m, qq_plot_data(z), {}};
                try {
                    fig.parzen = parzen_density(z, -kFigureGridLimit, kFigureGridLimit, kFigureGridPoints);
                } catch (const DegenerateSample&) {
                    // Constant statistic: the QQ data is still useful, the curve is not.
                }
                rep.figures.push_back(std::move(fig));
            }
        }
    }
    return rep;
}

}  // namespace momest

#endif  // MOMEST_MONTECARLO_HPP
