// momest: command-line front end for the momest library.
//
// Exit codes:
//   0  success / hypothesis not rejected
//   1  computation error (moment does not exist, quadrature failure, ...)
//   2  input error (bad flags or parameters, unreadable or degenerate sample)
//   3  omnibus test rejects at the 5% level
//   4  covariance matrix singular

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "momest/momest.hpp"

namespace {

using nlohmann::ordered_json;
using namespace momest;

enum ExitCode { kOk = 0, kComputation = 1, kInput = 2, kReject = 3, kSingular = 4 };

constexpr const char* kOutputEnv = "MOMEST_OUTPUT_DIR";

struct LawArgs {
    std::string kind;
    double a = 0.0;
    double b = 0.0;
};

struct QuadArgs {
    std::size_t panels = QuadratureConfig{}.panels;
    double tol = QuadratureConfig{}.tol;
    bool script = false;

    QuadratureConfig config() const {
        QuadratureConfig c = script ? QuadratureConfig::script_mode() : QuadratureConfig{};
        if (!script) {
            c.panels = panels;
            c.tol = tol;
        }
        c.validate();
        return c;
    }
};

struct SampleArgs {
    std::string input;
    std::string inline_list;
    std::string column;

    std::vector<double> load() const {
        if (!inline_list.empty()) return parse_sample_list(inline_list);
        std::optional<std::string> col;
        if (!column.empty()) col = column;
        if (input == "-") return read_sample(std::cin, col);
        return read_sample_file(input, col);
    }
};

void add_law(CLI::App* cmd, LawArgs& law, const char* a_name, const char* b_name) {
    cmd->add_option("law", law.kind, "gamma, beta, uniform or fisher")->required();
    cmd->add_option(a_name, law.a, "first parameter")->required();
    cmd->add_option(b_name, law.b, "second parameter")->required();
}

void add_quadrature(CLI::App* cmd, QuadArgs& q) {
    cmd->add_option("--panels", q.panels, "initial trapezoid panel count")->capture_default_str();
    cmd->add_option("--tol", q.tol, "relative tolerance for panel doubling")->capture_default_str();
    cmd->add_flag("--script-quadrature", q.script, "use the coarse settings (100 panels, tol 1e-4)");
}

void add_sample(CLI::App* cmd, SampleArgs& s) {
    auto* in = cmd->add_option("--input,-i", s.input, "sample file, one value per line ('-' for stdin)");
    auto* list = cmd->add_option("--sample", s.inline_list, "inline sample, comma separated");
    in->excludes(list);
    cmd->add_option("--column", s.column, "read a CSV file and take this column")->needs(in);
    cmd->callback([in, list] {
        if (in->count() == 0 && list->count() == 0) throw CLI::RequiredError("--input or --sample");
    });
}

std::string fmt(double v) { return format_number(v); }

ordered_json influence_json(const QuadraticInfluence& f) {
    return {{"c1", f.c1}, {"c2", f.c2}, {"center", f.center}};
}

ordered_json sigma_json(const Covariance2& s) {
    return {{"method", to_string(s.method())}, {"s11", s.s11()}, {"s22", s.s22()},
            {"s12", s.s12()}, {"det", s.det()}, {"correlation", s.correlation()}};
}

ordered_json report_json(const std::string& name, const TestReport& r) {
    ordered_json j{{"test", name}, {"statistic", r.statistic}, {"df", r.df}, {"p_value", r.p_value},
                   {"reject_at_5pct", r.reject_at_5pct}};
    j["sigma_method"] = r.sigma_method ? ordered_json(to_string(*r.sigma_method)) : ordered_json(nullptr);
    return j;
}

void print_sigma_rows(const std::vector<Covariance2>& sigmas) {
    std::cout << "sigma method         s11  s22  s12  det  correlation\n";
    for (const auto& s : sigmas) {
        std::cout << "  " << to_string(s.method()) << "  " << fmt(s.s11()) << "  " << fmt(s.s22()) << "  "
                  << fmt(s.s12()) << "  " << fmt(s.det()) << "  " << fmt(s.correlation()) << '\n';
    }
}

// ---------------------------------------------------------------- coeffs

struct CoeffsArgs {
    LawArgs law;
    std::string mode = "canonical";
    std::string format = "text";
    QuadArgs quad;
};

int cmd_coeffs(const CoeffsArgs& args) {
    const LawSpec law(parse_law_kind(args.law.kind), args.law.a, args.law.b);
    const CoefficientMode mode = parse_coefficient_mode(args.mode);
    const QuadratureConfig qc = args.quad.config();

    const InfluencePair inf = influence_pair(law, mode);
    const std::vector<Covariance2> sigmas{covariance_exact_moments(law, inf),
                                          covariance_exact_quadrature(law, inf, qc)};
    std::optional<double> canonical_corr;
    if (mode == CoefficientMode::PaperVerbatim) {
        canonical_corr = covariance_exact_moments(law, influence_pair(law, CoefficientMode::Canonical)).correlation();
    }

    if (args.format == "json") {
        ordered_json j;
        j["law"] = {{"kind", to_string(law.kind())}, {"a", law.a()}, {"b", law.b()}};
        j["mode"] = to_string(mode);
        j["H"] = influence_json(inf.H);
        j["L"] = influence_json(inf.L);
        ordered_json arr = ordered_json::array();
        for (const auto& s : sigmas) arr.push_back(sigma_json(s));
        j["sigma"] = arr;
        if (canonical_corr) j["canonical_correlation"] = *canonical_corr;
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
    std::cout << "law   " << law.name() << "\nmode  " << to_string(mode) << '\n';
    std::cout << "H     c1=" << fmt(inf.H.c1) << " c2=" << fmt(inf.H.c2) << " center=" << fmt(inf.H.center) << '\n';
    std::cout << "L     c1=" << fmt(inf.L.c1) << " c2=" << fmt(inf.L.c2) << " center=" << fmt(inf.L.center) << '\n';
    print_sigma_rows(sigmas);
    if (canonical_corr) std::cout << "canonical correlation (for comparison)  " << fmt(*canonical_corr) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string law;
    SampleArgs sample;
    std::string format = "text";
};

int cmd_estimate(const EstimateArgs& args) {
    const LawKind kind = parse_law_kind(args.law);
    const std::vector<double> xs = args.sample.load();
    const EmpiricalMoments em = empirical_moments(xs);
    const ParamEstimate est = estimate(kind, em);

    if (args.format == "json") {
        ordered_json j;
        j["law"] = to_string(kind);
        j["n"] = em.n;
        j["moments"] = {{"mean", em.mean}, {"mean_sq", em.mean_sq}, {"var_unbiased", em.var_unbiased},
                        {"var_biased", em.var_biased}};
        j["a_hat"] = est.a_hat;
        j["b_hat"] = est.b_hat;
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
    std::cout << "law           " << to_string(kind) << "\nn             " << em.n << "\nmean          "
              << fmt(em.mean) << "\nmean_sq       " << fmt(em.mean_sq) << "\nvar_unbiased  " << fmt(em.var_unbiased)
              << "\nvar_biased    " << fmt(em.var_biased) << "\na_hat         " << fmt(est.a_hat)
              << "\nb_hat         " << fmt(est.b_hat) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- test

struct TestArgs {
    LawArgs law;
    SampleArgs sample;
    std::string sigma = "exact";
    std::string mode = "canonical";
    std::string format = "text";
    QuadArgs quad;
};

int cmd_test(const TestArgs& args) {
    const LawSpec h0(parse_law_kind(args.law.kind), args.law.a, args.law.b);
    const CoefficientMode mode = parse_coefficient_mode(args.mode);
    const SigmaMethod method = parse_sigma_method(args.sigma);
    if (method == SigmaMethod::Replication) {
        throw CLI::ValidationError("--sigma", "replication covariance needs a simulation; use exact, quadrature or plugin");
    }
    const std::vector<double> xs = args.sample.load();
    const ParamEstimate est = estimate(h0.kind(), xs);
    const InfluencePair inf = influence_pair(h0, mode);

    std::optional<Covariance2> sigma;
    switch (method) {
        case SigmaMethod::ExactMoments: sigma = covariance_exact_moments(h0, inf); break;
        case SigmaMethod::ExactQuadrature: sigma = covariance_exact_quadrature(h0, inf, args.quad.config()); break;
        default: sigma = covariance_plugin(xs, inf.H, inf.L); break;
    }
    const TestReport ta = marginal_test(est.a_hat, h0.a(), sigma->s11(), xs.size(), method);
    const TestReport tb = marginal_test(est.b_hat, h0.b(), sigma->s22(), xs.size(), method);
    const TestReport omni = omnibus_test(est.a_hat, est.b_hat, h0.a(), h0.b(), xs.size(), *sigma);

    if (args.format == "json") {
        ordered_json j;
        j["law"] = {{"kind", to_string(h0.kind())}, {"a0", h0.a()}, {"b0", h0.b()}};
        j["n"] = xs.size();
        j["a_hat"] = est.a_hat;
        j["b_hat"] = est.b_hat;
        j["sigma"] = sigma_json(*sigma);
        j["tests"] = ordered_json::array({report_json("marginal_a", ta), report_json("marginal_b", tb),
                                          report_json("omnibus", omni)});
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "H0      " << h0.name() << "  n=" << xs.size() << "  sigma=" << to_string(method) << '\n';
        std::cout << "a_hat   " << fmt(est.a_hat) << "\nb_hat   " << fmt(est.b_hat) << '\n';
        auto line = [](const char* name, const TestReport& r) {
            std::cout << name << "  stat=" << fmt(r.statistic) << "  df=" << r.df << "  p=" << fmt(r.p_value) << "  "
                      << (r.reject_at_5pct ? "REJECT" : "accept") << '\n';
        };
        line("marginal a", ta);
        line("marginal b", tb);
        line("omnibus   ", omni);
    }
    return omni.reject_at_5pct ? kReject : kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    LawArgs law;
    std::vector<std::size_t> n{50};
    std::size_t B = 1000;
    std::uint64_t seed = 0;
    std::string mode = "canonical";
    std::vector<std::string> sigma{"exact", "plugin", "replication"};
    unsigned workers = 1;
    std::string out;
    std::string format = "all";
    QuadArgs quad;
};

void print_summary(const SimulationReport& r, const std::filesystem::path& dir) {
    const auto& c = r.config;
    std::cout << "== " << c.law.name() << "  n=" << c.n << "  B=" << c.B << "  seed=" << c.master_seed
              << "  mode=" << to_string(c.mode) << '\n';
    std::cout << "feasible " << r.achap.size() << "  infeasible " << r.infeasible_count << '\n';
    std::cout << "errors      me  mae  rmse  sd\n";
    std::cout << "  a  " << fmt(r.errors.a.me) << "  " << fmt(r.errors.a.mae) << "  " << fmt(r.errors.a.rmse) << "  "
              << fmt(r.errors.a.sd) << '\n';
    std::cout << "  b  " << fmt(r.errors.b.me) << "  " << fmt(r.errors.b.mae) << "  " << fmt(r.errors.b.rmse) << "  "
              << fmt(r.errors.b.sd) << '\n';
    print_sigma_rows(r.sigmas);
    std::cout << "rejection at 5%   marginal a  marginal b  omnibus\n";
    for (const auto& o : r.omnibus) {
        std::cout << "  " << to_string(o.method);
        const MarginalRates* m = nullptr;
        for (const auto& x : r.marginal)
            if (x.method == o.method) m = &x;
        if (m) {
            std::cout << "  " << fmt(m->rate_a) << "  " << fmt(m->rate_b);
        } else {
            std::cout << "  -  -";
        }
        std::cout << "  " << (o.rate ? fmt(*o.rate) : o.note) << '\n';
    }
    std::cout << "written to " << dir.string() << '\n';
}

int cmd_simulate(const SimulateArgs& args) {
    const LawSpec law(parse_law_kind(args.law.kind), args.law.a, args.law.b);
    const ReportFormat format = parse_report_format(args.format);

    std::vector<SigmaMethod> methods;
    for (const auto& s : args.sigma) {
        const SigmaMethod m = parse_sigma_method(s);
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    }

    std::filesystem::path root = args.out;
    if (root.empty()) {
        const char* env = std::getenv(kOutputEnv);
        root = env && *env ? env : "momest_out";
    }

    for (std::size_t n : args.n) {
        SimulationConfig cfg;
        cfg.law = law;
        cfg.n = n;
        cfg.B = args.B;
        cfg.master_seed = args.seed;
        cfg.mode = parse_coefficient_mode(args.mode);
        cfg.sigma_methods = methods;
        cfg.quadrature = args.quad.config();
        cfg.workers = args.workers;
        const SimulationReport rep = run_simulation(cfg);
        const auto dir = args.n.size() > 1 ? root / ("n_" + std::to_string(n)) : root;
        write_report(rep, dir, format);
        print_summary(rep, dir);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Method-of-moments estimation, asymptotic covariance and omnibus tests"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 ok/accept, 1 computation error, 2 input error, 3 omnibus rejects at 5%, 4 singular covariance.\n"
        "simulate writes to --out, else $MOMEST_OUTPUT_DIR, else ./momest_out.");

    CoeffsArgs coeffs;
    auto* c = app.add_subcommand("coeffs", "influence coefficients and exact covariance for a law");
    add_law(c, coeffs.law, "a", "b");
    c->add_option("--mode", coeffs.mode, "canonical or verbatim")->check(CLI::IsMember({"canonical", "verbatim"}));
    c->add_option("--format", coeffs.format)->check(CLI::IsMember({"text", "json"}));
    add_quadrature(c, coeffs.quad);

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "method-of-moments estimates from a sample");
    e->add_option("law", est.law, "gamma, beta, uniform or fisher")->required();
    add_sample(e, est.sample);
    e->add_option("--format", est.format)->check(CLI::IsMember({"text", "json"}));

    TestArgs test;
    auto* t = app.add_subcommand("test", "marginal and omnibus tests of H0: (a, b) = (a0, b0)");
    add_law(t, test.law, "a0", "b0");
    add_sample(t, test.sample);
    t->add_option("--sigma", test.sigma, "exact, quadrature or plugin")
        ->check(CLI::IsMember({"exact", "exact_moments", "quadrature", "exact_quadrature", "plugin"}));
    t->add_option("--mode", test.mode, "canonical or verbatim")->check(CLI::IsMember({"canonical", "verbatim"}));
    t->add_option("--format", test.format)->check(CLI::IsMember({"text", "json"}));
    add_quadrature(t, test.quad);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Monte-Carlo replications and report tables");
    add_law(s, sim.law, "a", "b");
    s->add_option("--n", sim.n, "sample size(s), comma separated")->delimiter(',')->check(CLI::PositiveNumber);
    s->add_option("--B", sim.B, "number of replications")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--seed", sim.seed, "master seed")->required();
    s->add_option("--mode", sim.mode, "canonical or verbatim")->check(CLI::IsMember({"canonical", "verbatim"}));
    s->add_option("--sigma", sim.sigma, "covariance methods: exact, quadrature, plugin, replication")
        ->delimiter(',');
    s->add_option("--workers", sim.workers, "worker threads (output does not depend on this)")
        ->check(CLI::PositiveNumber);
    s->add_option("--out,-o", sim.out, "output directory");
    s->add_option("--format", sim.format, "files to write: all, csv or json")
        ->check(CLI::IsMember({"all", "csv", "json"}));
    add_quadrature(s, sim.quad);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kInput;
    }

    try {
        if (*c) return cmd_coeffs(coeffs);
        if (*e) return cmd_estimate(est);
        if (*t) return cmd_test(test);
        return cmd_simulate(sim);
    } catch (const CLI::Error& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kInput;
    } catch (const ParseError& ex) {
        std::cerr << "input error: " << ex.what() << '\n';
        return kInput;
    } catch (const DegenerateSample& ex) {
        std::cerr << "degenerate sample: " << ex.what() << '\n';
        return kInput;
    } catch (const InfeasibleMoment& ex) {
        std::cerr << "infeasible sample: " << ex.what() << '\n';
        return kInput;
    } catch (const InsufficientData& ex) {
        std::cerr << "insufficient data: " << ex.what() << '\n';
        return kInput;
    } catch (const DomainError& ex) {
        std::cerr << "invalid argument: " << ex.what() << '\n';
        return kInput;
    } catch (const SingularCovariance& ex) {
        std::cerr << "singular covariance: " << ex.what() << '\n';
        return kSingular;
    } catch (const momest::Error& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kComputation;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kComputation;
    }
}
