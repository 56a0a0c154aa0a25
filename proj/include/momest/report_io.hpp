#ifndef MOMEST_REPORT_IO_HPP
#define MOMEST_REPORT_IO_HPP

// Serialization of simulation reports.
//
// CSV: header row, comma separated, '.' decimal, shortest round-trip number
// formatting, '\n' line endings. One table per file:
//
//   error_table.csv          parameter,me,mae,rmse,sd
//   ratio_table.csv          ratio,value            (only when an exact sigma is present)
//   sigma.csv                sigma_method,s11,s22,s12,det,correlation
//   pvalues.csv              sigma_method,parameter,rejection_rate
//   omnibus.csv              sigma_method,rejection_rate,note
//   qq_<p>_<method>.csv      theoretical,empirical
//   parzen_<p>_<method>.csv  x,density
//
// JSON: a single document `report.json` carrying `schema_version`; see
// `report_to_json` for the layout.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "momest/montecarlo.hpp"

namespace momest {

inline constexpr int kReportSchemaVersion = 1;

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

class CsvBuilder {
public:
    explicit CsvBuilder(std::string header) : text_(std::move(header)) { text_ += '\n'; }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((append(cells, first), first = false), ...);
        text_ += '\n';
    }

    const std::string& str() const { return text_; }

private:
    void append(double v, bool first) { sep(first), text_ += format_number(v); }
    void append(std::string_view s, bool first) { sep(first), text_ += s; }
    void append(const char* s, bool first) { sep(first), text_ += s; }
    void append(const std::string& s, bool first) { sep(first), text_ += s; }
    void sep(bool first) {
        if (!first) text_ += ',';
    }

    std::string text_;
};

}  // namespace detail

inline std::string error_table_csv(const ErrorTable& t) {
    detail::CsvBuilder csv("parameter,me,mae,rmse,sd");
    csv.row("a", t.a.me, t.a.mae, t.a.rmse, t.a.sd);
    csv.row("b", t.b.me, t.b.mae, t.b.rmse, t.b.sd);
    return csv.str();
}

inline std::string ratio_table_csv(const RatioTable& r) {
    detail::CsvBuilder csv("ratio,value");
    csv.row("Qsig-1emp", r.q1_emp);
    csv.row("Qsig-2emp", r.q2_emp);
    csv.row("Qsig-12emp", r.q12_emp);
    csv.row("Qsig-1samp", r.q1_samp);
    csv.row("Qsig-2samp", r.q2_samp);
    csv.row("Qsig-12samp", r.q12_samp);
    return csv.str();
}

inline std::string sigma_csv(const std::vector<Covariance2>& sigmas) {
    detail::CsvBuilder csv("sigma_method,s11,s22,s12,det,correlation");
    for (const auto& s : sigmas) csv.row(to_string(s.method()), s.s11(), s.s22(), s.s12(), s.det(), s.correlation());
    return csv.str();
}

inline std::string pvalues_csv(const std::vector<MarginalRates>& rates) {
    detail::CsvBuilder csv("sigma_method,parameter,rejection_rate");
    for (const auto& r : rates) {
        csv.row(to_string(r.method), "a", r.rate_a);
        csv.row(to_string(r.method), "b", r.rate_b);
    }
    return csv.str();
}

inline std::string omnibus_csv(const std::vector<OmnibusRate>& rates) {
    detail::CsvBuilder csv("sigma_method,rejection_rate,note");
    for (const auto& r : rates) {
        if (r.rate) {
            csv.row(to_string(r.method), *r.rate, r.note);
        } else {
            csv.row(to_string(r.method), "", r.note);
        }
    }
    return csv.str();
}

inline std::string pairs_csv(std::string header, const std::vector<std::pair<double, double>>& pts) {
    detail::CsvBuilder csv(std::move(header));
    for (const auto& [x, y] : pts) csv.row(x, y);
    return csv.str();
}

inline nlohmann::ordered_json influence_to_json(const QuadraticInfluence& f) {
    return {{"c1", f.c1}, {"c2", f.c2}, {"center", f.center}};
}

inline nlohmann::ordered_json covariance_to_json(const Covariance2& s) {
    return {{"method", to_string(s.method())}, {"s11", s.s11()},  {"s22", s.s22()},
            {"s12", s.s12()},                  {"det", s.det()}, {"correlation", s.correlation()}};
}

inline nlohmann::ordered_json report_to_json(const SimulationReport& r) {
    using nlohmann::ordered_json;
    const auto& c = r.config;
    ordered_json methods = ordered_json::array();
    for (auto m : c.sigma_methods) methods.push_back(to_string(m));

    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = {{"law", {{"kind", to_string(c.law.kind())}, {"a", c.law.a()}, {"b", c.law.b()}}},
                   {"n", c.n},
                   {"B", c.B},
                   {"master_seed", c.master_seed},
                   {"coefficient_mode", to_string(c.mode)},
                   {"sigma_methods", methods}};
    j["influence"] = {{"H", influence_to_json(r.influence.H)}, {"L", influence_to_json(r.influence.L)}};
    j["feasible_count"] = r.achap.size();
    j["infeasible_count"] = r.infeasible_count;

    ordered_json sig = ordered_json::array();
    for (const auto& s : r.sigmas) sig.push_back(covariance_to_json(s));
    j["sigma"] = sig;

    auto row = [](const ErrorRow& e) {
        return ordered_json{{"me", e.me}, {"mae", e.mae}, {"rmse", e.rmse}, {"sd", e.sd}};
    };
    j["error_table"] = {{"a", row(r.errors.a)}, {"b", row(r.errors.b)}};

    if (r.ratios) {
        const auto& q = *r.ratios;
        j["ratio_table"] = {{"Qsig-1emp", q.q1_emp},   {"Qsig-2emp", q.q2_emp},   {"Qsig-12emp", q.q12_emp},
                            {"Qsig-1samp", q.q1_samp}, {"Qsig-2samp", q.q2_samp}, {"Qsig-12samp", q.q12_samp}};
    } else {
        j["ratio_table"] = nullptr;
    }

    ordered_json pv = ordered_json::array();
    for (const auto& m : r.marginal) pv.push_back({{"sigma_method", to_string(m.method)}, {"a", m.rate_a}, {"b", m.rate_b}});
    j["pvalues"] = pv;

    ordered_json om = ordered_json::array();
    for (const auto& o : r.omnibus) {
        ordered_json e{{"sigma_method", to_string(o.method)}};
        e["rejection_rate"] = o.rate ? ordered_json(*o.rate) : ordered_json(nullptr);
        e["note"] = o.note;
        om.push_back(e);
    }
    j["omnibus"] = om;

    j["replications"] = {{"index", r.replication}, {"achap", r.achap}, {"bchap", r.bchap}, {"DA", r.DA},
                         {"DB", r.DB},             {"VH", r.VH},       {"VL", r.VL},       {"VHL", r.VHL}};
    return j;
}

/// Text of report.json: two-space indentation and a trailing newline.
inline std::string report_json_text(const SimulationReport& r) { return report_to_json(r).dump(2) + "\n"; }

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace detail

enum class ReportFormat { All, Csv, Json };

inline ReportFormat parse_report_format(std::string_view text) {
    if (text == "all") return ReportFormat::All;
    if (text == "csv") return ReportFormat::Csv;
    if (text == "json") return ReportFormat::Json;
    throw DomainError("unknown report format '" + std::string(text) + "' (expected all, csv or json)");
}

/// Writes the CSV tables and/or report.json into `dir` (created if missing).
/// Returns the paths written, in a fixed order.
inline std::vector<std::filesystem::path> write_report(const SimulationReport& r, const std::filesystem::path& dir,
                                                       ReportFormat format = ReportFormat::All) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error("cannot create output directory '" + dir.string() + "'");
    }
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& text) {
        detail::write_text(dir / name, text);
        written.push_back(dir / name);
    };
    if (format == ReportFormat::Json) {
        put("report.json", report_json_text(r));
        return written;
    }
    put("error_table.csv", error_table_csv(r.errors));
    if (r.ratios) put("ratio_table.csv", ratio_table_csv(*r.ratios));
    put("sigma.csv", sigma_csv(r.sigmas));
    put("pvalues.csv", pvalues_csv(r.marginal));
    put("omnibus.csv", omnibus_csv(r.omnibus));
    for (const auto& f : r.figures) {
        const std::string tag = f.parameter + "_" + std::string(to_string(f.method));
        put("qq_" + tag + ".csv", pairs_csv("theoretical,empirical", f.qq));
        if (!f.parzen.empty()) put("parzen_" + tag + ".csv", pairs_csv("x,density", f.parzen));
    }
    if (format == ReportFormat::All) put("report.json", report_json_text(r));
    return written;
}

}  // namespace momest

#endif  // MOMEST_REPORT_IO_HPP
