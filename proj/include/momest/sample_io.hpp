#ifndef MOMEST_SAMPLE_IO_HPP
#define MOMEST_SAMPLE_IO_HPP

// Sample ingestion. Plain format: one decimal per line, blank lines ignored,
// '#' starts a comment (whole line or trailing). CSV format: the first
// non-comment line is a header and `column` selects the field by name.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "momest/errors.hpp"

namespace momest {

/// Malformed input; line() is 1-based, 0 when the problem is not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

inline std::string_view strip_comment(std::string_view s) {
    const auto hash = s.find('#');
    return trim(hash == std::string_view::npos ? s : s.substr(0, hash));
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

inline double parse_real(std::string_view text, std::size_t line) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ParseError("cannot parse '" + std::string(text) + "' as a number", line);
    }
    if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(text) + "'", line);
    return v;
}

}  // namespace detail

inline std::vector<double> read_sample(std::istream& in, const std::optional<std::string>& column = std::nullopt) {
    std::vector<double> values;
    std::optional<std::size_t> field;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = detail::strip_comment(raw);
        if (line == 1 && text.substr(0, 3) == "\xEF\xBB\xBF") text = detail::trim(text.substr(3));
        if (text.empty()) continue;
        if (!column) {
            values.push_back(detail::parse_real(text, line));
            continue;
        }
        const auto cells = detail::split_commas(text);
        if (!field) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == *column) {
                    field = i;
                    break;
                }
            }
            if (!field) throw ParseError("column '" + *column + "' not found in header", line);
            continue;
        }
        if (*field >= cells.size()) throw ParseError("missing field '" + *column + "'", line);
        values.push_back(detail::parse_real(cells[*field], line));
    }
    if (in.bad()) throw ParseError("read failure", line);
    if (values.empty()) throw ParseError("sample is empty", 0);
    return values;
}

inline std::vector<double> read_sample_file(const std::string& path,
                                            const std::optional<std::string>& column = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return read_sample(in, column);
}

/// Inline list such as "1.5,2,3" or "1.5 2 3".
inline std::vector<double> parse_sample_list(std::string_view text) {
    std::string normalized(text);
    for (char& c : normalized)
        if (c == ',' || c == ';') c = '\n';
    std::istringstream in(normalized);
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        try {
            values.push_back(detail::parse_real(token, 0));
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (item " + std::to_string(values.size() + 1) + ")", 0);
        }
    }
    if (values.empty()) throw ParseError("sample is empty", 0);
    return values;
}

}  // namespace momest

#endif  // MOMEST_SAMPLE_IO_HPP
