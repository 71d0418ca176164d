#pragma once

// Column-oriented result tables with CSV, JSON and aligned-text writers.
// Null cells are written as NaN in CSV/text and null in JSON.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace optomech {

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

[[nodiscard]] inline std::string format_number(double v, int precision = 12) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

[[nodiscard]] inline std::string cell_text(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return "NaN"; }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

/// RFC 4180 quoting: fields containing a comma, quote or line break are quoted
/// and embedded quotes doubled.
[[nodiscard]] inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(row[i]));
        os << '\n';
    }
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const Table& t) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            const Cell& c = row[i];
            nlohmann::ordered_json v;
            if (const auto* d = std::get_if<double>(&c))
                v = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
            else if (const auto* n = std::get_if<long long>(&c))
                v = *n;
            else if (const auto* b = std::get_if<bool>(&c))
                v = *b;
            else if (const auto* s = std::get_if<std::string>(&c))
                v = *s;
            obj[t.columns[i]] = v;
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << '\n'; }

inline void write_text(std::ostream& os, const Table& t) {
    std::vector<std::size_t> width(t.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
    for (const auto& row : t.rows) {
        auto& out = cells.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
            out.push_back(cell_text(row[i]));
            if (i < width.size()) width[i] = std::max(width[i], out.back().size());
        }
    }
    auto line = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << (i ? "  " : "") << v[i];
            if (i + 1 < v.size()) os << std::string(width[i] - v[i].size(), ' ');
        }
        os << '\n';
    };
    line(t.columns);
    for (const auto& c : cells) line(c);
}

enum class OutputFormat { text, csv, json };

inline void write_table(std::ostream& os, const Table& t, OutputFormat f) {
    switch (f) {
        case OutputFormat::text: write_text(os, t); break;
        case OutputFormat::csv: write_csv(os, t); break;
        case OutputFormat::json: write_json(os, t); break;
    }
}

}  // namespace optomech
