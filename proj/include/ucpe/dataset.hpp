#pragma once

// Project records, the delimited dataset format and descriptive statistics.
//
// File layout: header `id,e1..e8[,f1..f13],ucp,effort`, comma separated, one
// project per line. Productivity is derived (effort / ucp) and never written;
// an input `productivity` column is accepted and only checked.

#include "ucpe/error.hpp"
#include "ucpe/ucp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ucpe {

struct ProjectRecord {
    std::string id;
    EnvironmentalRatings env{};
    std::optional<TechnicalRatings> tech;
    double ucp = 0.0;
    double effort = 0.0;
    double productivity = 0.0;  // effort / ucp
};

inline ProjectRecord make_record(std::string id, const EnvironmentalRatings& env, double ucp, double effort,
                                 std::optional<TechnicalRatings> tech = std::nullopt) {
    ProjectRecord r{std::move(id), env, std::move(tech), ucp, effort, 0.0};
    r.productivity = effort / ucp;
    return r;
}

inline void validate(const ProjectRecord& r) {
    validate_ratings(r.env, "environmental");
    if (r.tech) validate_ratings(*r.tech, "technical");
    if (!(r.ucp > 0.0) || !std::isfinite(r.ucp)) throw ValidationError("project " + r.id + ": ucp must be positive");
    if (!(r.effort > 0.0) || !std::isfinite(r.effort)) {
        throw ValidationError("project " + r.id + ": effort must be positive");
    }
}

struct LoadResult {
    std::vector<ProjectRecord> records;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string where(std::size_t line, std::string_view column) {
    return "line " + std::to_string(line) + ", column '" + std::string(column) + "'";
}

inline double parse_real(std::string_view text, std::size_t line, std::string_view column) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ValidationError(where(line, column) + ": '" + std::string(text) + "' is not a number");
    }
    return v;
}

inline int parse_rating(std::string_view text, std::size_t line, std::string_view column) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ValidationError(where(line, column) + ": '" + std::string(text) + "' is not an integer rating");
    }
    if (v < 0 || v > kMaxRating) {
        throw ValidationError(where(line, column) + ": rating " + std::to_string(v) + " outside 0..5");
    }
    return v;
}

}  // namespace detail

/// Parses dataset text. Errors name the line and column.
inline LoadResult parse_dataset(std::istream& in, double productivity_tolerance = 1e-6) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw ValidationError("dataset is empty (no header)");

    const auto header = detail::split(line);
    std::map<std::string, std::size_t, std::less<>> column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name(header[i]);
        for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!column.emplace(name, i).second) throw ValidationError("duplicate column '" + name + "'");
    }
    auto require = [&](const std::string& name) {
        if (!column.count(name)) throw ValidationError("missing column '" + name + "'");
    };
    require("id");
    require("ucp");
    require("effort");
    for (std::size_t i = 1; i <= kEnvironmentalFactors; ++i) require("e" + std::to_string(i));
    std::size_t tech_columns = 0;
    for (std::size_t i = 1; i <= kTechnicalFactors; ++i) tech_columns += column.count("f" + std::to_string(i));
    if (tech_columns != 0 && tech_columns != kTechnicalFactors) {
        throw ValidationError("technical factor columns must be all of f1..f13 or none");
    }
    const bool has_productivity = column.count("productivity") != 0;
    for (const auto& [name, idx] : column) {
        bool known = name == "id" || name == "ucp" || name == "effort" || name == "productivity";
        for (std::size_t i = 1; i <= kTechnicalFactors; ++i) {
            known = known || name == "f" + std::to_string(i) || (i <= kEnvironmentalFactors && name == "e" + std::to_string(i));
        }
        if (!known) throw ValidationError("unknown column '" + name + "'");
    }

    LoadResult out;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line);
        if (cells.size() != header.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                                  " fields, found " + std::to_string(cells.size()));
        }
        ProjectRecord r;
        r.id = std::string(cells[column.at("id")]);
        if (r.id.empty()) throw ValidationError(detail::where(line_no, "id") + ": empty id");
        for (std::size_t i = 0; i < kEnvironmentalFactors; ++i) {
            const std::string name = "e" + std::to_string(i + 1);
            r.env[i] = detail::parse_rating(cells[column.at(name)], line_no, name);
        }
        if (tech_columns) {
            TechnicalRatings t{};
            for (std::size_t i = 0; i < kTechnicalFactors; ++i) {
                const std::string name = "f" + std::to_string(i + 1);
                t[i] = detail::parse_rating(cells[column.at(name)], line_no, name);
            }
            r.tech = t;
        }
        r.ucp = detail::parse_real(cells[column.at("ucp")], line_no, "ucp");
        r.effort = detail::parse_real(cells[column.at("effort")], line_no, "effort");
        if (!(r.ucp > 0.0)) throw ValidationError(detail::where(line_no, "ucp") + ": must be positive");
        if (!(r.effort > 0.0)) throw ValidationError(detail::where(line_no, "effort") + ": must be positive");
        r.productivity = r.effort / r.ucp;
        if (has_productivity) {
            const double given = detail::parse_real(cells[column.at("productivity")], line_no, "productivity");
            if (!(std::abs(given - r.productivity) <= productivity_tolerance * r.productivity)) {
                out.warnings.push_back("line " + std::to_string(line_no) + ": productivity " +
                                       detail::format_number(given) + " differs from effort/ucp = " +
                                       detail::format_number(r.productivity) + "; using effort/ucp");
            }
        }
        out.records.push_back(std::move(r));
    }
    return out;
}

inline LoadResult load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset '" + path + "'");
    return parse_dataset(in);
}

inline void write_dataset(std::ostream& out, const std::vector<ProjectRecord>& records) {
    bool tech = !records.empty() && records.front().tech.has_value();
    for (const auto& r : records) {
        if (r.tech.has_value() != tech) throw ValidationError("records disagree on technical factor columns");
        if (r.id.find_first_of(",\r\n") != std::string::npos || r.id.empty()) {
            throw ValidationError("project id '" + r.id + "' is empty or contains a separator");
        }
    }
    out << "id";
    for (std::size_t i = 1; i <= kEnvironmentalFactors; ++i) out << ",e" << i;
    if (tech) {
        for (std::size_t i = 1; i <= kTechnicalFactors; ++i) out << ",f" << i;
    }
    out << ",ucp,effort\n";
    for (const auto& r : records) {
        out << r.id;
        for (int e : r.env) out << ',' << e;
        if (tech) {
            for (int f : *r.tech) out << ',' << f;
        }
        out << ',' << detail::format_number(r.ucp) << ',' << detail::format_number(r.effort) << '\n';
    }
}

inline void save_dataset(const std::string& path, const std::vector<ProjectRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write dataset '" + path + "'");
    write_dataset(out, records);
    if (!out) throw ValidationError("failed writing dataset '" + path + "'");
}

struct VariableStats {
    double mean = 0.0;
    double sd = 0.0;                  // sample (n - 1)
    std::optional<double> skewness;   // moment based; absent when sd = 0
    std::optional<double> kurtosis;   // moment based, normal = 3
};

struct DatasetStats {
    std::size_t n = 0;
    VariableStats ucp, effort, productivity;
};

inline VariableStats describe_values(const std::vector<double>& v) {
    if (v.size() < 2) throw ValidationError("descriptive statistics need at least 2 values");
    const double n = static_cast<double>(v.size());
    VariableStats s;
    for (double x : v) s.mean += x;
    s.mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    s.sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 1e-24 * std::max(1.0, s.mean * s.mean)) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

inline DatasetStats describe(const std::vector<ProjectRecord>& records) {
    if (records.size() < 2) throw ValidationError("describe needs at least 2 projects");
    std::vector<double> u, e, p;
    for (const auto& r : records) {
        u.push_back(r.ucp);
        e.push_back(r.effort);
        p.push_back(r.productivity);
    }
    return {records.size(), describe_values(u), describe_values(e), describe_values(p)};
}

}  // namespace ucpe
