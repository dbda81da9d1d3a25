#pragma once

// Experiment results and their on-disk form: a CSV of checked statistics,
// plot-ready CSV tables, and a JSON summary. Formatting is locale-free and
// fixed, so equal results give byte-identical files.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "geoflow/curve.hpp"
#include "geoflow/errors.hpp"
#include "geoflow/lattice.hpp"

namespace geoflow {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// One checked statistic. `pass` is derived from value, bound and comparison.
struct ReportRow {
    enum class Compare { AtMost, Below, AtLeast, Above, Equal };

    std::string experiment;
    std::string parameter; ///< e.g. "t=12"
    std::string statistic;
    double value = 0;
    double error = 0; ///< one standard error, 0 for exact quantities
    Compare compare = Compare::AtMost;
    double bound = 0;
    bool pass = false;

    static ReportRow check(std::string experiment, std::string parameter, std::string statistic, double value,
                           double error, Compare cmp, double bound) {
        ReportRow r{std::move(experiment), std::move(parameter), std::move(statistic), value, error, cmp, bound, false};
        switch (cmp) {
        case Compare::AtMost: r.pass = value <= bound; break;
        case Compare::Below: r.pass = value < bound; break;
        case Compare::AtLeast: r.pass = value >= bound; break;
        case Compare::Above: r.pass = value > bound; break;
        case Compare::Equal: r.pass = value == bound; break;
        }
        return r;
    }
};

inline const char* to_string(ReportRow::Compare c) {
    switch (c) {
    case ReportRow::Compare::AtMost: return "<=";
    case ReportRow::Compare::Below: return "<";
    case ReportRow::Compare::AtLeast: return ">=";
    case ReportRow::Compare::Above: return ">";
    case ReportRow::Compare::Equal: return "==";
    }
    return "?";
}

/// Plot-ready table: header plus rows of numbers or labels.
struct Table {
    using Cell = std::variant<double, std::int64_t, std::string>;
    std::string name; ///< file stem
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != header.size()) throw InvalidInput("table '" + name + "': row width mismatch");
        rows.push_back(std::move(row));
    }
};

struct ExperimentResult {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
    std::vector<Table> tables;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();

    bool pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }

    ReportRow& check(std::string parameter, std::string statistic, double value, double error,
                     ReportRow::Compare cmp, double bound) {
        rows.push_back(ReportRow::check(experiment, std::move(parameter), std::move(statistic), value, error, cmp, bound));
        return rows.back();
    }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

inline std::string csv_cell(const Table::Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return csv_field(std::get<std::string>(c));
}

inline std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    return f;
}

} // namespace detail

inline void write_table(const Table& t, std::ostream& out) {
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << detail::csv_field(t.header[i]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_cell(row[i]);
        out << '\n';
    }
}

inline void write_report_csv(const ExperimentResult& r, std::ostream& out) {
    out << "experiment,parameter,statistic,value,error,compare,bound,pass\n";
    for (const auto& row : r.rows) {
        out << detail::csv_field(row.experiment) << ',' << detail::csv_field(row.parameter) << ','
            << detail::csv_field(row.statistic) << ',' << format_double(row.value) << ',' << format_double(row.error)
            << ',' << to_string(row.compare) << ',' << format_double(row.bound) << ',' << (row.pass ? "true" : "false")
            << '\n';
    }
}

inline nlohmann::ordered_json summary_json(const ExperimentResult& r) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["seed"] = r.seed;
    j["pass"] = r.pass();
    auto checks = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        checks.push_back({{"parameter", row.parameter},
                          {"statistic", row.statistic},
                          {"value", row.value},
                          {"error", row.error},
                          {"compare", to_string(row.compare)},
                          {"bound", row.bound},
                          {"pass", row.pass}});
    }
    j["checks"] = std::move(checks);
    j["details"] = r.details;
    return j;
}

/// Writes <experiment>_report.csv, <experiment>_summary.json and one
/// <experiment>_<table>.csv per table into `dir`. Returns the written paths.
inline std::vector<std::filesystem::path> write_result(const ExperimentResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    {
        const auto p = dir / (r.experiment + "_report.csv");
        auto f = detail::open_output(p);
        write_report_csv(r, f);
        written.push_back(p);
    }
    {
        const auto p = dir / (r.experiment + "_summary.json");
        auto f = detail::open_output(p);
        f << summary_json(r).dump(2) << '\n';
        written.push_back(p);
    }
    for (const auto& t : r.tables) {
        const auto p = dir / (r.experiment + "_" + t.name + ".csv");
        auto f = detail::open_output(p);
        write_table(t, f);
        written.push_back(p);
    }
    return written;
}

// ---------------------------------------------------------------------------
// Point clouds. H^2 rows: x,y,height,theta,weight with y the vertical
// coordinate (equal to height). H^3 rows: x,y,x2,height,dir_x,dir_y,dir_h,weight
// with x = Re z, x2 = Im z.

namespace detail {

inline std::vector<std::string> point_header(LatticeTag lattice) {
    if (lattice == LatticeTag::Modular) return {"x", "y", "height", "theta", "weight"};
    return {"x", "y", "x2", "height", "dir_x", "dir_y", "dir_h", "weight"};
}

inline std::vector<Table::Cell> point_cells(const QuotientPoint& q, double w) {
    const auto& b = q.frame.base;
    const auto& d = q.frame.direction.v;
    if (q.lattice == LatticeTag::Modular)
        return {b.horizontal.real(), b.height, b.height, q.frame.direction.angle(), w};
    return {b.horizontal.real(), b.height, b.horizontal.imag(), b.height, d[0], d[1], d[2], w};
}

} // namespace detail

inline Table samples_table(const HaarSampleSet& h, std::string name = "haar_samples") {
    Table t{std::move(name), detail::point_header(h.lattice), {}};
    const double w = h.weight();
    for (const auto& q : h.points) t.add(detail::point_cells(q, w));
    return t;
}

inline Table samples_table(const EmpiricalMeasure& m, std::string name = "samples") {
    auto header = detail::point_header(m.lattice);
    header.insert(header.end(), {"s", "t", "curve_id"});
    Table t{std::move(name), std::move(header), {}};
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
        auto row = detail::point_cells(m.samples[i], m.weights[i]);
        row.insert(row.end(), {m.parameters[i], m.flow_time, m.curve_id});
        t.add(std::move(row));
    }
    return t;
}

inline nlohmann::ordered_json to_json(const DiscrepancyReport& r) {
    nlohmann::ordered_json j;
    j["max_defect"] = r.max_defect;
    j["error_bar"] = r.error_bar;
    auto obs = nlohmann::ordered_json::array();
    for (const auto& c : r.per_observable)
        obs.push_back({{"name", c.name}, {"empirical", c.empirical}, {"reference", c.reference}, {"error_bar", c.error_bar}});
    j["observables"] = std::move(obs);
    return j;
}

} // namespace geoflow
