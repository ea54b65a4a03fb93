#pragma once

// Artifact emission: CSV tables, JSON residual maps, minimal SVG line charts.
// Floats are printed with 17 significant digits so re-parsing reproduces the
// values exactly.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semilab/errors.hpp"

namespace semilab {

/// File could not be created or written.
class IoError : public Error {
public:
    using Error::Error;
};

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
    if (!out.flush()) throw IoError("write failed for " + path.string());
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (std::getline(in, line)) {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        table.rows.push_back(std::move(values));
    }
    return table;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out.flush()) throw IoError("write failed for " + path.string());
}

inline nlohmann::json csv_to_json(const CsvTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < table.columns.size() && i < row.size(); ++i)
            obj[table.columns[i]] = row[i];
        rows.push_back(std::move(obj));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Minimal SVG polyline chart: one series (x = first column, y = chosen
// column), axis labels, no external renderer. Input is a CSV already on disk
// so plotting can never perturb the numerical artifacts.

inline void write_svg_chart(const std::filesystem::path& csv_path,
                            const std::filesystem::path& svg_path,
                            std::size_t x_col, std::size_t y_col) {
    const CsvTable table = read_csv(csv_path);
    if (table.columns.size() <= std::max(x_col, y_col))
        throw IoError("csv " + csv_path.string() + " lacks the plotted columns");
    const int w = 640, h = 400, ml = 70, mr = 20, mt = 30, mb = 50;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const auto& row : table.rows) {
        const double x = row[x_col], y = row[y_col];
        if (first) {
            x_lo = x_hi = x;
            y_lo = y_hi = y;
            first = false;
        } else {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };

    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + svg_path.string() + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
        << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
        << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", x_lo);
    out << "<text x=\"" << ml << "\" y=\"" << h - mb + 20 << "\" font-size=\"12\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof buf, "%g", x_hi);
    out << "<text x=\"" << w - mr - 40 << "\" y=\"" << h - mb + 20
        << "\" font-size=\"12\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%g", y_lo);
    out << "<text x=\"5\" y=\"" << h - mb << "\" font-size=\"12\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%g", y_hi);
    out << "<text x=\"5\" y=\"" << mt + 5 << "\" font-size=\"12\">" << buf << "</text>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"" << h - 10
        << "\" font-size=\"13\" text-anchor=\"middle\">" << table.columns[x_col]
        << "</text>\n"
        << "<text x=\"15\" y=\"" << mt - 10 << "\" font-size=\"13\">"
        << table.columns[y_col] << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    for (const auto& row : table.rows)
        out << px(row[x_col]) << ',' << py(row[y_col]) << ' ';
    out << "\"/>\n</svg>\n";
    if (!out.flush()) throw IoError("write failed for " + svg_path.string());
}

} // namespace semilab
