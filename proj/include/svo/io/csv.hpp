// CSV interchange: full-precision signal files and flat result tables.
#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svo/signal.hpp"

namespace svo::io {

/// Shortest-exact decimal form of a double (17 significant digits cover
/// binary64 losslessly).
inline std::string format_double(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline std::string trim_ws(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Write a signal array: header row of sensor labels, then one row per epoch.
inline void write_signal_csv(const std::string& path, const SignalArray& signals) {
    signals.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (Eigen::Index i = 0; i < signals.sensors(); ++i) {
        if (i) out << ',';
        out << signals.sensor_labels[static_cast<std::size_t>(i)];
    }
    out << '\n';
    for (Eigen::Index t = 0; t < signals.length(); ++t) {
        for (Eigen::Index i = 0; i < signals.sensors(); ++i) {
            if (i) out << ',';
            out << format_double(signals.data(i, t));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/**
 * @brief Read a signal array written by write_signal_csv (or any CSV with a
 *        label header and numeric body).
 *
 * Ragged rows and non-numeric cells raise errors naming the offending
 * 1-based row and column.
 */
inline SignalArray read_signal_csv(const std::string& path, double sample_rate_hz = 1.0) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("'" + path + "': empty file");
    std::vector<std::string> labels;
    for (auto& f : detail::split_csv_line(line)) labels.push_back(detail::trim_ws(f));
    const std::size_t columns = labels.size();
    if (columns == 0) throw std::runtime_error("'" + path + "': no columns in header");

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (detail::trim_ws(line).empty()) continue;
        ++rows;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != columns)
            throw std::runtime_error("'" + path + "': row " + std::to_string(rows + 1) +
                                     " has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(columns));
        for (std::size_t c = 0; c < columns; ++c) {
            const std::string cell = detail::trim_ws(fields[c]);
            double v = 0.0;
            const auto* begin = cell.data();
            const auto* end = begin + cell.size();
            const auto result = std::from_chars(begin, end, v);
            if (result.ec != std::errc{} || result.ptr != end)
                throw std::runtime_error("'" + path + "': non-numeric cell at row " +
                                         std::to_string(rows + 1) + ", column " +
                                         std::to_string(c + 1) + " ('" + cell + "')");
            values.push_back(v);
        }
    }
    if (rows < 2) throw std::runtime_error("'" + path + "': need at least two data rows");

    Eigen::MatrixXd data(static_cast<Eigen::Index>(columns), static_cast<Eigen::Index>(rows));
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t c = 0; c < columns; ++c)
            data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) =
                values[t * columns + c];
    return make_signal_array(std::move(data), sample_rate_hz, std::move(labels));
}

/// Simple column-oriented numeric table with a header, written at full
/// precision. Used for the per-figure result exports.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size())
            throw std::invalid_argument("Table: row width mismatch");
        rows.push_back(std::move(row));
    }
};

inline void write_table_csv(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// Square/rectangular matrix dump with unlabeled columns.
inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace svo::io
