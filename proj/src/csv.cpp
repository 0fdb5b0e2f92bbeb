#include "tsb/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tsb {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_number(const std::string& raw, double& out) {
    const std::string s = trimmed(raw);
    if (s.empty()) return false;
    try {
        std::size_t consumed = 0;
        out = std::stod(s, &consumed);
        if (consumed != s.size()) return false;
    } catch (const std::exception&) {
        return false;
    }
    return std::isfinite(out);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    RawTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    table.header = split_line(line);
    for (auto& h : table.header) h = trimmed(h);
    if (!table.header.empty() && table.header[0].size() >= 3 &&
        static_cast<unsigned char>(table.header[0][0]) == 0xEF) {
        table.header[0].erase(0, 3); // UTF-8 BOM
    }

    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = split_line(line);
        if (fields.size() != table.header.size()) {
            throw DataError("row " + std::to_string(table.rows.size() + 1) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

std::size_t find_column(const RawTable& table, const std::string& name) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == name) return j;
    }
    throw DataError("missing column '" + name + "'");
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::optional<std::string>& positive_label) {
    const RawTable table = read_table(path);
    if (table.rows.size() < 2) throw DataError("fewer than 2 rows in " + path);

    std::size_t label_idx = 0;
    try {
        label_idx = find_column(table, label_column);
    } catch (const DataError&) {
        throw DataError("missing label column '" + label_column + "' in " + path);
    }
    if (table.header.size() < 2) throw DataError("no feature columns in " + path);

    std::vector<std::string> names;
    std::vector<std::size_t> feature_cols;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j == label_idx) continue;
        names.push_back(table.header[j]);
        feature_cols.push_back(j);
    }

    const std::size_t n = table.rows.size();
    std::vector<double> x;
    x.reserve(n * feature_cols.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t out_col = 0;
        for (std::size_t j : feature_cols) {
            ++out_col;
            const std::string& cell = table.rows[i][j];
            if (trimmed(cell).empty()) {
                throw DataError("missing value at row " + std::to_string(i + 1) + ", column " +
                                std::to_string(out_col) + " (" + names[out_col - 1] + ")");
            }
            double v = 0.0;
            if (!parse_number(cell, v)) {
                throw DataError("non-numeric value '" + trimmed(cell) + "' at row " +
                                std::to_string(i + 1) + ", column " + std::to_string(out_col) +
                                " (" + names[out_col - 1] + ")");
            }
            x.push_back(v);
        }
    }

    std::vector<double> y(n);
    LabelKind kind = LabelKind::Continuous;
    if (positive_label) {
        std::set<std::string> distinct;
        for (std::size_t i = 0; i < n; ++i) distinct.insert(trimmed(table.rows[i][label_idx]));
        if (distinct.size() != 2) {
            throw DataError("positive-label mapping needs exactly 2 distinct label values, found " +
                            std::to_string(distinct.size()));
        }
        if (distinct.count(*positive_label) == 0) {
            throw DataError("positive label '" + *positive_label + "' does not occur in the data");
        }
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = trimmed(table.rows[i][label_idx]) == *positive_label ? 1.0 : -1.0;
        }
        kind = LabelKind::Binary;
    } else {
        std::set<double> distinct;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& cell = table.rows[i][label_idx];
            if (trimmed(cell).empty()) {
                throw DataError("missing label at row " + std::to_string(i + 1));
            }
            if (!parse_number(cell, y[i])) {
                throw DataError("non-numeric label '" + trimmed(cell) + "' at row " +
                                std::to_string(i + 1));
            }
            distinct.insert(y[i]);
        }
        const std::set<double> zero_one{0.0, 1.0};
        const std::set<double> pm_one{-1.0, 1.0};
        if (distinct == zero_one) {
            for (double& v : y) v = (v == 1.0) ? 1.0 : -1.0;
            kind = LabelKind::Binary;
        } else if (distinct == pm_one) {
            kind = LabelKind::Binary;
        }
    }

    return Dataset(std::move(x), feature_cols.size(), std::move(y), std::move(names), kind);
}

std::vector<std::vector<double>> load_feature_rows(
    const std::string& path, const std::vector<std::string>& feature_names) {
    const RawTable table = read_table(path);

    std::vector<std::size_t> cols;
    cols.reserve(feature_names.size());
    for (const auto& name : feature_names) cols.push_back(find_column(table, name));

    std::vector<std::vector<double>> rows;
    rows.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        std::vector<double> row;
        row.reserve(cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            double v = 0.0;
            if (!parse_number(table.rows[i][cols[c]], v)) {
                throw DataError("non-numeric value '" + trimmed(table.rows[i][cols[c]]) +
                                "' at row " + std::to_string(i + 1) + ", column " +
                                std::to_string(c + 1) + " (" + feature_names[c] + ")");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_dataset_csv(const Dataset& data, const std::string& path,
                       const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);

    for (const auto& name : data.feature_names()) out << name << ',';
    out << label_column << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            out << format_double(data.at(i, j)) << ',';
        }
        out << format_double(data.label(i)) << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace tsb
