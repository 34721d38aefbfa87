// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlink/result_table.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace qlink {

namespace {

constexpr std::size_t kColumns = 13;

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

[[noreturn]] void malformed(std::size_t line, const std::string &what) {
    throw std::runtime_error("result table line " + std::to_string(line) + ": " + what);
}

std::optional<double> read_real(std::string_view cell, std::size_t line) {
    if (cell.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) malformed(line, "bad number '" + std::string(cell) + "'");
    return v;
}

std::optional<std::uint64_t> read_count(std::string_view cell, std::size_t line) {
    if (cell.empty()) return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) malformed(line, "bad integer '" + std::string(cell) + "'");
    return v;
}

void put(std::ostream &out, const std::optional<double> &v) {
    if (v) out << format_real(*v);
}

}  // namespace

std::string format_real(double value) {
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    char buf[64];
    int n = std::snprintf(buf, sizeof buf, "%#.6g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_table(const ResultTable &table, std::ostream &out) {
    out << kResultHeader << '\n';
    for (const auto &row : table.rows) {
        out << row.scenario << ',';
        put(out, row.theta_a_deg);
        out << ',';
        put(out, row.theta_b_deg);
        out << ',';
        for (int k = 0; k < 4; ++k) {
            if (row.counts) out << (*row.counts)[k];
            out << ',';
        }
        if (row.trials) out << *row.trials;
        out << ',';
        put(out, row.e_value);
        out << ',';
        put(out, row.sigma_e);
        out << ',';
        put(out, row.s_value);
        out << ',';
        put(out, row.sigma_s);
        out << ',' << row.seed << '\n';
    }
}

void write_table(const ResultTable &table, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    write_table(table, out);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

ResultTable parse_table(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != kResultHeader) {
        throw std::runtime_error("result table: missing or unexpected header");
    }
    ResultTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto cells = split(line);
        if (cells.size() != kColumns) {
            malformed(line_no, "expected 13 cells, got " + std::to_string(cells.size()));
        }
        ResultRow row;
        row.scenario = std::string(cells[0]);
        row.theta_a_deg = read_real(cells[1], line_no);
        row.theta_b_deg = read_real(cells[2], line_no);
        std::array<std::optional<std::uint64_t>, 4> c{read_count(cells[3], line_no), read_count(cells[4], line_no),
                                                      read_count(cells[5], line_no), read_count(cells[6], line_no)};
        if (c[0] && c[1] && c[2] && c[3]) {
            row.counts = std::array<std::uint64_t, 4>{*c[0], *c[1], *c[2], *c[3]};
        } else if (c[0] || c[1] || c[2] || c[3]) {
            malformed(line_no, "counter cells must be all present or all empty");
        }
        row.trials = read_count(cells[7], line_no);
        row.e_value = read_real(cells[8], line_no);
        row.sigma_e = read_real(cells[9], line_no);
        row.s_value = read_real(cells[10], line_no);
        row.sigma_s = read_real(cells[11], line_no);
        auto seed = read_count(cells[12], line_no);
        if (!seed) malformed(line_no, "missing seed");
        row.seed = *seed;
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace qlink
