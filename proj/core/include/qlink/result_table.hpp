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

#pragma once

// Tabular scenario output. CSV with the fixed header
//   scenario,theta_a_deg,theta_b_deg,c13,c14,c23,c24,trials,E,sigma_E,S,sigma_S,seed
// Inapplicable cells are empty; reals carry 6 significant digits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qlink {

inline constexpr const char *kResultHeader =
    "scenario,theta_a_deg,theta_b_deg,c13,c14,c23,c24,trials,E,sigma_E,S,sigma_S,seed";

struct ResultRow {
    std::string scenario;
    std::optional<double> theta_a_deg;
    std::optional<double> theta_b_deg;
    /// (c13, c14, c23, c24)
    std::optional<std::array<std::uint64_t, 4>> counts;
    std::optional<std::uint64_t> trials;
    std::optional<double> e_value;
    std::optional<double> sigma_e;
    std::optional<double> s_value;
    std::optional<double> sigma_s;
    std::uint64_t seed = 0;

    friend bool operator==(const ResultRow &, const ResultRow &) = default;
};

struct ResultTable {
    std::vector<ResultRow> rows;

    friend bool operator==(const ResultTable &, const ResultTable &) = default;
};

/// printf("%#.6g"): six significant digits, trailing zeros kept.
std::string format_real(double value);

void write_table(const ResultTable &table, std::ostream &out);
/// Throws std::runtime_error when the destination cannot be written.
void write_table(const ResultTable &table, const std::filesystem::path &path);

/// Inverse of write_table. Throws std::runtime_error on a malformed table.
ResultTable parse_table(std::istream &in);

}  // namespace qlink
