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

// Experiment configuration: a line-oriented `key = value` file with `#`
// comments. Omitted keys keep the defaults below; unknown or repeated keys
// are rejected with the offending line number.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qlink/analysis.hpp"
#include "qlink/detection.hpp"
#include "qlink/montecarlo.hpp"
#include "qlink/quantum_model.hpp"

namespace qlink {

enum class Scenario { kFringe, kCorrelation, kChsh, kOracle };

std::string_view scenario_name(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view name);

class ConfigError : public std::runtime_error {
   public:
    ConfigError(const std::string &message, int line = 0, std::string key = {});

    /// 1-based line number, or 0 when the error is not tied to a line.
    int line() const { return line_; }
    const std::string &key() const { return key_; }

   private:
    int line_;
    std::string key_;
};

struct ExperimentConfig {
    SourceParams source;
    ChannelParams channel;
    StorageParams storage;
    DetectorBank bank{{0.6, 0.6, 0.6, 0.6}, {0.0, 0.0, 0.0, 0.0}};
    /// Site A holds its qubit this long before read-out. Recorded only; no
    /// field is applied at Site A.
    double storage_time_a_s = 500e-9;
    /// Static phase added to the Larmor phase, radians. Unset means the
    /// offset nulls the Larmor phase so that phi_f = 0.
    std::optional<double> phase_offset;

    Scenario scenario = Scenario::kChsh;
    /// Sweep for `fringe` and `correlation`.
    std::vector<double> theta_a_list{0, 15, 30, 45, 60, 75, 90, 105, 120, 135, 150, 165};
    /// Fixed Site B setting for `fringe`.
    double theta_b = 135.0;
    /// Site B settings for `correlation`.
    std::vector<double> theta_b_list{0, 45, 90, 135};
    ChshAngles chsh_angles;

    /// Trials per point; overrides `duration_s` when set.
    std::optional<std::uint64_t> trials;
    /// Acquisition time per point; defaults to 900 s (fringe, correlation)
    /// or 7200 s (chsh).
    std::optional<double> duration_s;

    std::uint64_t seed = 1;
    unsigned workers = 1;
    SamplingMode sampling = SamplingMode::kFull;
    /// Four-run symmetrization for `correlation` (always on for `chsh`).
    bool symmetrize = true;
    /// Uniform visibility applied by the `oracle` scenario.
    double visibility = 1.0;
    /// When set, the uniform dark-click probability is calibrated so that the
    /// expected symmetrized S at `chsh_angles` equals this value.
    std::optional<double> background_target_s;

    std::string output_path;

    /// Trials acquired per measurement point (all four runs of a symmetrized
    /// point together).
    std::uint64_t trials_per_point() const;

    /// Range-checks every field; throws ConfigError.
    void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

}  // namespace qlink
