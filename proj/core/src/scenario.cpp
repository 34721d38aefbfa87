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

#include "qlink/scenario.hpp"

#include <algorithm>

namespace qlink {

namespace {

ResultRow counts_row(Scenario scenario, const AnalyzerSetting &setting, const CoincidenceCounts &counts, std::uint64_t seed) {
    ResultRow row;
    row.scenario = std::string(scenario_name(scenario));
    row.theta_a_deg = setting.theta_a_deg;
    row.theta_b_deg = setting.theta_b_deg;
    row.counts = std::array<std::uint64_t, 4>{counts.at(1, 3), counts.at(1, 4), counts.at(2, 3), counts.at(2, 4)};
    row.trials = counts.trials;
    row.seed = seed;
    if (counts.total() > 0) {
        CorrelationEstimate est = estimate_E(counts, setting);
        row.e_value = est.e_value;
        row.sigma_e = est.sigma;
    }
    return row;
}

ResultRow bell_row(Scenario scenario, const BellResult &bell, std::optional<std::uint64_t> trials, std::uint64_t seed, bool with_sigma) {
    ResultRow row;
    row.scenario = std::string(scenario_name(scenario));
    row.trials = trials;
    row.s_value = bell.s_value;
    if (with_sigma) row.sigma_s = bell.sigma;
    row.seed = seed;
    return row;
}

}  // namespace

EffectiveTwoPhotonState effective_state(const ExperimentConfig &config) {
    StorageParams storage = config.storage;
    storage.phase_offset = config.phase_offset
                               ? *config.phase_offset
                               : -larmor_phase(storage.b_field_gauss, storage.g_factor, storage.storage_time_s);
    return derive_effective_state(config.source, config.channel, storage);
}

DetectorBank effective_bank(const ExperimentConfig &config, const EffectiveTwoPhotonState &state) {
    DetectorBank bank = config.bank;
    if (config.background_target_s) {
        bank.p_dark.fill(calibrate_dark_probability(sampling_state(state, config.sampling), bank, config.chsh_angles,
                                                    *config.background_target_s));
    }
    return bank;
}

ResultTable run_scenario(const ExperimentConfig &config) {
    config.validate();
    const EffectiveTwoPhotonState state = effective_state(config);
    const DetectorBank bank = effective_bank(config, state);
    const std::uint64_t trials = config.trials_per_point();
    const std::uint64_t trials_per_run = std::max<std::uint64_t>(1, trials / 4);
    const Scenario scenario = config.scenario;

    SamplerOptions options;
    options.workers = config.workers;
    options.mode = config.sampling;

    ResultTable table;
    switch (scenario) {
        case Scenario::kFringe: {
            for (std::size_t i = 0; i < config.theta_a_list.size(); ++i) {
                AnalyzerSetting setting{config.theta_a_list[i], config.theta_b};
                options.stream = i;
                CoincidenceCounts counts = run_point(state, setting, bank, trials, config.seed, options);
                table.rows.push_back(counts_row(scenario, setting, counts, config.seed));
            }
            break;
        }
        case Scenario::kCorrelation: {
            std::uint64_t stream = 0;
            for (double theta_b : config.theta_b_list) {
                for (double theta_a : config.theta_a_list) {
                    AnalyzerSetting setting{theta_a, theta_b};
                    options.stream = stream++;
                    CoincidenceCounts counts =
                        config.symmetrize ? run_symmetrized(state, setting, bank, trials_per_run, config.seed, options)
                                          : run_point(state, setting, bank, trials, config.seed, options);
                    table.rows.push_back(counts_row(scenario, setting, counts, config.seed));
                }
            }
            break;
        }
        case Scenario::kChsh: {
            auto settings = config.chsh_angles.settings();
            std::array<CorrelationEstimate, 4> estimates;
            std::uint64_t total_trials = 0;
            for (std::size_t i = 0; i < settings.size(); ++i) {
                options.stream = i;
                CoincidenceCounts counts = run_symmetrized(state, settings[i], bank, trials_per_run, config.seed, options);
                estimates[i] = estimate_E(counts, settings[i]);
                total_trials += counts.trials;
                table.rows.push_back(counts_row(scenario, settings[i], counts, config.seed));
            }
            BellResult bell = chsh_S(estimates[0], estimates[1], estimates[2], estimates[3]);
            table.rows.push_back(bell_row(scenario, bell, total_trials, config.seed, true));
            break;
        }
        case Scenario::kOracle: {
            auto settings = config.chsh_angles.settings();
            std::array<CorrelationEstimate, 4> estimates;
            for (std::size_t i = 0; i < settings.size(); ++i) {
                estimates[i].setting = settings[i];
                estimates[i].e_value = analytic_correlation(state, settings[i], config.visibility);
                ResultRow row;
                row.scenario = std::string(scenario_name(scenario));
                row.theta_a_deg = settings[i].theta_a_deg;
                row.theta_b_deg = settings[i].theta_b_deg;
                row.e_value = estimates[i].e_value;
                row.seed = config.seed;
                table.rows.push_back(row);
            }
            BellResult bell = chsh_S(estimates[0], estimates[1], estimates[2], estimates[3]);
            table.rows.push_back(bell_row(scenario, bell, std::nullopt, config.seed, false));
            break;
        }
    }
    return table;
}

}  // namespace qlink
