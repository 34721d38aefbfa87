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

#include "qlink/config.hpp"
#include "qlink/result_table.hpp"

namespace qlink {

/// Effective two-photon state for the configured source, channel and storage.
EffectiveTwoPhotonState effective_state(const ExperimentConfig &config);

/// Detector bank after applying `background_target_s`, if configured. The
/// calibration uses the state as sampled under `config.sampling`.
DetectorBank effective_bank(const ExperimentConfig &config, const EffectiveTwoPhotonState &state);

/// Runs the configured scenario:
///   fringe       counters vs. theta_a at fixed theta_b (raw, unsymmetrized)
///   correlation  E +/- sigma vs. theta_a for each theta_b in the list
///   chsh         four symmetrized points and S +/- sigma
///   oracle       closed-form E and S at the CHSH settings, no sampling
/// Every row echoes the master seed. Each point samples its own stream.
ResultTable run_scenario(const ExperimentConfig &config);

}  // namespace qlink
