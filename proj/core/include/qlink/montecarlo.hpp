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

// Stochastic trial engine. Every trial draws one click pattern from the
// detection model's outcome distribution and increments every coincident
// (Site A, Site B) detector pair. Runs split across workers, each with a
// private random stream derived from (seed, stream, run, worker) and a
// private accumulator; partial results merge associatively.

#include <array>
#include <cstdint>
#include <random>

#include "qlink/detection.hpp"

namespace qlink {

struct CoincidenceCounts {
    /// c[n - 1][m - 3] counts coincidences between D_n and D_m.
    std::array<std::array<std::uint64_t, 2>, 2> c{};
    std::uint64_t trials = 0;

    std::uint64_t &at(int n, int m);
    std::uint64_t at(int n, int m) const;
    /// c13 + c14 + c23 + c24.
    std::uint64_t total() const;

    friend bool operator==(const CoincidenceCounts &, const CoincidenceCounts &) = default;
};

CoincidenceCounts merge(const CoincidenceCounts &a, const CoincidenceCounts &b);

enum class SamplingMode {
    /// Every protocol trial, including empty ones.
    kFull,
    /// Only trials in which an idler pair was emitted; unpaired channel off.
    kConditionedPair,
};

struct SamplerOptions {
    unsigned workers = 1;
    SamplingMode mode = SamplingMode::kFull;
    /// Distinguishes independent points sharing one master seed.
    std::uint64_t stream = 0;
};

struct RunPlan {
    AnalyzerSetting setting;
    std::uint64_t trials_per_run = 1;
    std::uint64_t seed = 0;
    bool symmetrize = false;
};

/// The state actually sampled under `mode`.
EffectiveTwoPhotonState sampling_state(const EffectiveTwoPhotonState &state, SamplingMode mode);

/// Random engine for one (seed, stream, run, worker) tuple.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint32_t run, std::uint32_t worker);

/// Draws click patterns from a fixed distribution. Runs of empty trials are
/// skipped with a single geometric draw, so cost scales with the number of
/// non-empty trials.
class PatternSampler {
   public:
    explicit PatternSampler(const ClickDistribution &dist);

    /// Samples `trials` protocol trials and accumulates into `out`.
    void sample(std::mt19937_64 &rng, std::uint64_t trials, CoincidenceCounts &out) const;

    double nonempty_probability() const { return nonempty_; }

   private:
    std::array<double, 15> cumulative_{};
    double nonempty_ = 0.0;
    double log_empty_ = 0.0;
};

CoincidenceCounts run_point(const EffectiveTwoPhotonState &state,
                            const AnalyzerSetting &setting,
                            const DetectorBank &bank,
                            std::uint64_t trials,
                            std::uint64_t seed,
                            const SamplerOptions &options = {});

/// Four equal runs at (a, b), (a+90, b), (a, b+90), (a+90, b+90) with detector
/// roles relabelled per run, so that each effective counter carries the
/// efficiency factor (eps1 + eps2)(eps3 + eps4).
CoincidenceCounts run_symmetrized(const EffectiveTwoPhotonState &state,
                                  const AnalyzerSetting &base_setting,
                                  const DetectorBank &bank,
                                  std::uint64_t trials_per_run,
                                  std::uint64_t seed,
                                  const SamplerOptions &options = {});

CoincidenceCounts execute(const RunPlan &plan,
                          const EffectiveTwoPhotonState &state,
                          const DetectorBank &bank,
                          const SamplerOptions &options = {});

/// Expected per-trial probabilities of the symmetrized effective counters
/// (c13, c14, c23, c24), each averaged over the four runs.
std::array<double, 4> expected_symmetrized_coincidences(const EffectiveTwoPhotonState &state,
                                                        const AnalyzerSetting &base_setting,
                                                        const DetectorBank &bank);

}  // namespace qlink
