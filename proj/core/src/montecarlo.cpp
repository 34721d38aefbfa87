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

#include "qlink/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qlink {

namespace {

// 53 random bits mapped to (0, 1].
double uniform_open_closed(std::mt19937_64 &rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

CoincidenceCounts sample_partitioned(const PatternSampler &sampler,
                                     std::uint64_t trials,
                                     std::uint64_t seed,
                                     std::uint64_t stream,
                                     std::uint32_t run,
                                     unsigned workers) {
    if (workers == 0) {
        throw std::invalid_argument("worker count must be positive");
    }
    std::vector<CoincidenceCounts> partial(workers);
    auto work = [&](unsigned w) {
        std::uint64_t share = trials / workers + (w < trials % workers ? 1 : 0);
        std::mt19937_64 rng = make_stream(seed, stream, run, w);
        sampler.sample(rng, share, partial[w]);
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    CoincidenceCounts out;
    for (const auto &p : partial) out = merge(out, p);
    return out;
}

}  // namespace

EffectiveTwoPhotonState sampling_state(const EffectiveTwoPhotonState &state, SamplingMode mode) {
    if (mode == SamplingMode::kFull) return state;
    EffectiveTwoPhotonState conditioned = state;
    conditioned.p_pair = 1.0;
    conditioned.unpaired.probability = 0.0;
    return conditioned;
}

std::uint64_t &CoincidenceCounts::at(int n, int m) { return c.at(n - 1).at(m - 3); }
std::uint64_t CoincidenceCounts::at(int n, int m) const { return c.at(n - 1).at(m - 3); }

std::uint64_t CoincidenceCounts::total() const { return c[0][0] + c[0][1] + c[1][0] + c[1][1]; }

CoincidenceCounts merge(const CoincidenceCounts &a, const CoincidenceCounts &b) {
    CoincidenceCounts out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) out.c[i][j] = a.c[i][j] + b.c[i][j];
    }
    out.trials = a.trials + b.trials;
    return out;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint32_t run, std::uint32_t worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32),
                      run,
                      worker};
    return std::mt19937_64(seq);
}

PatternSampler::PatternSampler(const ClickDistribution &dist) {
    double acc = 0.0;
    for (std::size_t k = 1; k < 16; ++k) {
        acc += dist.p[k];
        cumulative_[k - 1] = acc;
    }
    nonempty_ = acc;
    log_empty_ = std::log1p(-std::min(acc, 1.0));
}

void PatternSampler::sample(std::mt19937_64 &rng, std::uint64_t trials, CoincidenceCounts &out) const {
    out.trials += trials;
    if (nonempty_ <= 0.0) return;

    std::uint64_t remaining = trials;
    while (remaining > 0) {
        // Empty trials preceding the next non-empty one: P(skip >= k) = p_empty^k.
        if (std::isfinite(log_empty_)) {
            double skip = std::floor(std::log(uniform_open_closed(rng)) / log_empty_);
            if (!(skip < static_cast<double>(remaining))) return;
            remaining -= static_cast<std::uint64_t>(skip);
        }
        --remaining;

        double u = (1.0 - uniform_open_closed(rng)) * nonempty_;
        std::size_t k = 0;
        while (k < 14 && cumulative_[k] <= u) ++k;
        std::uint32_t pattern = static_cast<std::uint32_t>(k + 1);

        for (int n = 1; n <= 2; ++n) {
            if (!(pattern & detector_bit(n))) continue;
            for (int m = 3; m <= 4; ++m) {
                if (pattern & detector_bit(m)) ++out.c[n - 1][m - 3];
            }
        }
    }
}

CoincidenceCounts run_point(const EffectiveTwoPhotonState &state,
                            const AnalyzerSetting &setting,
                            const DetectorBank &bank,
                            std::uint64_t trials,
                            std::uint64_t seed,
                            const SamplerOptions &options) {
    if (trials == 0) {
        throw std::invalid_argument("trials must be positive");
    }
    PatternSampler sampler(outcome_distribution(sampling_state(state, options.mode), setting, bank));
    return sample_partitioned(sampler, trials, seed, options.stream, 0, options.workers);
}

CoincidenceCounts run_symmetrized(const EffectiveTwoPhotonState &state,
                                  const AnalyzerSetting &base_setting,
                                  const DetectorBank &bank,
                                  std::uint64_t trials_per_run,
                                  std::uint64_t seed,
                                  const SamplerOptions &options) {
    if (trials_per_run == 0) {
        throw std::invalid_argument("trials_per_run must be positive");
    }
    EffectiveTwoPhotonState sampled = sampling_state(state, options.mode);
    CoincidenceCounts effective;
    for (std::uint32_t run = 0; run < 4; ++run) {
        bool flip_a = run & 1u;
        bool flip_b = run & 2u;
        AnalyzerSetting setting{base_setting.theta_a_deg + (flip_a ? 90.0 : 0.0),
                                base_setting.theta_b_deg + (flip_b ? 90.0 : 0.0)};
        PatternSampler sampler(outcome_distribution(sampled, setting, bank));
        CoincidenceCounts raw = sample_partitioned(sampler, trials_per_run, seed, options.stream, run + 1, options.workers);

        // A 90 degree flip swaps which detector sees the base-setting projection.
        for (int n = 1; n <= 2; ++n) {
            for (int m = 3; m <= 4; ++m) {
                int role_n = flip_a ? 3 - n : n;
                int role_m = flip_b ? 7 - m : m;
                effective.at(role_n, role_m) += raw.at(n, m);
            }
        }
        effective.trials += raw.trials;
    }
    return effective;
}

CoincidenceCounts execute(const RunPlan &plan,
                          const EffectiveTwoPhotonState &state,
                          const DetectorBank &bank,
                          const SamplerOptions &options) {
    if (plan.symmetrize) {
        return run_symmetrized(state, plan.setting, bank, plan.trials_per_run, plan.seed, options);
    }
    return run_point(state, plan.setting, bank, plan.trials_per_run, plan.seed, options);
}

std::array<double, 4> expected_symmetrized_coincidences(const EffectiveTwoPhotonState &state,
                                                        const AnalyzerSetting &base_setting,
                                                        const DetectorBank &bank) {
    std::array<double, 4> out{};
    auto index = [](int n, int m) { return (n - 1) * 2 + (m - 3); };
    for (int run = 0; run < 4; ++run) {
        bool flip_a = run & 1;
        bool flip_b = run & 2;
        AnalyzerSetting setting{base_setting.theta_a_deg + (flip_a ? 90.0 : 0.0),
                                base_setting.theta_b_deg + (flip_b ? 90.0 : 0.0)};
        std::array<double, 4> raw = expected_coincidences(state, setting, bank);
        for (int n = 1; n <= 2; ++n) {
            for (int m = 3; m <= 4; ++m) {
                int role_n = flip_a ? 3 - n : n;
                int role_m = flip_b ? 7 - m : m;
                out[index(role_n, role_m)] += 0.25 * raw[index(n, m)];
            }
        }
    }
    return out;
}

}  // namespace qlink
