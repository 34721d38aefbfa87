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

// Correlation estimates, CHSH combination, sinusoidal fringe fits and the
// deterministic CHSH angle optimizer.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qlink/detection.hpp"
#include "qlink/montecarlo.hpp"

namespace qlink {

/// Raised when a correlation is requested from zero coincidences.
class NoDataError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Raised when a least-squares design is degenerate or under-covered.
class FitError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct CorrelationEstimate {
    double e_value = 0.0;
    double sigma = 0.0;
    AnalyzerSetting setting;
    std::uint64_t n_coincidences = 0;
};

/// E = (c13 + c24 - c14 - c23) / N with sigma = sqrt((1 - E^2) / N).
CorrelationEstimate estimate_E(const CoincidenceCounts &counts, const AnalyzerSetting &setting);

/// Same E, with sigma from independent Poisson fluctuations of all four
/// counters propagated through the ratio.
CorrelationEstimate estimate_E_poisson(const CoincidenceCounts &counts, const AnalyzerSetting &setting);

/// Settings of a CHSH measurement, degrees.
struct ChshAngles {
    double theta_a = 78.5;
    double theta_a_prime = 33.5;
    double theta_b = 45.0;
    double theta_b_prime = 0.0;

    /// (a, b), (a', b), (a, b'), (a', b'): the order in which S combines them.
    std::array<AnalyzerSetting, 4> settings() const;
};

struct BellResult {
    double s_value = 0.0;
    double sigma = 0.0;
    ChshAngles angles;
    std::array<CorrelationEstimate, 4> estimates;
};

/// S = E(a,b) + E(a',b) + E(a,b') - E(a',b'), sigma_S added in quadrature.
/// Throws std::invalid_argument when the four settings do not form a CHSH set.
BellResult chsh_S(const CorrelationEstimate &e1,
                  const CorrelationEstimate &e2,
                  const CorrelationEstimate &e3,
                  const CorrelationEstimate &e4);

struct FringeSample {
    double theta_deg = 0.0;
    double count = 0.0;
    double sigma = 1.0;
};

/// count(theta) = offset (1 + visibility cos 2(theta - phase)), period 180 deg.
struct FringeFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase_deg = 0.0;
    double period_deg = 180.0;
    double visibility = 0.0;

    double sigma_offset = 0.0;
    double sigma_amplitude = 0.0;
    double sigma_phase_deg = 0.0;
    double sigma_visibility = 0.0;

    double chi_square = 0.0;
    int dof = 0;
    double max_abs_residual = 0.0;
};

FringeFit fit_fringe(std::span<const FringeSample> samples);

/// Fit of E(theta_a) at fixed theta_b to the two-amplitude correlation form
///   E = -1/2 [D cos 2(a - b) + Sigma cos 2(a + b)]
/// with Sigma = V (1 + k), D = V (1 - k), k = cos(phi_f) sin(2 eta_f).
/// At theta_b = 0 mod 90 only V is constrained; at theta_b = 45 mod 90 only
/// V k is, and `assumed_visibility` stands in for V.
struct CorrelationFit {
    double amplitude_sum = 0.0;
    double amplitude_difference = 0.0;
    double visibility = 0.0;
    double product = 0.0;
    bool visibility_fitted = false;
    bool product_fitted = false;

    double sigma_visibility = 0.0;
    double sigma_product = 0.0;

    /// Plain sinusoid view of the same fit: offset + amplitude cos 2(a - phase).
    double offset = 0.0;
    double fringe_amplitude = 0.0;
    double phase_deg = 0.0;

    double chi_square = 0.0;
    int dof = 0;
};

CorrelationFit fit_correlation(std::span<const CorrelationEstimate> samples,
                               double theta_b_deg,
                               double assumed_visibility = 1.0);

struct OptimalAngles {
    ChshAngles angles;
    double s_value = 0.0;
};

/// Model S at the given settings (closed form, uniform visibility).
double model_chsh(const EffectiveTwoPhotonState &state, const ChshAngles &angles, double visibility = 1.0);

/// Maximizes |S| over all four angles: 1 degree grid, then coordinate
/// refinement. Deterministic; ties resolve to the lexicographically smallest
/// (a, a', b, b'). The result is reported with S >= 0.
OptimalAngles find_optimal_angles(const EffectiveTwoPhotonState &state, double visibility = 1.0);

/// Expected S from the exact per-trial coincidence probabilities, including
/// accidentals; with `symmetrize` the four-run relabelled counters are used.
double expected_chsh(const EffectiveTwoPhotonState &state,
                     const DetectorBank &bank,
                     const ChshAngles &angles,
                     bool symmetrize = true);

/// Uniform per-detector dark-click probability that brings the expected
/// symmetrized S down to `target_s`. Throws std::invalid_argument if the
/// target is not reachable.
double calibrate_dark_probability(const EffectiveTwoPhotonState &state,
                                  const DetectorBank &bank,
                                  const ChshAngles &angles,
                                  double target_s);

}  // namespace qlink
