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

// Polarization analysis and photodetection. Each site rotates the idler
// polarization by theta (half-wave plate), splits it on a PBS and detects
// the two ports: D1/D2 at Site A, D3/D4 at Site B. The transmitted port
// (D1, D3) projects onto the rotated H axis, the reflected port (D2, D4)
// onto the rotated V axis. The circular-to-linear quarter-wave plate ahead of
// each analyzer is folded into the H/V basis of the effective state.

#include <array>
#include <complex>
#include <cstdint>

#include "qlink/quantum_model.hpp"

namespace qlink {

/// Half-wave-plate polarization rotation angles, degrees. Meaningful modulo 180.
struct AnalyzerSetting {
    double theta_a_deg = 0.0;
    double theta_b_deg = 0.0;

    friend bool operator==(const AnalyzerSetting &, const AnalyzerSetting &) = default;
};

/// Detector indices follow the experiment labels D1..D4.
enum class Detector : int { kD1 = 1, kD2 = 2, kD3 = 3, kD4 = 4 };

struct DetectorBank {
    /// Overall efficiency of D1..D4, including propagation losses.
    std::array<double, 4> eps{1.0, 1.0, 1.0, 1.0};
    /// Per-trial dark or stray-light click probability of D1..D4.
    std::array<double, 4> p_dark{0.0, 0.0, 0.0, 0.0};

    void validate() const;

    static DetectorBank ideal() { return {}; }
};

/// Joint click-pattern probabilities for one trial. Pattern bit k (0..3) is
/// set when detector D(k+1) clicked; pattern 0 is the empty trial.
struct ClickDistribution {
    std::array<double, 16> p{};

    double total() const;
    /// Probability that detectors `n` (Site A) and `m` (Site B) both click.
    double coincidence(int n, int m) const;
};

constexpr std::uint32_t detector_bit(int detector) { return 1u << (detector - 1); }

/// <port_n, port_m | Psi>, the two-photon amplitude for detector pair (n, m).
std::complex<double> pair_amplitude(const EffectiveTwoPhotonState &state, const AnalyzerSetting &setting, int n, int m);

/// |A_nm|^2: outcome probability given that an idler pair was emitted and
/// both photons were detected.
double conditional_pair_probability(
    const EffectiveTwoPhotonState &state, const AnalyzerSetting &setting, int n, int m);

/// Probability per trial that D_n and D_m both click. Includes pair events,
/// accidental coincidences from dark clicks and the unpaired Site-A channel.
/// Throws std::invalid_argument unless n is 1 or 2 and m is 3 or 4.
double coincidence_probability(const EffectiveTwoPhotonState &state,
                               const AnalyzerSetting &setting,
                               int n,
                               int m,
                               const DetectorBank &bank);

ClickDistribution outcome_distribution(const EffectiveTwoPhotonState &state,
                                       const AnalyzerSetting &setting,
                                       const DetectorBank &bank);

/// Closed-form correlation function scaled by a uniform visibility factor:
///   E = -V/2 [cos 2(a-b) (1 - cos(phi_f) sin(2 eta_f)) + cos 2(a+b) (1 + cos(phi_f) sin(2 eta_f))].
double analytic_correlation(const EffectiveTwoPhotonState &state, const AnalyzerSetting &setting, double visibility = 1.0);

/// Expected coincidence probabilities per trial in counter order
/// (c13, c14, c23, c24).
std::array<double, 4> expected_coincidences(const EffectiveTwoPhotonState &state,
                                            const AnalyzerSetting &setting,
                                            const DetectorBank &bank);

}  // namespace qlink
