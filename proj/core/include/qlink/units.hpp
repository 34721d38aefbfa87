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

#include <cmath>
#include <numbers>

namespace qlink {

inline constexpr double kPi = std::numbers::pi;

/// Bohr magneton over hbar, in rad s^-1 G^-1 (2 pi x 1.3996 MHz/G).
inline constexpr double kBohrMagnetonOverHbar = 2.0 * kPi * 1.3996e6;

/// Effective protocol repetition rate. One Monte Carlo trial is one protocol
/// cycle; wall-clock acquisition time converts to trials through this rate.
inline constexpr double kRepetitionRateHz = 108e3;

/// Duration of a single write/store/read cycle.
inline constexpr double kTrialDurationSeconds = 1.1e-6;

/// Land\'e factor of the 85Rb F=3 hyperfine ground level (nuclear term neglected).
inline constexpr double kRb85GroundF3LandeFactor = 1.0 / 3.0;

constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle in degrees into [0, 180).
inline double wrap_half_turn_deg(double deg) {
    double r = std::fmod(deg, 180.0);
    if (r < 0) r += 180.0;
    if (r >= 180.0) r -= 180.0;
    return r;
}

/// Number of protocol trials acquired in `seconds` of wall-clock time.
inline unsigned long long trials_for_duration(double seconds) {
    return static_cast<unsigned long long>(std::llround(seconds * kRepetitionRateHz));
}

}  // namespace qlink
