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

// Value-level model of the remote-entanglement state chain: probabilistic
// atom-photon pair generation at Site A, fiber transfer through two
// quarter-wave plates, helicity-dependent storage at Site B, and the
// effective idler-idler two-photon state that detection acts on.

#include "qlink/units.hpp"

namespace qlink {

/// Site A write process. The signal photon is emitted with probability
/// chi^2 per trial, entangled with the atomic qubit with asymmetry angle eta.
struct SourceParams {
    double chi = 0.1;
    double eta = 0.81 * kPi / 4.0;  // radians
    /// Combined read-out and idler-collection efficiency at Site A.
    double site_a_retrieval = 0.5;

    void validate() const;
};

/// Site B storage. Efficiencies are the combined storage-and-retrieval
/// values for each helicity.
struct StorageParams {
    double eps_plus = 0.08;
    double eps_minus = 0.03;
    double b_field_gauss = 0.2;
    double g_factor = kRb85GroundF3LandeFactor;
    double storage_time_s = 200e-9;
    /// Lumped static phase from light shifts and optical elements, radians.
    double phase_offset = 0.0;

    void validate() const;
};

enum class QwpSignConvention {
    /// a_(+/-) -> +/- a_(-/+)
    kPlus,
    /// a_(+/-) -> -/+ a_(-/+)
    kMinus,
};

struct ChannelParams {
    double transmission = 1.0;
    QwpSignConvention qwp_sign_convention = QwpSignConvention::kPlus;

    void validate() const;
};

/// Unpaired Site-A excitation left behind when the signal photon is not
/// stored at Site B. Detected as an incoherent H/V mixture at Site A only.
struct SingleExcitationWeights {
    double w_plus = 1.0;
    double w_minus = 0.0;
};

struct UnpairedExcitation {
    /// Probability per trial that a lone Site-A idler photon is emitted.
    double probability = 0.0;
    SingleExcitationWeights weights;
};

/// cos(eta_f)|HV> + exp(i phi_f) sin(eta_f)|VH>, produced with probability
/// p_pair per trial.
struct EffectiveTwoPhotonState {
    double eta_f = kPi / 4.0;
    double phi_f = 0.0;
    double p_pair = 1.0;
    UnpairedExcitation unpaired;

    void validate() const;
};

/// -2 (g mu_B / hbar) B t. Throws std::invalid_argument for negative time.
double larmor_phase(double b_field_gauss, double g_factor, double storage_time_s);

/// eps_minus cos^2(eta) + eps_plus sin^2(eta).
double average_storage_efficiency(double eps_plus, double eps_minus, double eta);

/// Global sign picked up by the signal field crossing the two fiber QWPs.
/// Both conventions give the same physical state up to this sign.
int channel_global_sign(QwpSignConvention convention);

EffectiveTwoPhotonState derive_effective_state(
    const SourceParams &source, const ChannelParams &channel, const StorageParams &storage);

SingleExcitationWeights single_excitation_weights(const SourceParams &source, const StorageParams &storage);

/// Lone Site-A excitation channel: the signal photon was emitted but lost in
/// the fiber or not stored. Weights use the transmission-scaled efficiencies.
UnpairedExcitation derive_unpaired_excitation(
    const SourceParams &source, const ChannelParams &channel, const StorageParams &storage);

}  // namespace qlink
