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

#include "qlink/quantum_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qlink {

namespace {

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void SourceParams::validate() const {
    require(chi > 0.0 && chi < 1.0, "chi must lie in (0, 1), got " + std::to_string(chi));
    require(eta >= 0.0 && eta <= kPi / 2.0, "eta must lie in [0, pi/2], got " + std::to_string(eta));
    require(is_probability(site_a_retrieval), "site_a_retrieval must lie in [0, 1]");
}

void StorageParams::validate() const {
    require(is_probability(eps_plus), "eps_plus must lie in [0, 1], got " + std::to_string(eps_plus));
    require(is_probability(eps_minus), "eps_minus must lie in [0, 1], got " + std::to_string(eps_minus));
    require(storage_time_s >= 0.0, "storage_time must be non-negative");
    require(std::isfinite(b_field_gauss) && std::isfinite(g_factor) && std::isfinite(phase_offset),
            "storage parameters must be finite");
}

void ChannelParams::validate() const {
    require(is_probability(transmission), "transmission must lie in [0, 1], got " + std::to_string(transmission));
}

void EffectiveTwoPhotonState::validate() const {
    require(eta_f >= 0.0 && eta_f <= kPi / 2.0, "eta_f must lie in [0, pi/2]");
    require(std::isfinite(phi_f), "phi_f must be finite");
    require(is_probability(p_pair), "p_pair must lie in [0, 1]");
    require(is_probability(unpaired.probability), "unpaired probability must lie in [0, 1]");
    require(p_pair + unpaired.probability <= 1.0 + 1e-15, "pair and unpaired probabilities exceed 1");
    require(is_probability(unpaired.weights.w_plus) && is_probability(unpaired.weights.w_minus),
            "unpaired weights must lie in [0, 1]");
}

double larmor_phase(double b_field_gauss, double g_factor, double storage_time_s) {
    require(storage_time_s >= 0.0, "storage_time must be non-negative");
    return -2.0 * g_factor * kBohrMagnetonOverHbar * b_field_gauss * storage_time_s;
}

double average_storage_efficiency(double eps_plus, double eps_minus, double eta) {
    double c = std::cos(eta);
    double s = std::sin(eta);
    return eps_minus * c * c + eps_plus * s * s;
}

int channel_global_sign(QwpSignConvention convention) {
    // |+>_a|+>_f cos(eta) + |->_a|->_f sin(eta) maps to
    // s (cos(eta)|+>_a|->_f - sin(eta)|->_a|+>_f), s = +1 or -1.
    return convention == QwpSignConvention::kPlus ? 1 : -1;
}

EffectiveTwoPhotonState derive_effective_state(
    const SourceParams &source, const ChannelParams &channel, const StorageParams &storage) {
    source.validate();
    channel.validate();
    storage.validate();

    double eps_b = average_storage_efficiency(storage.eps_plus, storage.eps_minus, source.eta);
    if (eps_b <= 0.0) {
        throw std::invalid_argument("average storage efficiency is zero; effective state undefined");
    }

    // A global sign is not observable; only the relative phase enters phi_f.
    (void)channel_global_sign(channel.qwp_sign_convention);

    double cos_eta_f = std::sqrt(storage.eps_minus / eps_b) * std::cos(source.eta);
    EffectiveTwoPhotonState state;
    state.eta_f = std::acos(std::min(1.0, cos_eta_f));
    state.phi_f = larmor_phase(storage.b_field_gauss, storage.g_factor, storage.storage_time_s) +
                  storage.phase_offset;
    state.p_pair = source.chi * source.chi * channel.transmission * eps_b * source.site_a_retrieval;
    state.unpaired = derive_unpaired_excitation(source, channel, storage);
    return state;
}

SingleExcitationWeights single_excitation_weights(const SourceParams &source, const StorageParams &storage) {
    double eps = average_storage_efficiency(storage.eps_plus, storage.eps_minus, source.eta);
    if (eps >= 1.0) {
        throw std::invalid_argument("average storage efficiency is 1; no unpaired excitation remains");
    }
    double c = std::cos(source.eta);
    SingleExcitationWeights w;
    w.w_plus = (1.0 - storage.eps_minus) * c * c / (1.0 - eps);
    w.w_minus = 1.0 - w.w_plus;
    return w;
}

UnpairedExcitation derive_unpaired_excitation(
    const SourceParams &source, const ChannelParams &channel, const StorageParams &storage) {
    StorageParams effective = storage;
    effective.eps_plus *= channel.transmission;
    effective.eps_minus *= channel.transmission;
    double eps = average_storage_efficiency(effective.eps_plus, effective.eps_minus, source.eta);

    UnpairedExcitation out;
    out.probability = source.chi * source.chi * source.site_a_retrieval * (1.0 - eps);
    if (out.probability > 0.0) {
        out.weights = single_excitation_weights(source, effective);
    }
    return out;
}

}  // namespace qlink
