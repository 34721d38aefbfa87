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

#include "qlink/detection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qlink {

namespace {

// Unit Jones vector (H, V components) selected by a PBS port after rotation
// by theta: the transmitted port sees cos/sin, the reflected port -sin/cos.
struct PortVector {
    double h;
    double v;
};

PortVector port_vector(double theta_deg, bool reflected) {
    double t = deg_to_rad(theta_deg);
    double c = std::cos(t);
    double s = std::sin(t);
    return reflected ? PortVector{-s, c} : PortVector{c, s};
}

void check_pair(int n, int m) {
    if ((n != 1 && n != 2) || (m != 3 && m != 4)) {
        throw std::invalid_argument("invalid detector pair (" + std::to_string(n) + ", " + std::to_string(m) +
                                    "); expected n in {1,2} and m in {3,4}");
    }
}

}  // namespace

void DetectorBank::validate() const {
    for (int k = 0; k < 4; ++k) {
        if (!(eps[k] >= 0.0 && eps[k] <= 1.0)) {
            throw std::invalid_argument("efficiency of D" + std::to_string(k + 1) + " must lie in [0, 1]");
        }
        if (!(p_dark[k] >= 0.0 && p_dark[k] <= 1.0)) {
            throw std::invalid_argument("dark probability of D" + std::to_string(k + 1) + " must lie in [0, 1]");
        }
    }
}

double ClickDistribution::total() const {
    double sum = 0.0;
    for (double x : p) sum += x;
    return sum;
}

double ClickDistribution::coincidence(int n, int m) const {
    check_pair(n, m);
    std::uint32_t mask = detector_bit(n) | detector_bit(m);
    double sum = 0.0;
    for (std::uint32_t pattern = 0; pattern < 16; ++pattern) {
        if ((pattern & mask) == mask) sum += p[pattern];
    }
    return sum;
}

std::complex<double> pair_amplitude(const EffectiveTwoPhotonState &state, const AnalyzerSetting &setting, int n, int m) {
    check_pair(n, m);
    PortVector a = port_vector(setting.theta_a_deg, n == 2);
    PortVector b = port_vector(setting.theta_b_deg, m == 4);
    std::complex<double> hv = std::cos(state.eta_f) * a.h * b.v;
    std::complex<double> vh = std::polar(std::sin(state.eta_f), state.phi_f) * (a.v * b.h);
    return hv + vh;
}

double conditional_pair_probability(
    const EffectiveTwoPhotonState &state, const AnalyzerSetting &setting, int n, int m) {
    return std::norm(pair_amplitude(state, setting, n, m));
}

ClickDistribution outcome_distribution(const EffectiveTwoPhotonState &state,
                                       const AnalyzerSetting &setting,
                                       const DetectorBank &bank) {
    state.validate();
    bank.validate();
    const auto &eps = bank.eps;

    // Photon-induced clicks before dark counts are mixed in.
    std::array<double, 16> photon{};
    double p_idle = 1.0 - state.p_pair - state.unpaired.probability;
    photon[0] += p_idle;

    for (int n = 1; n <= 2; ++n) {
        for (int m = 3; m <= 4; ++m) {
            double q = state.p_pair * conditional_pair_probability(state, setting, n, m);
            double ea = eps[n - 1];
            double eb = eps[m - 1];
            photon[detector_bit(n) | detector_bit(m)] += q * ea * eb;
            photon[detector_bit(n)] += q * ea * (1.0 - eb);
            photon[detector_bit(m)] += q * (1.0 - ea) * eb;
            photon[0] += q * (1.0 - ea) * (1.0 - eb);
        }
    }

    // The lone Site-A photon is an incoherent mixture: + maps to H, - to V.
    const auto &w = state.unpaired.weights;
    double t = deg_to_rad(setting.theta_a_deg);
    double c2 = std::cos(t) * std::cos(t);
    double s2 = std::sin(t) * std::sin(t);
    std::array<double, 2> port_prob{w.w_plus * c2 + w.w_minus * s2, w.w_plus * s2 + w.w_minus * c2};
    for (int n = 1; n <= 2; ++n) {
        double q = state.unpaired.probability * port_prob[n - 1];
        photon[detector_bit(n)] += q * eps[n - 1];
        photon[0] += q * (1.0 - eps[n - 1]);
    }

    std::array<double, 16> dark{};
    for (std::uint32_t pattern = 0; pattern < 16; ++pattern) {
        double prob = 1.0;
        for (int k = 0; k < 4; ++k) {
            prob *= (pattern & (1u << k)) ? bank.p_dark[k] : 1.0 - bank.p_dark[k];
        }
        dark[pattern] = prob;
    }

    ClickDistribution out;
    for (std::uint32_t s = 0; s < 16; ++s) {
        if (photon[s] == 0.0) continue;
        for (std::uint32_t d = 0; d < 16; ++d) {
            out.p[s | d] += photon[s] * dark[d];
        }
    }
    return out;
}

double coincidence_probability(const EffectiveTwoPhotonState &state,
                               const AnalyzerSetting &setting,
                               int n,
                               int m,
                               const DetectorBank &bank) {
    check_pair(n, m);
    return outcome_distribution(state, setting, bank).coincidence(n, m);
}

double analytic_correlation(const EffectiveTwoPhotonState &state, const AnalyzerSetting &setting, double visibility) {
    double a = deg_to_rad(setting.theta_a_deg);
    double b = deg_to_rad(setting.theta_b_deg);
    double k = std::cos(state.phi_f) * std::sin(2.0 * state.eta_f);
    return -0.5 * visibility * (std::cos(2.0 * (a - b)) * (1.0 - k) + std::cos(2.0 * (a + b)) * (1.0 + k));
}

std::array<double, 4> expected_coincidences(const EffectiveTwoPhotonState &state,
                                            const AnalyzerSetting &setting,
                                            const DetectorBank &bank) {
    ClickDistribution dist = outcome_distribution(state, setting, bank);
    return {dist.coincidence(1, 3), dist.coincidence(1, 4), dist.coincidence(2, 3), dist.coincidence(2, 4)};
}

}  // namespace qlink
