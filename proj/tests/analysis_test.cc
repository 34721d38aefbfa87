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

#include "qlink/analysis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "support/jones_oracle.hpp"

using namespace qlink;

namespace {

CoincidenceCounts counts(std::uint64_t c13, std::uint64_t c24, std::uint64_t c14, std::uint64_t c23) {
    CoincidenceCounts c;
    c.at(1, 3) = c13;
    c.at(2, 4) = c24;
    c.at(1, 4) = c14;
    c.at(2, 3) = c23;
    return c;
}

CorrelationEstimate make_estimate(double e, double sigma, AnalyzerSetting s) {
    CorrelationEstimate out;
    out.e_value = e;
    out.sigma = sigma;
    out.setting = s;
    return out;
}

EffectiveTwoPhotonState state(double eta_f, double phi_f) {
    EffectiveTwoPhotonState s;
    s.eta_f = eta_f;
    s.phi_f = phi_f;
    return s;
}

BellResult measured_set() {
    ChshAngles angles;
    auto st = angles.settings();
    return chsh_S(make_estimate(0.447, 0.017, st[0]), make_estimate(0.640, 0.014, st[1]),
                  make_estimate(0.572, 0.015, st[2]), make_estimate(-0.504, 0.016, st[3]));
}

const double kTsirelson = 2.0 * std::numbers::sqrt2;

}  // namespace

TEST(EstimateE, perfect_correlation) {
    auto e = estimate_E(counts(500, 500, 0, 0), {});
    EXPECT_EQ(e.e_value, 1.0);
    EXPECT_EQ(e.sigma, 0.0);
    EXPECT_EQ(e.n_coincidences, 1000u);
}

TEST(EstimateE, binomial_sigma) {
    auto e = estimate_E(counts(100, 100, 50, 50), {10.0, 20.0});
    EXPECT_NEAR(e.e_value, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(e.sigma, std::sqrt((1.0 - 1.0 / 9.0) / 300.0), 1e-15);
    EXPECT_NEAR(e.sigma, 0.0544, 5e-5);
    EXPECT_EQ(e.setting, (AnalyzerSetting{10.0, 20.0}));
}

TEST(EstimateE, measured_sigma_implies_coincidence_total) {
    // sigma = 0.017 at E = 0.447 needs N = (1 - E^2) / sigma^2.
    double n = (1.0 - 0.447 * 0.447) / (0.017 * 0.017);
    EXPECT_NEAR(n, 2.8e3, 0.1e3);
    auto e = estimate_E(counts(1011, 1011, 386, 386), {});
    EXPECT_NEAR(e.e_value, 0.447, 1e-3);
    EXPECT_NEAR(e.sigma, 0.017, 5e-4);
}

TEST(EstimateE, no_data_is_an_error) {
    EXPECT_THROW(estimate_E(CoincidenceCounts{}, {}), NoDataError);
    EXPECT_THROW(estimate_E_poisson(CoincidenceCounts{}, {}), NoDataError);
}

TEST(EstimateE, scale_invariant_and_bounded) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::uint64_t> draw(0, 5000);
    for (int i = 0; i < 1000; ++i) {
        auto c = counts(draw(rng), draw(rng), draw(rng), draw(rng));
        if (c.total() == 0) continue;
        auto e = estimate_E(c, {});
        EXPECT_LE(std::abs(e.e_value), 1.0);
        EXPECT_GE(e.sigma, 0.0);
        for (std::uint64_t k : {2u, 7u, 1000u}) {
            auto scaled = counts(c.at(1, 3) * k, c.at(2, 4) * k, c.at(1, 4) * k, c.at(2, 3) * k);
            EXPECT_NEAR(estimate_E(scaled, {}).e_value, e.e_value, 1e-14);
        }
    }
}

TEST(EstimateE, poisson_sigma_agrees_with_binomial) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::uint64_t> draw(300, 50000);
    for (int i = 0; i < 500; ++i) {
        auto c = counts(draw(rng), draw(rng), draw(rng), draw(rng));
        auto b = estimate_E(c, {});
        auto p = estimate_E_poisson(c, {});
        EXPECT_EQ(b.e_value, p.e_value);
        EXPECT_NEAR(p.sigma, b.sigma, 0.05 * b.sigma);
    }
}

TEST(ChshS, measured_correlations) {
    auto r = measured_set();
    EXPECT_NEAR(r.s_value, 2.163, 1e-12);
    EXPECT_NEAR(r.sigma, 0.031, 0.001);
    // Frozen from sqrt(0.017^2 + 0.014^2 + 0.015^2 + 0.016^2).
    EXPECT_NEAR(r.sigma, 0.0310805405, 1e-9);
    EXPECT_NEAR(r.sigma * r.sigma, 0.017 * 0.017 + 0.014 * 0.014 + 0.015 * 0.015 + 0.016 * 0.016, 1e-15);
}

TEST(ChshS, zero_correlations_give_zero) {
    auto st = ChshAngles{}.settings();
    auto r = chsh_S(make_estimate(0, 0, st[0]), make_estimate(0, 0, st[1]), make_estimate(0, 0, st[2]),
                    make_estimate(0, 0, st[3]));
    EXPECT_EQ(r.s_value, 0.0);
    EXPECT_EQ(r.sigma, 0.0);
}

TEST(ChshS, analytic_table_values) {
    auto st = ChshAngles{}.settings();
    auto r = chsh_S(make_estimate(0.3840, 0, st[0]), make_estimate(0.9047, 0, st[1]), make_estimate(0.9205, 0, st[2]),
                    make_estimate(-0.3907, 0, st[3]));
    EXPECT_NEAR(r.s_value, 2.600, 1e-3);
}

TEST(ChshS, rejects_misassigned_settings) {
    auto st = ChshAngles{}.settings();
    auto e = [&](int i) { return make_estimate(0.1, 0.01, st[i]); };
    EXPECT_THROW(chsh_S(e(1), e(0), e(2), e(3)), std::invalid_argument);
    EXPECT_THROW(chsh_S(e(0), e(0), e(2), e(3)), std::invalid_argument);
    EXPECT_THROW(chsh_S(e(0), e(1), e(3), e(2)), std::invalid_argument);
    auto same = make_estimate(0.1, 0.01, {10.0, 10.0});
    EXPECT_THROW(chsh_S(same, same, same, same), std::invalid_argument);
}

TEST(ChshS, bounded_by_four_and_quadrature_sigma) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto st = ChshAngles{}.settings();
    for (int i = 0; i < 10000; ++i) {
        std::array<double, 4> e{unit(rng), unit(rng), unit(rng), unit(rng)};
        std::array<double, 4> s{std::abs(unit(rng)), std::abs(unit(rng)), std::abs(unit(rng)), std::abs(unit(rng))};
        auto r = chsh_S(make_estimate(e[0], s[0], st[0]), make_estimate(e[1], s[1], st[1]),
                        make_estimate(e[2], s[2], st[2]), make_estimate(e[3], s[3], st[3]));
        EXPECT_LE(std::abs(r.s_value), 4.0);
        EXPECT_NEAR(r.sigma * r.sigma, s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3], 1e-12);
    }
}

TEST(ModelChsh, tsirelson_sweep) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000000; ++i) {
        auto s = state(unit(rng) * kPi / 2.0, unit(rng) * 2.0 * kPi);
        ChshAngles a{180.0 * unit(rng), 180.0 * unit(rng), 180.0 * unit(rng), 180.0 * unit(rng)};
        worst = std::max(worst, std::abs(model_chsh(s, a, unit(rng))));
    }
    EXPECT_LE(worst, kTsirelson + 1e-9);
}

TEST(ModelChsh, default_angles_literal_state) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    EXPECT_NEAR(model_chsh(s, ChshAngles{}), 2.600, 0.002);
    // Frozen from the Jones-vector oracle.
    EXPECT_NEAR(model_chsh(s, ChshAngles{}), 2.5992458, 1e-6);
    EXPECT_NEAR(model_chsh(s, ChshAngles{}, 0.5), 0.5 * model_chsh(s, ChshAngles{}), 1e-14);
}

TEST(FitFringe, noiseless_round_trip_from_detection_model) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    std::vector<FringeSample> samples;
    for (int i = 0; i < 12; ++i) {
        double ta = 15.0 * i;
        samples.push_back({ta, 1e4 * conditional_pair_probability(s, {ta, 135.0}, 1, 3), 1.0});
    }
    auto fit = fit_fringe(samples);
    // Reference parameters from discrete Fourier sums over one full period.
    double sum_sin = 0, sum_cos = 0, mean = 0;
    for (auto &x : samples) mean += x.count / 12.0;
    for (auto &x : samples) {
        sum_cos += (x.count - mean) * std::cos(2.0 * oracle::rad(x.theta_deg)) * 2.0 / 12.0;
        sum_sin += (x.count - mean) * std::sin(2.0 * oracle::rad(x.theta_deg)) * 2.0 / 12.0;
    }
    double v = std::hypot(sum_cos, sum_sin) / mean;
    double phase = std::fmod(std::atan2(sum_sin, sum_cos) / 2.0 * 180.0 / kPi + 180.0, 180.0);
    EXPECT_NEAR(fit.offset, mean, 1e-6 * mean);
    EXPECT_NEAR(fit.visibility, v, 1e-6);
    EXPECT_NEAR(std::fmod(fit.phase_deg + 180.0, 180.0), phase, 1e-6);
    EXPECT_LE(fit.max_abs_residual, 1e-9 * fit.offset);
    EXPECT_EQ(fit.period_deg, 180.0);
    EXPECT_EQ(fit.dof, 9);
}

TEST(FitFringe, random_round_trips) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        double offset = 10.0 + 1e4 * unit(rng);
        double vis = unit(rng);
        double phase = 180.0 * unit(rng);
        std::vector<FringeSample> samples;
        int n = 4 + int(unit(rng) * 20);
        for (int k = 0; k < n; ++k) {
            double t = 100.0 * k / (n - 1) + 30.0;
            samples.push_back({t, offset * (1 + vis * std::cos(2.0 * oracle::rad(t - phase))), 1.0 + unit(rng)});
        }
        auto fit = fit_fringe(samples);
        EXPECT_NEAR(fit.visibility, vis, 1e-6);
        EXPECT_NEAR(fit.offset, offset, 1e-9 * offset);
        EXPECT_LE(fit.max_abs_residual, 1e-9 * offset);
        if (vis > 1e-3) {
            double d = std::remainder(fit.phase_deg - phase, 180.0);
            EXPECT_NEAR(d, 0.0, 1e-6);
        }
        EXPECT_GE(fit.phase_deg, 0.0);
        EXPECT_LT(fit.phase_deg, 180.0);
    }
}

TEST(FitFringe, constant_data_has_zero_visibility) {
    std::vector<FringeSample> samples;
    for (int k = 0; k < 8; ++k) samples.push_back({22.5 * k, 42.0, 1.0});
    auto fit = fit_fringe(samples);
    EXPECT_NEAR(fit.visibility, 0.0, 1e-12);
    EXPECT_NEAR(fit.offset, 42.0, 1e-12);
}

TEST(FitFringe, complementary_ports_are_ninety_degrees_apart) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    std::vector<FringeSample> d1, d2;
    for (int i = 0; i < 12; ++i) {
        double ta = 15.0 * i;
        d1.push_back({ta, 1e4 * conditional_pair_probability(s, {ta, 135.0}, 1, 3), 1.0});
        d2.push_back({ta, 1e4 * conditional_pair_probability(s, {ta, 135.0}, 2, 3), 1.0});
    }
    auto f1 = fit_fringe(d1);
    auto f2 = fit_fringe(d2);
    EXPECT_NEAR(std::abs(std::remainder(f1.phase_deg - f2.phase_deg, 180.0)), 90.0, 1e-6);
    EXPECT_NEAR(f1.visibility, f2.visibility, 1e-9);
    EXPECT_NEAR(f1.offset, f2.offset, 1e-9 * f1.offset);
}

TEST(FitFringe, rejects_poor_designs) {
    std::vector<FringeSample> same(6, FringeSample{30.0, 5.0, 1.0});
    EXPECT_THROW(fit_fringe(same), FitError);
    std::vector<FringeSample> few{{0, 1, 1}, {45, 2, 1}, {90, 1, 1}};
    EXPECT_THROW(fit_fringe(few), FitError);
    std::vector<FringeSample> narrow{{0, 1, 1}, {20, 2, 1}, {40, 1, 1}, {60, 3, 1}};
    EXPECT_THROW(fit_fringe(narrow), FitError);
}

TEST(FitCorrelation, recovers_product_at_forty_five) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    std::vector<CorrelationEstimate> samples;
    for (int i = 0; i < 8; ++i) {
        AnalyzerSetting st{22.5 * i, 45.0};
        samples.push_back(make_estimate(oracle::correlation(s.eta_f, s.phi_f, st.theta_a_deg, 45.0), 0.01, st));
    }
    auto fit = fit_correlation(samples, 45.0);
    EXPECT_TRUE(fit.product_fitted);
    EXPECT_FALSE(fit.visibility_fitted);
    EXPECT_NEAR(fit.product, std::sin(2.0 * s.eta_f), 1e-6);
    EXPECT_NEAR(fit.product, 0.98228725, 1e-6);
    EXPECT_NEAR(fit.product, 0.9829, 1e-3);
}

TEST(FitCorrelation, both_parameters_at_generic_angle) {
    auto s = state(1.12 * kPi / 4.0, 0.3);
    double k = std::cos(0.3) * std::sin(2.0 * s.eta_f);
    for (double tb : {22.5, 30.0, 112.5}) {
        std::vector<CorrelationEstimate> samples;
        for (int i = 0; i < 12; ++i) {
            AnalyzerSetting st{15.0 * i, tb};
            samples.push_back(make_estimate(0.9 * analytic_correlation(s, st), 0.02, st));
        }
        auto fit = fit_correlation(samples, tb);
        EXPECT_TRUE(fit.product_fitted);
        EXPECT_TRUE(fit.visibility_fitted);
        EXPECT_NEAR(fit.visibility, 0.9, 1e-9);
        EXPECT_NEAR(fit.product, k, 1e-9);
        EXPECT_NEAR(fit.amplitude_sum, 0.9 * (1 + k), 1e-9);
        EXPECT_NEAR(fit.amplitude_difference, 0.9 * (1 - k), 1e-9);
    }
}

TEST(FitCorrelation, maximal_entanglement_kills_difference_term) {
    auto s = state(kPi / 4.0, 0.0);
    std::vector<CorrelationEstimate> samples;
    for (int i = 0; i < 8; ++i) {
        AnalyzerSetting st{22.5 * i, 30.0};
        samples.push_back(make_estimate(analytic_correlation(s, st), 0.01, st));
    }
    auto fit = fit_correlation(samples, 30.0);
    EXPECT_NEAR(fit.amplitude_difference, 0.0, 1e-12);
    EXPECT_NEAR(fit.amplitude_sum, 2.0, 1e-12);
}

TEST(FitCorrelation, uniform_background_visibility) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    std::vector<CorrelationEstimate> samples;
    for (int i = 0; i < 12; ++i) {
        AnalyzerSetting st{15.0 * i, 0.0};
        samples.push_back(make_estimate(analytic_correlation(s, st, 0.83), 0.01, st));
    }
    auto fit = fit_correlation(samples, 0.0);
    EXPECT_TRUE(fit.visibility_fitted);
    EXPECT_NEAR(fit.visibility, 0.83, std::max(1e-9, fit.sigma_visibility));
    EXPECT_GT(fit.sigma_visibility, 0.0);
}

TEST(FitCorrelation, rejects_bad_input) {
    std::vector<CorrelationEstimate> three;
    for (int i = 0; i < 3; ++i) three.push_back(make_estimate(0.1, 0.01, {30.0 * i, 0.0}));
    EXPECT_THROW(fit_correlation(three, 0.0), FitError);
    std::vector<CorrelationEstimate> mixed;
    for (int i = 0; i < 6; ++i) mixed.push_back(make_estimate(0.1, 0.01, {30.0 * i, i == 2 ? 45.0 : 0.0}));
    EXPECT_THROW(fit_correlation(mixed, 0.0), std::invalid_argument);
}

TEST(FindOptimalAngles, maximal_entanglement_reaches_tsirelson) {
    auto opt = find_optimal_angles(state(kPi / 4.0, 0.0));
    EXPECT_NEAR(opt.s_value, kTsirelson, 1e-6);
    EXPECT_NEAR(model_chsh(state(kPi / 4.0, 0.0), opt.angles), opt.s_value, 1e-12);
    for (double a : {opt.angles.theta_a, opt.angles.theta_a_prime, opt.angles.theta_b, opt.angles.theta_b_prime}) {
        EXPECT_GE(a, 0.0);
        EXPECT_LT(a, 180.0);
    }
}

TEST(FindOptimalAngles, factorized_state_reaches_two) {
    for (double eta : {0.2, kPi / 4.0, 1.12 * kPi / 4.0, 1.5}) {
        auto opt = find_optimal_angles(state(eta, kPi / 2.0));
        EXPECT_NEAR(opt.s_value, 2.0, 1e-6) << eta;
    }
}

TEST(FindOptimalAngles, beats_default_angles) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    auto opt = find_optimal_angles(s);
    EXPECT_GE(opt.s_value, model_chsh(s, ChshAngles{}));
    EXPECT_GE(opt.s_value, 2.600);
    EXPECT_LE(opt.s_value, kTsirelson + 1e-9);
    // Closed-form optimum of E = -cos2a cos2b + k sin2a sin2b.
    double k = std::sin(2.0 * s.eta_f);
    EXPECT_NEAR(opt.s_value, 2.0 * std::sqrt(1.0 + k * k), 1e-6);
}

TEST(FindOptimalAngles, deterministic_and_scaled_by_visibility) {
    auto s = state(1.0, 0.4);
    auto a = find_optimal_angles(s);
    auto b = find_optimal_angles(s);
    EXPECT_EQ(a.s_value, b.s_value);
    EXPECT_EQ(a.angles.theta_a, b.angles.theta_a);
    EXPECT_EQ(a.angles.theta_b_prime, b.angles.theta_b_prime);
    EXPECT_NEAR(find_optimal_angles(s, 0.5).s_value, 0.5 * a.s_value, 1e-6);
}

TEST(FindOptimalAngles, never_below_default_angles_random_states) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        auto s = state(unit(rng) * kPi / 2.0, unit(rng) * 2.0 * kPi);
        EXPECT_GE(find_optimal_angles(s).s_value + 1e-9, std::abs(model_chsh(s, ChshAngles{})));
    }
}

TEST(ExpectedChsh, ideal_bank_matches_model) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    s.p_pair = 1e-3;
    DetectorBank bank;
    bank.eps = {0.6, 0.5, 0.7, 0.4};
    EXPECT_NEAR(expected_chsh(s, bank, ChshAngles{}), model_chsh(s, ChshAngles{}), 1e-12);
}

TEST(CalibrateDarkProbability, hits_target) {
    auto s = state(1.12 * kPi / 4.0, 0.0);
    s.p_pair = 1e-3;
    DetectorBank bank;
    bank.eps.fill(0.6);
    double p = calibrate_dark_probability(s, bank, ChshAngles{}, 2.16);
    EXPECT_GT(p, 0.0);
    bank.p_dark.fill(p);
    EXPECT_NEAR(expected_chsh(s, bank, ChshAngles{}), 2.16, 1e-6);
    DetectorBank clean;
    clean.eps.fill(0.6);
    EXPECT_THROW(calibrate_dark_probability(s, clean, ChshAngles{}, 2.7), std::invalid_argument);
}
