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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qlink {

namespace {

constexpr double kAngleMatchTolerance = 1e-9;

bool same_angle(double a, double b) {
    double d = wrap_half_turn_deg(a - b);
    return d < kAngleMatchTolerance || 180.0 - d < kAngleMatchTolerance;
}

// Weighted linear least squares on y = a + b cos(2t) + c sin(2t).
struct HarmonicFit {
    std::array<double, 3> coef{};
    std::array<std::array<double, 3>, 3> cov{};
    double chi_square = 0.0;
    double max_abs_residual = 0.0;
    int dof = 0;
};

std::array<double, 3> basis(double theta_deg) {
    double t = 2.0 * deg_to_rad(theta_deg);
    return {1.0, std::cos(t), std::sin(t)};
}

HarmonicFit fit_harmonic(std::span<const double> theta_deg, std::span<const double> y, std::span<const double> sigma) {
    const std::size_t n = theta_deg.size();
    if (n < 4) {
        throw FitError("sinusoid fit needs at least 4 samples, got " + std::to_string(n));
    }
    auto [lo, hi] = std::minmax_element(theta_deg.begin(), theta_deg.end());
    if (*hi - *lo < 90.0) {
        throw FitError("sample angles must span at least 90 degrees");
    }

    bool uniform = std::any_of(sigma.begin(), sigma.end(), [](double s) { return !(s > 0.0); });
    std::array<std::array<double, 3>, 3> normal{};
    std::array<double, 3> rhs{};
    for (std::size_t i = 0; i < n; ++i) {
        auto f = basis(theta_deg[i]);
        double w = uniform ? 1.0 : 1.0 / (sigma[i] * sigma[i]);
        for (int r = 0; r < 3; ++r) {
            rhs[r] += w * f[r] * y[i];
            for (int c = 0; c < 3; ++c) normal[r][c] += w * f[r] * f[c];
        }
    }

    // 3x3 inverse by cofactors.
    const auto &m = normal;
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    double scale = m[0][0] * m[1][1] * m[2][2];
    if (!(std::abs(det) > 1e-12 * std::abs(scale))) {
        throw FitError("degenerate sinusoid design; sample angles do not constrain the fit");
    }
    HarmonicFit out;
    auto &inv = out.cov;
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;

    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) out.coef[r] += inv[r][c] * rhs[c];
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto f = basis(theta_deg[i]);
        double residual = y[i] - (out.coef[0] * f[0] + out.coef[1] * f[1] + out.coef[2] * f[2]);
        double w = uniform ? 1.0 : 1.0 / (sigma[i] * sigma[i]);
        out.chi_square += w * residual * residual;
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(residual));
    }
    out.dof = static_cast<int>(n) - 3;
    return out;
}

// Variance of g(coef) = grad . coef under covariance `cov`.
double propagate(const std::array<double, 3> &grad, const std::array<std::array<double, 3>, 3> &cov) {
    double var = 0.0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) var += grad[r] * cov[r][c] * grad[c];
    }
    return std::sqrt(std::max(var, 0.0));
}

}  // namespace

CorrelationEstimate estimate_E(const CoincidenceCounts &counts, const AnalyzerSetting &setting) {
    std::uint64_t n = counts.total();
    if (n == 0) {
        throw NoDataError("no coincidences recorded at theta_a=" + std::to_string(setting.theta_a_deg) +
                          ", theta_b=" + std::to_string(setting.theta_b_deg));
    }
    double plus = static_cast<double>(counts.at(1, 3) + counts.at(2, 4));
    double minus = static_cast<double>(counts.at(1, 4) + counts.at(2, 3));
    double total = static_cast<double>(n);

    CorrelationEstimate est;
    est.e_value = (plus - minus) / total;
    est.sigma = std::sqrt(std::max(0.0, 1.0 - est.e_value * est.e_value) / total);
    est.setting = setting;
    est.n_coincidences = n;
    return est;
}

CorrelationEstimate estimate_E_poisson(const CoincidenceCounts &counts, const AnalyzerSetting &setting) {
    CorrelationEstimate est = estimate_E(counts, setting);
    double total = static_cast<double>(est.n_coincidences);
    double plus = static_cast<double>(counts.at(1, 3) + counts.at(2, 4));
    double minus = static_cast<double>(counts.at(1, 4) + counts.at(2, 3));
    // dE/dC = +2 minus / N^2 for the "+" counters, -2 plus / N^2 for the others.
    double d_plus = 2.0 * minus / (total * total);
    double d_minus = 2.0 * plus / (total * total);
    double var = 0.0;
    var += d_plus * d_plus * static_cast<double>(counts.at(1, 3));
    var += d_plus * d_plus * static_cast<double>(counts.at(2, 4));
    var += d_minus * d_minus * static_cast<double>(counts.at(1, 4));
    var += d_minus * d_minus * static_cast<double>(counts.at(2, 3));
    est.sigma = std::sqrt(var);
    return est;
}

std::array<AnalyzerSetting, 4> ChshAngles::settings() const {
    return {AnalyzerSetting{theta_a, theta_b}, AnalyzerSetting{theta_a_prime, theta_b},
            AnalyzerSetting{theta_a, theta_b_prime}, AnalyzerSetting{theta_a_prime, theta_b_prime}};
}

BellResult chsh_S(const CorrelationEstimate &e1,
                  const CorrelationEstimate &e2,
                  const CorrelationEstimate &e3,
                  const CorrelationEstimate &e4) {
    const auto &s1 = e1.setting;
    const auto &s2 = e2.setting;
    const auto &s3 = e3.setting;
    const auto &s4 = e4.setting;
    bool roles = same_angle(s1.theta_a_deg, s3.theta_a_deg) && same_angle(s2.theta_a_deg, s4.theta_a_deg) &&
                 same_angle(s1.theta_b_deg, s2.theta_b_deg) && same_angle(s3.theta_b_deg, s4.theta_b_deg);
    if (!roles) {
        throw std::invalid_argument("estimates must be ordered (a,b), (a',b), (a,b'), (a',b')");
    }
    if (same_angle(s1.theta_a_deg, s2.theta_a_deg) || same_angle(s1.theta_b_deg, s3.theta_b_deg)) {
        throw std::invalid_argument("CHSH settings must use two distinct angles per site");
    }

    BellResult out;
    out.s_value = e1.e_value + e2.e_value + e3.e_value - e4.e_value;
    out.sigma = std::sqrt(e1.sigma * e1.sigma + e2.sigma * e2.sigma + e3.sigma * e3.sigma + e4.sigma * e4.sigma);
    out.angles = ChshAngles{s1.theta_a_deg, s2.theta_a_deg, s1.theta_b_deg, s3.theta_b_deg};
    out.estimates = {e1, e2, e3, e4};
    return out;
}

FringeFit fit_fringe(std::span<const FringeSample> samples) {
    std::vector<double> theta, y, sigma;
    theta.reserve(samples.size());
    y.reserve(samples.size());
    sigma.reserve(samples.size());
    for (const auto &s : samples) {
        theta.push_back(s.theta_deg);
        y.push_back(s.count);
        sigma.push_back(s.sigma);
    }
    HarmonicFit h = fit_harmonic(theta, y, sigma);
    auto [a, b, c] = h.coef;
    if (!(a > 0.0)) {
        throw FitError("fringe offset is not positive");
    }

    FringeFit out;
    out.offset = a;
    out.amplitude = std::hypot(b, c);
    out.visibility = out.amplitude / a;
    out.chi_square = h.chi_square;
    out.dof = h.dof;
    out.max_abs_residual = h.max_abs_residual;
    out.sigma_offset = std::sqrt(std::max(h.cov[0][0], 0.0));

    double r = out.amplitude;
    if (r > 0.0) {
        out.phase_deg = wrap_half_turn_deg(rad_to_deg(0.5 * std::atan2(c, b)));
        out.sigma_amplitude = propagate({0.0, b / r, c / r}, h.cov);
        out.sigma_phase_deg = rad_to_deg(propagate({0.0, -0.5 * c / (r * r), 0.5 * b / (r * r)}, h.cov));
        out.sigma_visibility = propagate({-r / (a * a), b / (r * a), c / (r * a)}, h.cov);
    } else {
        out.phase_deg = 0.0;
        out.sigma_amplitude = std::sqrt(std::max(0.5 * (h.cov[1][1] + h.cov[2][2]), 0.0));
        out.sigma_phase_deg = std::numeric_limits<double>::infinity();
        out.sigma_visibility = out.sigma_amplitude / a;
    }
    return out;
}

CorrelationFit fit_correlation(std::span<const CorrelationEstimate> samples, double theta_b_deg, double assumed_visibility) {
    std::vector<double> theta, y, sigma;
    for (const auto &s : samples) {
        if (!same_angle(s.setting.theta_b_deg, theta_b_deg)) {
            throw std::invalid_argument("correlation sample taken at a different theta_b");
        }
        theta.push_back(s.setting.theta_a_deg);
        y.push_back(s.e_value);
        sigma.push_back(s.sigma);
    }
    HarmonicFit h = fit_harmonic(theta, y, sigma);
    auto [a, b, c] = h.coef;

    // E = -V cos(2a) cos(2b) + V k sin(2a) sin(2b)
    double cb = std::cos(2.0 * deg_to_rad(theta_b_deg));
    double sb = std::sin(2.0 * deg_to_rad(theta_b_deg));
    constexpr double kIdentifiable = 1e-6;

    CorrelationFit out;
    out.offset = a;
    out.fringe_amplitude = std::hypot(b, c);
    out.phase_deg = out.fringe_amplitude > 0.0 ? wrap_half_turn_deg(rad_to_deg(0.5 * std::atan2(c, b))) : 0.0;
    out.chi_square = h.chi_square;
    out.dof = h.dof;

    double sigma_v = 0.0;
    if (std::abs(cb) > kIdentifiable) {
        out.visibility = -b / cb;
        sigma_v = std::sqrt(std::max(h.cov[1][1], 0.0)) / std::abs(cb);
        out.visibility_fitted = true;
    } else {
        out.visibility = assumed_visibility;
    }
    out.sigma_visibility = sigma_v;

    double vk = 0.0;
    double sigma_vk = 0.0;
    if (std::abs(sb) > kIdentifiable) {
        vk = c / sb;
        sigma_vk = std::sqrt(std::max(h.cov[2][2], 0.0)) / std::abs(sb);
        out.product_fitted = true;
    } else {
        vk = out.visibility;
    }
    out.product = out.visibility != 0.0 ? vk / out.visibility : 0.0;
    if (out.product_fitted && out.visibility != 0.0) {
        double rel = std::hypot(sigma_vk / out.visibility, vk * sigma_v / (out.visibility * out.visibility));
        out.sigma_product = rel;
    }
    out.amplitude_sum = out.visibility + vk;
    out.amplitude_difference = out.visibility - vk;
    return out;
}

double model_chsh(const EffectiveTwoPhotonState &state, const ChshAngles &angles, double visibility) {
    auto s = angles.settings();
    return analytic_correlation(state, s[0], visibility) + analytic_correlation(state, s[1], visibility) +
           analytic_correlation(state, s[2], visibility) - analytic_correlation(state, s[3], visibility);
}

OptimalAngles find_optimal_angles(const EffectiveTwoPhotonState &state, double visibility) {
    constexpr int kGrid = 180;
    constexpr double kTie = 1e-12;

    // table[a][b] = E(a deg, b deg).
    std::vector<double> table(kGrid * kGrid);
    for (int a = 0; a < kGrid; ++a) {
        for (int b = 0; b < kGrid; ++b) {
            table[a * kGrid + b] = analytic_correlation(state, AnalyzerSetting{double(a), double(b)}, visibility);
        }
    }

    // S separates into max_a [E(a,b) + E(a,b')] + max_a' [E(a',b) - E(a',b')].
    std::array<int, 4> best_quad{0, 0, 0, 0};
    double best = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < kGrid; ++b) {
        for (int bp = 0; bp < kGrid; ++bp) {
            int arg_f = 0;
            int arg_g = 0;
            double max_f = -std::numeric_limits<double>::infinity();
            double max_g = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < kGrid; ++a) {
                double f = table[a * kGrid + b] + table[a * kGrid + bp];
                double g = table[a * kGrid + b] - table[a * kGrid + bp];
                if (f > max_f + kTie) {
                    max_f = f;
                    arg_f = a;
                }
                if (g > max_g + kTie) {
                    max_g = g;
                    arg_g = a;
                }
            }
            double s = max_f + max_g;
            std::array<int, 4> quad{arg_f, arg_g, b, bp};
            if (s > best + kTie || (std::abs(s - best) <= kTie && quad < best_quad)) {
                best = s;
                best_quad = quad;
            }
        }
    }

    std::array<double, 4> x{double(best_quad[0]), double(best_quad[1]), double(best_quad[2]), double(best_quad[3])};
    auto objective = [&](const std::array<double, 4> &v) {
        return model_chsh(state, ChshAngles{v[0], v[1], v[2], v[3]}, visibility);
    };
    double value = objective(x);
    for (double step = 0.5; step > 1e-10; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int i = 0; i < 4; ++i) {
                for (double dir : {1.0, -1.0}) {
                    std::array<double, 4> trial = x;
                    trial[i] += dir * step;
                    double v = objective(trial);
                    if (v > value + kTie) {
                        value = v;
                        x = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
    }

    OptimalAngles out;
    out.angles = ChshAngles{wrap_half_turn_deg(x[0]), wrap_half_turn_deg(x[1]), wrap_half_turn_deg(x[2]),
                            wrap_half_turn_deg(x[3])};
    out.s_value = objective({out.angles.theta_a, out.angles.theta_a_prime, out.angles.theta_b, out.angles.theta_b_prime});
    return out;
}

double expected_chsh(const EffectiveTwoPhotonState &state,
                     const DetectorBank &bank,
                     const ChshAngles &angles,
                     bool symmetrize) {
    auto settings = angles.settings();
    std::array<double, 4> e{};
    for (int i = 0; i < 4; ++i) {
        auto p = symmetrize ? expected_symmetrized_coincidences(state, settings[i], bank)
                            : expected_coincidences(state, settings[i], bank);
        double total = p[0] + p[1] + p[2] + p[3];
        if (!(total > 0.0)) {
            throw NoDataError("model predicts no coincidences");
        }
        e[i] = (p[0] + p[3] - p[1] - p[2]) / total;
    }
    return e[0] + e[1] + e[2] - e[3];
}

double calibrate_dark_probability(const EffectiveTwoPhotonState &state,
                                  const DetectorBank &bank,
                                  const ChshAngles &angles,
                                  double target_s) {
    auto s_at = [&](double p_dark) {
        DetectorBank b = bank;
        b.p_dark.fill(p_dark);
        return expected_chsh(state, b, angles, true);
    };
    double lo = 0.0;
    double s_lo = s_at(lo);
    if (target_s > s_lo) {
        throw std::invalid_argument("target S exceeds the background-free value");
    }
    double hi = 1e-7;
    while (s_at(hi) > target_s) {
        lo = hi;
        hi *= 2.0;
        if (hi > 0.5) {
            throw std::invalid_argument("target S not reachable with dark clicks alone");
        }
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (s_at(mid) > target_s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace qlink
