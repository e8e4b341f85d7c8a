// SPDX-License-Identifier: Apache-2.0

#include "wpbc/rectenna.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wpbc::rectenna {

namespace {

void check_lengths(std::size_t n, std::size_t got, const char* what) {
    if (n != got) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + " tones, got " +
                                    std::to_string(got));
    }
}

void check_amplitudes(std::span<const double> s, const char* what) {
    for (double v : s) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": amplitudes must be nonnegative");
        }
    }
}

// Visits every ordered tuple with n0 + n1 = n2 + n3.
template <typename F>
void for_each_quartic_tuple(std::size_t n, F&& f) {
    const auto ni = static_cast<long>(n);
    for (long n0 = 0; n0 < ni; ++n0)
        for (long n1 = 0; n1 < ni; ++n1)
            for (long n2 = 0; n2 < ni; ++n2) {
                const long n3 = n0 + n1 - n2;
                if (n3 < 0 || n3 >= ni) continue;
                f(static_cast<std::size_t>(n0), static_cast<std::size_t>(n1), static_cast<std::size_t>(n2),
                  static_cast<std::size_t>(n3));
            }
}

}  // namespace

void RectennaParams::validate() const {
    if (!(saturation_current_a > 0.0) || !(ideality > 0.0) || !(thermal_voltage_v > 0.0) ||
        !(antenna_resistance_ohm > 0.0)) {
        throw std::invalid_argument("RectennaParams: all parameters must be strictly positive");
    }
    if (truncation_order != 4) {
        throw std::invalid_argument("RectennaParams: only truncation order 4 is supported");
    }
}

DiodeCoefficients derive_coefficients(const RectennaParams& p) {
    p.validate();
    const double nvt = p.ideality * p.thermal_voltage_v;
    return {p.saturation_current_a / (2.0 * nvt * nvt), p.saturation_current_a / (24.0 * std::pow(nvt, 4))};
}

std::size_t quartic_tuple_count(std::size_t n_tones) {
    std::size_t count = 0;
    for_each_quartic_tuple(n_tones, [&](auto, auto, auto, auto) { ++count; });
    return count;
}

ZdcParts z_dc_general_parts(std::span<const double> s, std::span<const double> phi, const channel::ChannelState& ch,
                            const DiodeCoefficients& c, double r_ant) {
    ch.validate();
    const std::size_t n = ch.size();
    check_lengths(n, s.size(), "z_dc_general");
    check_lengths(n, phi.size(), "z_dc_general");
    check_amplitudes(s, "z_dc_general");

    std::vector<double> u(n), psi(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = s[i] * std::abs(ch.forward[i]);
        psi[i] = phi[i] + std::arg(ch.forward[i]);
    }
    double quad = 0.0;
    for (double v : u) quad += v * v;
    double quart = 0.0;
    for_each_quartic_tuple(n, [&](std::size_t a, std::size_t b, std::size_t d, std::size_t e) {
        quart += u[a] * u[b] * u[d] * u[e] * std::cos(psi[a] + psi[b] - psi[d] - psi[e]);
    });
    return {c.k2 / 2.0 * r_ant * quad, 3.0 * c.k4 / 8.0 * r_ant * r_ant * quart};
}

double z_dc_general(std::span<const double> s, std::span<const double> phi, const channel::ChannelState& ch,
                    const DiodeCoefficients& c, double r_ant) {
    return z_dc_general_parts(s, phi, ch, c, r_ant).total();
}

ZdcParts z_dc_optimal_phase_parts(std::span<const double> s, const channel::ChannelState& ch,
                                  const DiodeCoefficients& c, double r_ant) {
    ch.validate();
    const std::size_t n = ch.size();
    check_lengths(n, s.size(), "z_dc_optimal_phase");
    check_amplitudes(s, "z_dc_optimal_phase");
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = s[i] * std::abs(ch.forward[i]);
    double quad = 0.0;
    for (double v : u) quad += v * v;
    double quart = 0.0;
    for_each_quartic_tuple(n, [&](std::size_t a, std::size_t b, std::size_t d, std::size_t e) {
        quart += u[a] * u[b] * u[d] * u[e];
    });
    return {c.k2 / 2.0 * r_ant * quad, 3.0 * c.k4 / 8.0 * r_ant * r_ant * quart};
}

double z_dc_optimal_phase(std::span<const double> s, const channel::ChannelState& ch, const DiodeCoefficients& c,
                          double r_ant) {
    return z_dc_optimal_phase_parts(s, ch, c, r_ant).total();
}

gp::Posynomial as_posynomial(const channel::ChannelState& ch, const DiodeCoefficients& c, double r_ant) {
    ch.validate();
    const std::size_t n = ch.size();
    std::vector<double> amp(n);
    for (std::size_t i = 0; i < n; ++i) amp[i] = std::abs(ch.forward[i]);

    std::vector<gp::Monomial> terms;
    const double c2 = c.k2 / 2.0 * r_ant;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(amp[i] > 0.0)) continue;
        std::vector<double> a(n, 0.0);
        a[i] = 2.0;
        terms.emplace_back(c2 * amp[i] * amp[i], std::move(a));
    }

    // Sorted index multiset identifies the exponent vector.
    std::map<std::array<std::size_t, 4>, double> merged;
    for_each_quartic_tuple(n, [&](std::size_t a, std::size_t b, std::size_t d, std::size_t e) {
        const double prod = amp[a] * amp[b] * amp[d] * amp[e];
        if (!(prod > 0.0)) return;
        std::array<std::size_t, 4> key{a, b, d, e};
        std::sort(key.begin(), key.end());
        merged[key] += prod;
    });
    const double c4 = 3.0 * c.k4 / 8.0 * r_ant * r_ant;
    for (const auto& [key, prod] : merged) {
        std::vector<double> a(n, 0.0);
        for (std::size_t idx : key) a[idx] += 1.0;
        terms.emplace_back(c4 * prod, std::move(a));
    }
    if (terms.empty()) throw std::invalid_argument("as_posynomial: every tone has zero forward gain");
    return gp::Posynomial(std::move(terms));
}

double time_domain_oracle(std::span<const double> s, std::span<const double> phi, const channel::ChannelState& ch,
                          const DiodeCoefficients& c, double r_ant, std::size_t samples_per_period) {
    ch.validate();
    const std::size_t n = ch.size();
    check_lengths(n, s.size(), "time_domain_oracle");
    check_lengths(n, phi.size(), "time_domain_oracle");
    check_amplitudes(s, "time_domain_oracle");

    // Integer tone positions on the grid f_n = f_min + m_n * df.
    const auto [fmin_it, fmax_it] = std::minmax_element(ch.tone_frequencies.begin(), ch.tone_frequencies.end());
    double df = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = std::abs(ch.tone_frequencies[i] - ch.tone_frequencies[i - 1]);
        if (d > 0.0) df = df == 0.0 ? d : std::min(df, d);
    }
    if (df == 0.0) df = 1.0;
    std::vector<long> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = (ch.tone_frequencies[i] - *fmin_it) / df;
        m[i] = std::lround(pos);
        if (std::abs(pos - static_cast<double>(m[i])) > 1e-6) {
            throw std::invalid_argument("time_domain_oracle: tone grid is not commensurate");
        }
    }
    const long span = std::lround((*fmax_it - *fmin_it) / df);
    const long carrier = span + 1;
    const long highest = carrier + span;
    if (samples_per_period < 8 * static_cast<std::size_t>(highest)) {
        throw std::invalid_argument("time_domain_oracle: sampling density below 8x the highest harmonic");
    }

    std::vector<double> amp(n), psi(n);
    for (std::size_t i = 0; i < n; ++i) {
        amp[i] = s[i] * std::abs(ch.forward[i]);
        psi[i] = phi[i] + std::arg(ch.forward[i]);
    }
    const double samples = static_cast<double>(samples_per_period);
    double e2 = 0.0, e4 = 0.0;
    for (std::size_t k = 0; k < samples_per_period; ++k) {
        const double tau = 2.0 * std::numbers::pi * static_cast<double>(k) / samples;
        double y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y += amp[i] * std::cos(static_cast<double>(carrier + m[i]) * tau + psi[i]);
        }
        const double y2 = y * y;
        e2 += y2;
        e4 += y2 * y2;
    }
    e2 /= samples;
    e4 /= samples;
    return c.k2 * r_ant * e2 + c.k4 * r_ant * r_ant * e4;
}

}  // namespace wpbc::rectenna
