// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference computations. Nothing here calls into the optimizer or
// the GP solver, so they can be used to check those.

#ifndef WPBC_TESTS_ORACLES_HPP
#define WPBC_TESTS_ORACLES_HPP

#include "wpbc/channel.hpp"
#include "wpbc/rectenna.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace wpbc::testing {

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Random per-tone channel on an evenly spaced grid. Magnitudes are drawn
/// log-uniformly over `spread_db` so tones are distinct.
inline channel::ChannelState random_channel(std::mt19937_64& rng, std::size_t n, double fwd_scale = 1.6e-3,
                                            double bwd_scale = 2.5e-3, double noise = 4e-12,
                                            double spread_db = 20.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::complex<double>> h(n), hr(n);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mf = fwd_scale * std::pow(10.0, -spread_db * u(rng) / 20.0);
        const double mb = bwd_scale * std::pow(10.0, -spread_db * u(rng) / 20.0);
        h[i] = std::polar(mf, 2.0 * std::numbers::pi * u(rng));
        hr[i] = std::polar(mb, 2.0 * std::numbers::pi * u(rng));
        f[i] = 5.18e9 + (static_cast<double>(i) - static_cast<double>(n / 2)) * 1.25e6;
    }
    return channel::make_channel_state(std::move(h), std::move(hr), noise, std::move(f), 5.18e9);
}

/// Same magnitude on every tone; phases arbitrary.
inline channel::ChannelState flat_channel(std::size_t n, double a = 1.6e-3, double ar = 2.5e-3, double noise = 4e-12,
                                          std::uint64_t phase_seed = 7) {
    std::mt19937_64 rng(phase_seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::vector<std::complex<double>> h(n), hr(n);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = std::polar(a, u(rng));
        hr[i] = std::polar(ar, u(rng));
        f[i] = 5.18e9 + (static_cast<double>(i) - static_cast<double>(n / 2)) * 1e6;
    }
    return channel::make_channel_state(std::move(h), std::move(hr), noise, std::move(f), 5.18e9);
}

/// Golden-section maximisation of a unimodal-near-the-bracket function.
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && b - a > 1e-15; ++i) {
        if (fc < fd) {
            a = c; c = d; fc = fd; d = a + r * (b - a); fd = f(d);
        } else {
            b = d; d = c; fd = fc; c = b - r * (b - a); fc = f(c);
        }
    }
    return std::max({fc, fd, f(lo), f(hi)});
}

/// Brute-force optimum of the two-tone problem. Both objectives grow with
/// scale, so the search runs over the power split s = sqrt(2P)(cos t, sin t):
/// `grid` points on [0, pi/2], SNR-feasible only, then golden-section polish
/// around the best grid cell.
inline double two_tone_grid_search(const channel::ChannelState& ch, double power,
                                   const rectenna::DiodeCoefficients& c, double r_ant, double snr_target,
                                   int grid = 10000) {
    const double amp = std::sqrt(2.0 * power);
    const double g0 = std::norm(ch.forward[0]) * std::norm(ch.backward[0]) / ch.noise_power;
    const double g1 = std::norm(ch.forward[1]) * std::norm(ch.backward[1]) / ch.noise_power;
    auto snr = [&](double t) { return amp * amp * (g0 * std::cos(t) * std::cos(t) + g1 * std::sin(t) * std::sin(t)); };
    auto z = [&](double t) {
        const double s[2] = {amp * std::cos(t), amp * std::sin(t)};
        return rectenna::z_dc_optimal_phase(s, ch, c, r_ant);
    };
    auto zf = [&](double t) { return snr(t) >= snr_target ? z(t) : -1.0; };
    const double step = std::numbers::pi / 2.0 / grid;
    int best = -1;
    double best_z = -1.0;
    for (int k = 0; k <= grid; ++k) {
        const double v = zf(k * step);
        if (v > best_z) {
            best_z = v;
            best = k;
        }
    }
    if (best < 0) return -1.0;
    const double lo = std::max(0.0, (best - 1) * step);
    const double hi = std::min(std::numbers::pi / 2.0, (best + 1) * step);
    return std::max(best_z, golden_max(zf, lo, hi));
}

}  // namespace wpbc::testing

#endif  // WPBC_TESTS_ORACLES_HPP
