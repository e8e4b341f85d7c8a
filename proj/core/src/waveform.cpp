// SPDX-License-Identifier: Apache-2.0

#include "wpbc/waveform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wpbc::waveform {

PowerBudget::PowerBudget(double watts) : p(watts) {
    if (!(watts > 0.0) || !std::isfinite(watts)) throw std::invalid_argument("PowerBudget: power must be positive");
}

double transmit_power(std::span<const double> s) {
    double acc = 0.0;
    for (double v : s) acc += v * v;
    return 0.5 * acc;
}

double Waveform::power() const { return transmit_power(amplitudes); }

void Waveform::validate() const {
    if (amplitudes.size() != phases.size()) throw std::invalid_argument("Waveform: amplitude/phase length mismatch");
    for (double v : amplitudes) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("Waveform: amplitudes must be nonnegative");
    }
}

void Waveform::check_budget(const PowerBudget& budget) const {
    validate();
    if (power() > budget.p * (1.0 + 1e-9)) throw std::invalid_argument("Waveform: exceeds transmit power budget");
}

double snr(std::span<const double> s, const channel::ChannelState& ch) {
    ch.validate();
    if (s.size() != ch.size()) {
        throw std::invalid_argument("snr: expected " + std::to_string(ch.size()) + " amplitudes, got " +
                                    std::to_string(s.size()));
    }
    double acc = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) {
        const double g = std::norm(ch.forward[n]) * std::norm(ch.backward[n]);
        acc += g * s[n] * s[n];
    }
    return acc / ch.noise_power;
}

std::vector<double> matched_phases(const channel::ChannelState& ch) {
    ch.validate();
    std::vector<double> phi(ch.size());
    for (std::size_t n = 0; n < phi.size(); ++n) phi[n] = -std::arg(ch.forward[n]);
    return phi;
}

std::size_t strongest_tone(const channel::ChannelState& ch) {
    ch.validate();
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t n = 0; n < ch.size(); ++n) {
        const double g = ch.forward_gain(n) * ch.backward_gain(n);
        if (g > best_gain) {
            best_gain = g;
            best = n;
        }
    }
    return best;
}

Waveform ass_waveform(const channel::ChannelState& ch, const PowerBudget& budget) {
    const std::size_t best = strongest_tone(ch);
    Waveform w;
    w.amplitudes.assign(ch.size(), 0.0);
    w.amplitudes[best] = std::sqrt(2.0 * budget.p);
    w.phases = matched_phases(ch);
    w.center_frequency_hz = ch.center_frequency_hz;
    w.tone_spacing_hz = ch.size() > 1 ? ch.tone_frequencies[1] - ch.tone_frequencies[0] : 0.0;
    return w;
}

double ass_snr(const channel::ChannelState& ch, const PowerBudget& budget) {
    const std::size_t best = strongest_tone(ch);
    const double g = ch.forward_gain(best) * ch.backward_gain(best);
    return 2.0 * budget.p * g * g / ch.noise_power;
}

gp::Posynomial snr_as_posynomial(const channel::ChannelState& ch) {
    ch.validate();
    const std::size_t n = ch.size();
    std::vector<gp::Monomial> terms;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = std::norm(ch.forward[i]) * std::norm(ch.backward[i]) / ch.noise_power;
        if (!(g > 0.0)) continue;
        std::vector<double> a(n, 0.0);
        a[i] = 2.0;
        terms.emplace_back(g, std::move(a));
    }
    if (terms.empty()) throw std::invalid_argument("snr_as_posynomial: every tone has zero concatenated gain");
    return gp::Posynomial(std::move(terms));
}

}  // namespace wpbc::waveform
