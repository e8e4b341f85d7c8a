// SPDX-License-Identifier: Apache-2.0
//
// Multisine waveform, transmit power budget, reader SNR after MRC and the
// adaptive single-sinewave (ASS) baseline.

#ifndef WPBC_WAVEFORM_HPP
#define WPBC_WAVEFORM_HPP

#include "wpbc/channel.hpp"
#include "wpbc/gp.hpp"

#include <span>
#include <vector>

namespace wpbc::waveform {

struct PowerBudget {
    double p = 1.0;  ///< watts; constraint is (1/2)||s||^2 <= p

    explicit PowerBudget(double watts);
};

struct Waveform {
    std::vector<double> amplitudes;  ///< s_n >= 0
    std::vector<double> phases;      ///< phi_n, radians
    double center_frequency_hz = 0.0;
    double tone_spacing_hz = 0.0;

    std::size_t size() const { return amplitudes.size(); }
    /// (1/2)||s||^2
    double power() const;
    void validate() const;
    /// Throws unless power() <= budget.p within 1e-9 relative.
    void check_budget(const PowerBudget& budget) const;
};

/// (1/2)||s||^2
double transmit_power(std::span<const double> s);

/// rho(s) = sum_n A_{r,n}^2 A_n^2 s_n^2 / sigma^2
double snr(std::span<const double> s, const channel::ChannelState& ch);

/// phi*_n = -arg(h_n)
std::vector<double> matched_phases(const channel::ChannelState& ch);

/// Index maximising A_n A_{r,n}; ties go to the lowest index.
std::size_t strongest_tone(const channel::ChannelState& ch);

/// All power on the strongest concatenated tone, matched phases.
Waveform ass_waveform(const channel::ChannelState& ch, const PowerBudget& budget);

/// SNR of the ASS waveform: 2P (A_nbar A_{r,nbar})^2 / sigma^2.
double ass_snr(const channel::ChannelState& ch, const PowerBudget& budget);

/// rho(s) as a posynomial; tones with A_n A_{r,n} = 0 are omitted.
gp::Posynomial snr_as_posynomial(const channel::ChannelState& ch);

}  // namespace wpbc::waveform

#endif  // WPBC_WAVEFORM_HPP
