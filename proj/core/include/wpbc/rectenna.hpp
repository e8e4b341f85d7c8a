// SPDX-License-Identifier: Apache-2.0
//
// Fourth-order diode model: Taylor coefficients and the DC-current surrogate
// z_DC = k2 R_ant E{y^2} + k4 R_ant^2 E{y^4}.

#ifndef WPBC_RECTENNA_HPP
#define WPBC_RECTENNA_HPP

#include "wpbc/channel.hpp"
#include "wpbc/gp.hpp"

#include <span>

namespace wpbc::rectenna {

struct RectennaParams {
    double saturation_current_a = 5e-6;
    double ideality = 1.05;
    double thermal_voltage_v = 25.86e-3;
    double antenna_resistance_ohm = 50.0;
    int truncation_order = 4;

    void validate() const;
};

struct DiodeCoefficients {
    double k2 = 0.0;
    double k4 = 0.0;
};

/// k_i = i_s / (i! (n v_t)^i), i = 2, 4.
DiodeCoefficients derive_coefficients(const RectennaParams& p);

/// Quadratic and quartic contributions to z_DC, kept apart for scaling checks.
struct ZdcParts {
    double quadratic = 0.0;
    double quartic = 0.0;
    double total() const { return quadratic + quartic; }
};

/// z_DC for arbitrary transmit phases. The quartic sum runs over all ordered
/// index tuples with n0 + n1 = n2 + n3, weighted by cos(psi0 + psi1 - psi2 - psi3),
/// where psi_n = phi_n + arg(h_n).
ZdcParts z_dc_general_parts(std::span<const double> s, std::span<const double> phi,
                            const channel::ChannelState& ch, const DiodeCoefficients& c, double r_ant);
double z_dc_general(std::span<const double> s, std::span<const double> phi, const channel::ChannelState& ch,
                    const DiodeCoefficients& c, double r_ant);

/// z_DC with matched phases phi_n = -arg(h_n): every cosine equals one.
ZdcParts z_dc_optimal_phase_parts(std::span<const double> s, const channel::ChannelState& ch,
                                  const DiodeCoefficients& c, double r_ant);
double z_dc_optimal_phase(std::span<const double> s, const channel::ChannelState& ch, const DiodeCoefficients& c,
                          double r_ant);

/// Matched-phase z_DC as a posynomial in s_0..s_{N-1}. Quartic tuples sharing
/// an exponent vector are merged; tones with zero forward gain contribute no terms.
gp::Posynomial as_posynomial(const channel::ChannelState& ch, const DiodeCoefficients& c, double r_ant);

/// Number of ordered (n0, n1, n2, n3) tuples in [0, N)^4 with n0 + n1 = n2 + n3.
std::size_t quartic_tuple_count(std::size_t n_tones);

/// Test oracle: synthesises y(t) on one period 1/df of the tone grid and
/// averages y^2 and y^4 numerically. The carrier is replaced by the smallest
/// grid-aligned frequency that keeps all mixing products away from DC, which
/// leaves the DC terms unchanged. Rejects sampling below 8x the highest
/// synthesised harmonic.
double time_domain_oracle(std::span<const double> s, std::span<const double> phi, const channel::ChannelState& ch,
                          const DiodeCoefficients& c, double r_ant, std::size_t samples_per_period);

}  // namespace wpbc::rectenna

#endif  // WPBC_RECTENNA_HPP
