// SPDX-License-Identifier: Apache-2.0
//
// Tapped-delay-line channels, per-tone frequency responses and link budget.

#ifndef WPBC_CHANNEL_HPP
#define WPBC_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace wpbc::channel {

using cplx = std::complex<double>;

struct Tap {
    double delay_s = 0.0;
    double power = 0.0;  ///< average power beta_l (linear)
};

/// Delays strictly increasing and nonnegative, powers summing to one.
class PowerDelayProfile {
public:
    explicit PowerDelayProfile(std::vector<Tap> taps);

    /// Scales powers to sum to one, then validates.
    static PowerDelayProfile normalized(std::vector<Tap> taps);

    const std::vector<Tap>& taps() const { return taps_; }
    std::size_t size() const { return taps_.size(); }
    double rms_delay_spread() const;

private:
    std::vector<Tap> taps_;
};

/// Exponentially decaying NLOS profile: uniformly spaced taps whose decay is
/// chosen so the RMS delay spread hits `rms_delay_spread_s`.
PowerDelayProfile model_b_like(std::size_t tap_count = 64, double tap_spacing_s = 10e-9,
                               double rms_delay_spread_s = 100e-9);

/// Reads a tap table. Format:
///
///     # comment
///     normalize: true
///     delay_ns, power_linear
///     0, 0.5
///     10, 0.3
///
/// Columns may be separated by commas or whitespace; the column-name line is optional.
PowerDelayProfile load_pdp(const std::filesystem::path& path);
PowerDelayProfile parse_pdp(const std::string& text);

struct ChannelRealization {
    std::vector<cplx> tap_gains;
    PowerDelayProfile pdp;
};

/// Independent CN(0, beta_l) tap gains; deterministic in `seed`.
ChannelRealization realize_channel(const PowerDelayProfile& pdp, std::uint64_t seed);

/// h(f) = sum_l g_l exp(-j 2 pi f tau_l), f measured from the carrier.
std::vector<cplx> frequency_response(const ChannelRealization& real, std::span<const double> frequency_offsets_hz);

struct LinkBudget {
    double center_frequency_hz = 5.18e9;
    double eirp_dbm = 36.0;
    double tag_rx_gain_dbi = 2.0;
    double tag_tx_gain_dbi = 2.0;
    double reader_rx_gain_dbi = 2.0;
    double path_loss_forward_db = 58.0;
    double path_loss_backward_db = 58.0;
    double noise_power_dbm = -84.0;

    void validate() const;

    /// Transmit power constraint P (EIRP in watts).
    double transmit_power_w() const;
    /// Power gain applied to |h|^2 (antenna gains folded in).
    double forward_power_gain_db() const { return tag_rx_gain_dbi - path_loss_forward_db; }
    double backward_power_gain_db() const {
        return tag_tx_gain_dbi - path_loss_backward_db + reader_rx_gain_dbi;
    }
    double tag_receive_power_dbm() const { return eirp_dbm + forward_power_gain_db(); }
    double reader_receive_power_dbm() const { return tag_receive_power_dbm() + backward_power_gain_db(); }
    double noise_power_w() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

enum class ToneGrid {
    /// Offsets (n - floor(N/2)) * B/N. Always has a tone on the carrier, and
    /// the N/2 grid is a subset of the N grid, so one realization re-sampled
    /// at N = 1, 2, 4, ... yields nested tone sets.
    Nested,
    /// Offsets (n - (N-1)/2) * B/N: mirror-symmetric about the carrier, no
    /// carrier tone for even N.
    Symmetric,
};

std::vector<double> tone_offsets(std::size_t n_tones, double bandwidth_hz, ToneGrid grid = ToneGrid::Nested);

struct ChannelState {
    std::vector<cplx> forward;   ///< h_n, budget-scaled
    std::vector<cplx> backward;  ///< h_{r,n}, budget-scaled
    double noise_power = 1.0;    ///< sigma^2 in watts
    std::vector<double> tone_frequencies;  ///< absolute, Hz
    double center_frequency_hz = 0.0;

    std::size_t size() const { return forward.size(); }
    void validate() const;

    double forward_gain(std::size_t n) const { return std::abs(forward[n]); }
    double backward_gain(std::size_t n) const { return std::abs(backward[n]); }
};

ChannelState build_channel_state(const ChannelRealization& fwd, const ChannelRealization& bwd,
                                 const LinkBudget& budget, std::size_t n_tones, double bandwidth_hz,
                                 ToneGrid grid = ToneGrid::Nested);

/// Builds a state directly from per-tone responses (unit test and synthetic use).
ChannelState make_channel_state(std::vector<cplx> forward, std::vector<cplx> backward, double noise_power,
                                std::vector<double> tone_frequencies, double center_frequency_hz);

}  // namespace wpbc::channel

#endif  // WPBC_CHANNEL_HPP
