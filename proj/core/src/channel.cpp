// SPDX-License-Identifier: Apache-2.0

#include "wpbc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wpbc::channel {

namespace {

constexpr double kPdpSumTol = 1e-9;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double rms_spread(const std::vector<Tap>& taps) {
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& t : taps) {
        p += t.power;
        m1 += t.power * t.delay_s;
        m2 += t.power * t.delay_s * t.delay_s;
    }
    const double mean = m1 / p;
    return std::sqrt(std::max(0.0, m2 / p - mean * mean));
}

}  // namespace

PowerDelayProfile::PowerDelayProfile(std::vector<Tap> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) throw std::invalid_argument("PowerDelayProfile: no taps");
    double sum = 0.0;
    for (std::size_t l = 0; l < taps_.size(); ++l) {
        const auto& t = taps_[l];
        if (!std::isfinite(t.delay_s) || t.delay_s < 0.0) {
            throw std::invalid_argument("PowerDelayProfile: delays must be nonnegative");
        }
        if (l > 0 && !(t.delay_s > taps_[l - 1].delay_s)) {
            throw std::invalid_argument("PowerDelayProfile: delays must be strictly increasing");
        }
        if (!std::isfinite(t.power) || t.power < 0.0) {
            throw std::invalid_argument("PowerDelayProfile: tap powers must be nonnegative");
        }
        sum += t.power;
    }
    if (std::abs(sum - 1.0) > kPdpSumTol) {
        throw std::invalid_argument("PowerDelayProfile: tap powers must sum to 1");
    }
}

PowerDelayProfile PowerDelayProfile::normalized(std::vector<Tap> taps) {
    double sum = 0.0;
    for (const auto& t : taps) sum += t.power;
    if (!(sum > 0.0)) throw std::invalid_argument("PowerDelayProfile: total power must be positive");
    for (auto& t : taps) t.power /= sum;
    return PowerDelayProfile(std::move(taps));
}

double PowerDelayProfile::rms_delay_spread() const { return rms_spread(taps_); }

PowerDelayProfile model_b_like(std::size_t tap_count, double tap_spacing_s, double rms_delay_spread_s) {
    if (tap_count < 2 || !(tap_spacing_s > 0.0) || !(rms_delay_spread_s > 0.0)) {
        throw std::invalid_argument("model_b_like: need >= 2 taps and positive spacing/spread");
    }
    auto profile = [&](double decay_s) {
        std::vector<Tap> taps(tap_count);
        for (std::size_t l = 0; l < tap_count; ++l) {
            const double d = static_cast<double>(l) * tap_spacing_s;
            taps[l] = {d, std::exp(-d / decay_s)};
        }
        return taps;
    };
    // RMS spread grows monotonically with the decay constant, up to the flat-profile limit.
    double lo = 1e-6 * tap_spacing_s;
    double hi = 1e6 * rms_delay_spread_s;
    if (rms_spread(profile(hi)) < rms_delay_spread_s) {
        throw std::invalid_argument("model_b_like: RMS delay spread not reachable with this tap span");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (rms_spread(profile(mid)) < rms_delay_spread_s ? lo : hi) = mid;
    }
    return PowerDelayProfile::normalized(profile(std::sqrt(lo * hi)));
}

PowerDelayProfile parse_pdp(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool normalize = false;
    bool saw_flag = false;
    std::vector<Tap> taps;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("normalize", 0) == 0) {
            const auto colon = line.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("PDP: malformed normalize header");
            const auto value = trim(line.substr(colon + 1));
            if (value == "true") normalize = true;
            else if (value == "false") normalize = false;
            else throw std::invalid_argument("PDP: normalize must be true or false");
            saw_flag = true;
            continue;
        }
        if (line.rfind("delay_ns", 0) == 0) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double delay_ns = 0.0, power = 0.0;
        std::string rest;
        if (!(fields >> delay_ns >> power) || (fields >> rest)) {
            throw std::invalid_argument("PDP: malformed tap record on line " + std::to_string(lineno));
        }
        taps.push_back({delay_ns * 1e-9, power});
    }
    if (!saw_flag) throw std::invalid_argument("PDP: missing 'normalize: true|false' header");
    return normalize ? PowerDelayProfile::normalized(std::move(taps)) : PowerDelayProfile(std::move(taps));
}

PowerDelayProfile load_pdp(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open PDP file: " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_pdp(ss.str());
}

ChannelRealization realize_channel(const PowerDelayProfile& pdp, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    ChannelRealization r{{}, pdp};
    r.tap_gains.reserve(pdp.size());
    for (const auto& t : pdp.taps()) {
        const double sd = std::sqrt(t.power / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        r.tap_gains.emplace_back(sd * re, sd * im);
    }
    return r;
}

std::vector<cplx> frequency_response(const ChannelRealization& real, std::span<const double> frequency_offsets_hz) {
    if (real.tap_gains.size() != real.pdp.size()) {
        throw std::invalid_argument("frequency_response: tap count does not match PDP");
    }
    std::vector<cplx> h(frequency_offsets_hz.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        cplx acc{0.0, 0.0};
        for (std::size_t l = 0; l < real.tap_gains.size(); ++l) {
            const double phase = -2.0 * std::numbers::pi * frequency_offsets_hz[i] * real.pdp.taps()[l].delay_s;
            acc += real.tap_gains[l] * std::polar(1.0, phase);
        }
        h[i] = acc;
    }
    return h;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

void LinkBudget::validate() const {
    const double all[] = {center_frequency_hz, eirp_dbm, tag_rx_gain_dbi, tag_tx_gain_dbi,
                          reader_rx_gain_dbi, path_loss_forward_db, path_loss_backward_db, noise_power_dbm};
    for (double v : all) {
        if (!std::isfinite(v)) throw std::invalid_argument("LinkBudget: all values must be finite");
    }
    if (!(path_loss_forward_db > 0.0) || !(path_loss_backward_db > 0.0)) {
        throw std::invalid_argument("LinkBudget: path losses must be positive (dB)");
    }
    if (!(center_frequency_hz > 0.0)) throw std::invalid_argument("LinkBudget: center frequency must be positive");
}

double LinkBudget::transmit_power_w() const { return dbm_to_watts(eirp_dbm); }
double LinkBudget::noise_power_w() const { return dbm_to_watts(noise_power_dbm); }

std::vector<double> tone_offsets(std::size_t n_tones, double bandwidth_hz, ToneGrid grid) {
    if (n_tones < 1) throw std::invalid_argument("tone_offsets: need at least one tone");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
        throw std::invalid_argument("tone_offsets: bandwidth must be positive");
    }
    const double spacing = bandwidth_hz / static_cast<double>(n_tones);
    std::vector<double> f(n_tones);
    for (std::size_t n = 0; n < n_tones; ++n) {
        const double idx = static_cast<double>(n);
        const double origin = grid == ToneGrid::Symmetric ? (static_cast<double>(n_tones) - 1.0) / 2.0
                                                          : static_cast<double>(n_tones / 2);
        f[n] = (idx - origin) * spacing;
    }
    return f;
}

void ChannelState::validate() const {
    const std::size_t n = forward.size();
    if (n < 1) throw std::invalid_argument("ChannelState: need at least one tone");
    if (backward.size() != n || tone_frequencies.size() != n) {
        throw std::invalid_argument("ChannelState: forward/backward/frequency lengths differ");
    }
    if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
        throw std::invalid_argument("ChannelState: noise power must be positive");
    }
}

ChannelState make_channel_state(std::vector<cplx> forward, std::vector<cplx> backward, double noise_power,
                                std::vector<double> tone_frequencies, double center_frequency_hz) {
    ChannelState s{std::move(forward), std::move(backward), noise_power, std::move(tone_frequencies),
                   center_frequency_hz};
    s.validate();
    return s;
}

ChannelState build_channel_state(const ChannelRealization& fwd, const ChannelRealization& bwd,
                                 const LinkBudget& budget, std::size_t n_tones, double bandwidth_hz,
                                 ToneGrid grid) {
    budget.validate();
    const auto offsets = tone_offsets(n_tones, bandwidth_hz, grid);
    auto h = frequency_response(fwd, offsets);
    auto hr = frequency_response(bwd, offsets);
    const double af = std::sqrt(std::pow(10.0, budget.forward_power_gain_db() / 10.0));
    const double ab = std::sqrt(std::pow(10.0, budget.backward_power_gain_db() / 10.0));
    for (auto& v : h) v *= af;
    for (auto& v : hr) v *= ab;
    std::vector<double> freqs(offsets.size());
    std::transform(offsets.begin(), offsets.end(), freqs.begin(),
                   [&](double o) { return budget.center_frequency_hz + o; });
    return make_channel_state(std::move(h), std::move(hr), budget.noise_power_w(), std::move(freqs),
                              budget.center_frequency_hz);
}

}  // namespace wpbc::channel
