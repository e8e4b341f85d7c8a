// SPDX-License-Identifier: Apache-2.0
//
// Scenario runner and CSV export.

#ifndef WPBC_RUNNER_HPP
#define WPBC_RUNNER_HPP

#include "wpbc/channel.hpp"
#include "wpbc/optimizer.hpp"
#include "wpbc/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wpbc {

struct ChannelSample {
    double frequency_offset_hz = 0.0;
    double forward_magnitude = 0.0;
    double forward_phase = 0.0;
    double concatenated_magnitude = 0.0;  ///< |h h_r|
};

/// Budget-scaled responses on a `step_hz` grid from -B/2 to +B/2 inclusive.
std::vector<ChannelSample> channel_response_grid(const channel::ChannelRealization& fwd,
                                                 const channel::ChannelRealization& bwd,
                                                 const channel::LinkBudget& budget, double bandwidth_hz,
                                                 double step_hz = 1e3);

/// Forward and backward realizations drawn from one experiment seed.
std::pair<channel::ChannelRealization, channel::ChannelRealization> realize_links(
    const channel::PowerDelayProfile& pdp, std::uint64_t seed);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> points;
    bool parallel = false;
};

struct RunSummary {
    std::vector<std::filesystem::path> files;
    std::size_t failed_points = 0;
};

/// Writes one region file per (B, N) and one channel file per B into out_dir.
/// Config problems (including an unreadable PDP) raise ConfigError before any
/// file is written; filesystem failures raise IoError.
RunSummary run(Scenario scenario, const std::filesystem::path& out_dir, const RunOptions& options = {});

std::string region_file_name(double bandwidth_hz, std::size_t n_tones);
std::string channel_file_name(double bandwidth_hz);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

std::string format_region_csv(const Scenario& s, double bandwidth_hz, std::size_t n_tones, double ass_snr,
                              const std::vector<optimizer::RegionPoint>& points);
std::string format_channel_csv(const Scenario& s, double bandwidth_hz, const std::vector<ChannelSample>& samples);

}  // namespace wpbc

#endif  // WPBC_RUNNER_HPP
