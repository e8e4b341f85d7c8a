// SPDX-License-Identifier: Apache-2.0
//
// Experiment scenario: flat `key = value` text, one setting per line.

#ifndef WPBC_SCENARIO_HPP
#define WPBC_SCENARIO_HPP

#include "wpbc/channel.hpp"
#include "wpbc/optimizer.hpp"
#include "wpbc/rectenna.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpbc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kBuiltinPdp = "model-b-like";

struct Scenario {
    channel::LinkBudget budget;
    /// Built-in profile name or a PDP file path (relative paths resolve against base_dir).
    std::string pdp = kBuiltinPdp;
    std::vector<double> bandwidths_hz{1e6, 10e6};
    std::vector<std::size_t> tone_counts{1, 2, 4, 8, 16};
    channel::ToneGrid grid = channel::ToneGrid::Nested;
    rectenna::RectennaParams rectenna;
    optimizer::SolverConfig solver;
    std::uint64_t seed = 2017;
    std::size_t n_points = 25;
    std::filesystem::path base_dir;

    /// Throws ConfigError.
    void validate() const;
};

Scenario default_scenario();

/// Throws ConfigError on unknown keys, malformed values or missing seed.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario(to_text(s)) reproduces s.
std::string to_text(const Scenario& s);

/// FNV-1a over the canonical text.
std::uint64_t scenario_hash(const Scenario& s);

/// Loads or builds the selected profile. Throws ConfigError.
channel::PowerDelayProfile resolve_pdp(const Scenario& s);

}  // namespace wpbc

#endif  // WPBC_SCENARIO_HPP
