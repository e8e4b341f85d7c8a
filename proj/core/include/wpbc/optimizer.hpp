// SPDX-License-Identifier: Apache-2.0
//
// Successive convex approximation for the energy-maximising waveform under
// power and SNR constraints, and SNR / DC-current region tracing.

#ifndef WPBC_OPTIMIZER_HPP
#define WPBC_OPTIMIZER_HPP

#include "wpbc/channel.hpp"
#include "wpbc/rectenna.hpp"
#include "wpbc/waveform.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace wpbc::optimizer {

struct RectennaModel {
    rectenna::DiodeCoefficients coefficients;
    double antenna_resistance_ohm = 50.0;

    static RectennaModel from_params(const rectenna::RectennaParams& p);
};

struct SolverConfig {
    /// Absolute stop threshold on |z_DC^(i) - z_DC^(i-1)|, in z_DC units.
    double epsilon = 1e-15;
    /// Relative backstop: also stop once |dz| / z < this.
    double relative_epsilon = 1e-10;
    int i_max = 100;
    double gp_tol = 1e-8;
    int max_newton_iters = 500;
    double snr_feasibility_margin = 1e-6;
    /// Extra randomised starting points; 1 means the deterministic blend only.
    int multi_start = 1;
    std::uint64_t multi_start_seed = 0;

    void validate() const;
};

enum class ScaStatus { Converged, IterationCapped, InfeasibleTarget, SolverFailure };

std::string_view to_string(ScaStatus status);

/// Per-iteration bookkeeping, kept so callers can audit the iteration.
struct ScaIterate {
    std::vector<double> amplitudes;  ///< full-length s after this iteration
    double z_dc = 0.0;
    double snr = 0.0;
    double power = 0.0;
    /// |condensed(anchor) - original(anchor)| / original(anchor)
    double z_anchor_gap = 0.0;
    double snr_anchor_gap = 0.0;
    double gamma_sum = 1.0;
    double beta_sum = 1.0;
    bool weights_nonnegative = true;
    gp::GpStatus gp_status = gp::GpStatus::Optimal;
};

struct ScaResult {
    waveform::Waveform waveform;
    double z_dc = 0.0;
    double achieved_snr = 0.0;
    int iterations = 0;
    /// z_DC at the initial point followed by every iterate.
    std::vector<double> z_dc_trajectory;
    std::vector<ScaIterate> iterates;
    ScaStatus status = ScaStatus::IterationCapped;
};

/// Maximises matched-phase z_DC subject to (1/2)||s||^2 <= P and rho(s) >= snr_target.
///
/// Targets within the feasibility margin of the ASS SNR are solved over the
/// tones tied for the strongest concatenated gain only; a unique strongest
/// tone gives the ASS waveform directly.
ScaResult sca_optimize(const channel::ChannelState& ch, const waveform::PowerBudget& budget,
                       const RectennaModel& rect, double snr_target, const SolverConfig& cfg = {},
                       const std::optional<std::vector<double>>& s_init = std::nullopt);

/// Strictly feasible blended start: normalize(alpha e_best + (1 - alpha) u) at
/// full power, alpha the smallest value meeting snr_target (1 + margin).
std::vector<double> blended_start(const channel::ChannelState& ch, const waveform::PowerBudget& budget,
                                  double snr_target, double margin);

struct RegionPoint {
    double snr_target = 0.0;
    double achieved_snr = 0.0;
    double z_dc = 0.0;
    waveform::Waveform waveform;
    ScaStatus status = ScaStatus::Converged;
    int iterations = 0;

    bool ok() const { return status == ScaStatus::Converged || status == ScaStatus::IterationCapped; }
};

struct TraceOptions {
    /// Sweep from the ASS end downwards, seeding each point with its
    /// neighbour's solution in addition to the blended start.
    bool warm_start = true;
    /// Evaluate targets on worker threads. Only honoured without warm starts.
    bool parallel = false;
};

/// n_points targets evenly spanning [0, ASS SNR], sorted by target.
std::vector<RegionPoint> trace_region(const channel::ChannelState& ch, const waveform::PowerBudget& budget,
                                      const RectennaModel& rect, const SolverConfig& cfg, std::size_t n_points,
                                      const TraceOptions& options = {});

/// True iff every point of b lies under the upper boundary of a (linearly
/// interpolated in SNR), allowing a relative slack of tol on both axes.
bool region_dominates(const std::vector<RegionPoint>& a, const std::vector<RegionPoint>& b, double tol);

}  // namespace wpbc::optimizer

#endif  // WPBC_OPTIMIZER_HPP
