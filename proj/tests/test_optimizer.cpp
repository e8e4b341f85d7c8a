// SPDX-License-Identifier: Apache-2.0

#include "wpbc/optimizer.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace wpbc;
using namespace wpbc::optimizer;
using wpbc::testing::rel_diff;

namespace {

const waveform::PowerBudget kBudget(3.981071705534972);
const RectennaModel kRect = RectennaModel::from_params(rectenna::RectennaParams{});

double z_of(const std::vector<double>& s, const channel::ChannelState& ch) {
    return rectenna::z_dc_optimal_phase(s, ch, kRect.coefficients, kRect.antenna_resistance_ohm);
}

}  // namespace

TEST_CASE("sca_optimize: two tones against exhaustive search") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ch = testing::random_channel(rng, 2);
        const double ass = waveform::ass_snr(ch, kBudget);
        for (double frac : {0.0, 0.5, 0.9}) {
            const double target = frac * ass;
            const auto r = sca_optimize(ch, kBudget, kRect, target);
            // Optima on a single tone are approached linearly; 100 iterations leave ~2e-5.
            REQUIRE((r.status == ScaStatus::Converged || r.status == ScaStatus::IterationCapped));
            const double oracle = testing::two_tone_grid_search(ch, kBudget.p, kRect.coefficients,
                                                                kRect.antenna_resistance_ohm, target);
            CHECK(r.z_dc >= oracle * (1.0 - 1e-4));
            CHECK(r.z_dc <= oracle * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("sca_optimize: ASS endpoint") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ch = testing::random_channel(rng, 8);
        const double ass = waveform::ass_snr(ch, kBudget);
        const auto r = sca_optimize(ch, kBudget, kRect, ass);
        REQUIRE(r.status == ScaStatus::Converged);
        const auto a = waveform::ass_waveform(ch, kBudget);
        CHECK(rel_diff(r.achieved_snr, ass) < 1e-9);
        CHECK(rel_diff(r.z_dc, z_of(a.amplitudes, ch)) < 1e-9);
        for (std::size_t n = 0; n < ch.size(); ++n) {
            if (n != waveform::strongest_tone(ch)) CHECK(r.waveform.amplitudes[n] == 0.0);
        }
    }
}

TEST_CASE("sca_optimize: single tone is trivial") {
    std::mt19937_64 rng(3);
    const auto ch = testing::random_channel(rng, 1);
    for (double target : {0.0, 0.5 * waveform::ass_snr(ch, kBudget)}) {
        const auto r = sca_optimize(ch, kBudget, kRect, target);
        CHECK(r.status == ScaStatus::Converged);
        CHECK(r.waveform.amplitudes[0] == doctest::Approx(std::sqrt(2.0 * kBudget.p)));
        CHECK(r.waveform.power() == doctest::Approx(kBudget.p).epsilon(1e-14));
    }
}

TEST_CASE("sca_optimize: infeasible target") {
    std::mt19937_64 rng(4);
    const auto ch = testing::random_channel(rng, 4);
    const double ass = waveform::ass_snr(ch, kBudget);
    const auto r = sca_optimize(ch, kBudget, kRect, ass * 1.01);
    CHECK(r.status == ScaStatus::InfeasibleTarget);
    CHECK_THROWS_AS(sca_optimize(ch, kBudget, kRect, -1.0), std::invalid_argument);
    SolverConfig bad;
    bad.i_max = 0;
    CHECK_THROWS_AS(sca_optimize(ch, kBudget, kRect, 0.0, bad), std::invalid_argument);
}

TEST_CASE("sca_optimize: monotone, conservative and anchored iterates") {
    std::mt19937_64 rng(55);
    const SolverConfig cfg;
    for (int trial = 0; trial < 6; ++trial) {
        const auto ch = testing::random_channel(rng, 8);
        const double ass = waveform::ass_snr(ch, kBudget);
        for (double frac : {0.0, 0.3, 0.7, 0.95}) {
            const double target = frac * ass;
            const auto r = sca_optimize(ch, kBudget, kRect, target, cfg);
            REQUIRE(r.status != ScaStatus::SolverFailure);
            for (std::size_t i = 1; i < r.z_dc_trajectory.size(); ++i) {
                CHECK(r.z_dc_trajectory[i] >= r.z_dc_trajectory[i - 1] * (1.0 - cfg.gp_tol));
            }
            for (const auto& it : r.iterates) {
                CHECK(it.power <= kBudget.p * (1.0 + 1e-9));
                CHECK(it.snr >= target * (1.0 - 1e-9));
                CHECK(it.z_anchor_gap < 1e-9);
                CHECK(it.snr_anchor_gap < 1e-9);
                CHECK(it.gamma_sum == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(it.beta_sum == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(it.weights_nonnegative);
            }
            CHECK(r.achieved_snr >= target * (1.0 - cfg.snr_feasibility_margin));
            CHECK(r.waveform.power() == doctest::Approx(kBudget.p).epsilon(1e-12));
        }
    }
}

TEST_CASE("sca_optimize: warm start never loses to the default start") {
    std::mt19937_64 rng(60);
    const auto ch = testing::random_channel(rng, 8);
    const double target = 0.5 * waveform::ass_snr(ch, kBudget);
    const auto cold = sca_optimize(ch, kBudget, kRect, target);
    const auto warm = sca_optimize(ch, kBudget, kRect, target, {}, cold.waveform.amplitudes);
    CHECK(warm.z_dc >= cold.z_dc * (1.0 - 1e-8));
    CHECK_THROWS_AS(sca_optimize(ch, kBudget, kRect, target, {}, std::vector<double>(3, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("trace_region") {
    std::mt19937_64 rng(77);
    const SolverConfig cfg;
    SUBCASE("two points are the endpoints") {
        const auto ch = testing::random_channel(rng, 4);
        const auto pts = trace_region(ch, kBudget, kRect, cfg, 2);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0].snr_target == 0.0);
        CHECK(pts[1].snr_target == waveform::ass_snr(ch, kBudget));
        CHECK_THROWS_AS(trace_region(ch, kBudget, kRect, cfg, 1), std::invalid_argument);
    }
    SUBCASE("flat channel gives a rectangle") {
        const auto ch = testing::flat_channel(4);
        const auto pts = trace_region(ch, kBudget, kRect, cfg, 6);
        const double ass = waveform::ass_snr(ch, kBudget);
        for (const auto& p : pts) {
            REQUIRE(p.ok());
            CHECK(rel_diff(p.achieved_snr, ass) < 1e-9);
            CHECK(rel_diff(p.z_dc, pts.front().z_dc) < 2.0 * cfg.gp_tol);
        }
    }
    SUBCASE("selective channel: z_dc non-increasing in the target") {
        const auto ch = testing::random_channel(rng, 8);
        const auto pts = trace_region(ch, kBudget, kRect, cfg, 12);
        for (std::size_t j = 1; j < pts.size(); ++j) {
            REQUIRE(pts[j].ok());
            CHECK(pts[j].z_dc <= pts[j - 1].z_dc * (1.0 + 2.0 * cfg.gp_tol));
            CHECK(pts[j].achieved_snr >= pts[j].snr_target * (1.0 - cfg.snr_feasibility_margin));
        }
    }
    SUBCASE("parallel matches sequential without warm start") {
        const auto ch = testing::random_channel(rng, 6);
        const auto seq = trace_region(ch, kBudget, kRect, cfg, 8, {false, false});
        const auto par = trace_region(ch, kBudget, kRect, cfg, 8, {false, true});
        REQUIRE(seq.size() == par.size());
        for (std::size_t j = 0; j < seq.size(); ++j) {
            CHECK(seq[j].z_dc == par[j].z_dc);
            CHECK(seq[j].waveform.amplitudes == par[j].waveform.amplitudes);
        }
    }
}

TEST_CASE("region_dominates") {
    auto pt = [](double snr, double z) {
        RegionPoint p;
        p.snr_target = snr;
        p.achieved_snr = snr;
        p.z_dc = z;
        return p;
    };
    const std::vector<RegionPoint> big{pt(0, 10), pt(5, 8), pt(10, 2)};
    const std::vector<RegionPoint> small{pt(0, 9), pt(5, 7), pt(9, 2)};
    CHECK(region_dominates(big, big, 0.0));
    CHECK(region_dominates(big, small, 0.0));
    CHECK_FALSE(region_dominates(small, big, 0.0));
    // Linear interpolation between (5, 8) and (10, 2): at snr 7.5 the boundary is 5.
    CHECK(region_dominates(big, {pt(7.5, 5.0)}, 0.0));
    CHECK_FALSE(region_dominates(big, {pt(7.5, 5.1)}, 0.0));
    CHECK(region_dominates(big, {pt(7.5, 5.04)}, 0.01));
    CHECK_FALSE(region_dominates(big, {pt(10.5, 1.0)}, 0.0));

    SUBCASE("richer tone set on the same realisation") {
        std::mt19937_64 rng(2024);
        const auto pdp = channel::model_b_like();
        const auto fwd = channel::realize_channel(pdp, 11);
        const auto bwd = channel::realize_channel(pdp, 12);
        const channel::LinkBudget lb;
        const SolverConfig cfg;
        auto region = [&](std::size_t n) {
            const auto ch = channel::build_channel_state(fwd, bwd, lb, n, 10e6);
            return trace_region(ch, waveform::PowerBudget(lb.transmit_power_w()), kRect, cfg, 8);
        };
        const auto r1 = region(1), r2 = region(2), r4 = region(4);
        CHECK(region_dominates(r2, r1, 0.01));
        CHECK(region_dominates(r4, r2, 0.01));
        // A single tone rarely covers the 4-tone region.
        const double a1 = r1.back().achieved_snr, a4 = r4.back().achieved_snr;
        if (a4 > a1 * 1.02) CHECK_FALSE(region_dominates(r1, r4, 0.01));
    }
}
