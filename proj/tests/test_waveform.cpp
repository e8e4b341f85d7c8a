// SPDX-License-Identifier: Apache-2.0

#include "wpbc/waveform.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace wpbc;
using namespace wpbc::waveform;
using wpbc::testing::rel_diff;

namespace {

channel::ChannelState identity_channel(std::size_t n) {
    return channel::make_channel_state(std::vector<channel::cplx>(n, 1.0), std::vector<channel::cplx>(n, 1.0), 1.0,
                                       std::vector<double>(n, 0.0), 0.0);
}

// Random point on (1/2)||s||^2 = P.
std::vector<double> random_allocation(std::mt19937_64& rng, std::size_t n, double p) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(n);
    double sq = 0.0;
    for (auto& v : s) {
        v = u(rng);
        sq += v * v;
    }
    for (auto& v : s) v *= std::sqrt(2.0 * p / sq);
    return s;
}

}  // namespace

TEST_CASE("snr examples") {
    std::mt19937_64 rng(2);
    const auto ch = testing::random_channel(rng, 4);
    CHECK(snr(std::vector<double>(4, 0.0), ch) == 0.0);

    const double p = 3.0;
    CHECK(snr(std::vector{std::sqrt(2.0 * p)}, identity_channel(1)) == doctest::Approx(2.0 * p));

    const auto flat = testing::flat_channel(6);
    const double expected = 2.0 * p * std::pow(1.6e-3 * 2.5e-3, 2) / 4e-12;
    for (int k = 0; k < 50; ++k) {
        CHECK(rel_diff(snr(random_allocation(rng, 6, p), flat), expected) < 1e-12);
    }
    CHECK_THROWS_AS(snr(std::vector<double>(3, 1.0), ch), std::invalid_argument);
}

TEST_CASE("snr ignores phases") {
    std::mt19937_64 rng(4);
    const auto ch = testing::random_channel(rng, 5);
    const std::vector<double> s{0.3, 1.2, 0.0, 2.0, 0.7};
    const double base = snr(s, ch);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < 20; ++k) {
        auto rotated = ch;
        for (auto& h : rotated.forward) h *= std::polar(1.0, u(rng));
        for (auto& h : rotated.backward) h *= std::polar(1.0, u(rng));
        CHECK(snr(s, rotated) == doctest::Approx(base).epsilon(1e-14));
    }
}

TEST_CASE("matched_phases") {
    auto ch = identity_channel(3);
    for (double p : matched_phases(ch)) CHECK(p == 0.0);
    ch.forward.assign(3, std::polar(1.0, std::numbers::pi / 3.0));
    for (double p : matched_phases(ch)) CHECK(p == doctest::Approx(-std::numbers::pi / 3.0));

    std::mt19937_64 rng(8);
    const auto rc = testing::random_channel(rng, 6);
    const auto phi = matched_phases(rc);
    // Every psi_n = phi_n + arg(h_n) vanishes, hence every quartic cosine argument.
    for (std::size_t n = 0; n < 6; ++n) CHECK(std::abs(phi[n] + std::arg(rc.forward[n])) < 1e-15);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b)
            for (std::size_t c = 0; c < 6; ++c) {
                const long d = static_cast<long>(a + b) - static_cast<long>(c);
                if (d < 0 || d >= 6) continue;
                const auto psi = [&](std::size_t i) { return phi[i] + std::arg(rc.forward[i]); };
                CHECK(std::abs(psi(a) + psi(b) - psi(c) - psi(static_cast<std::size_t>(d))) < 1e-14);
            }
}

TEST_CASE("ass_waveform") {
    const PowerBudget budget(2.0);
    SUBCASE("flat channel picks tone 0") {
        const auto w = ass_waveform(testing::flat_channel(5), budget);
        CHECK(w.amplitudes[0] == doctest::Approx(2.0));
        for (std::size_t n = 1; n < 5; ++n) CHECK(w.amplitudes[n] == 0.0);
    }
    SUBCASE("unique maximum") {
        auto ch = identity_channel(6);
        for (std::size_t n = 0; n < 6; ++n) ch.forward[n] = 0.1 * static_cast<double>(n + 1);
        ch.forward[3] = 2.0;
        const auto w = ass_waveform(ch, budget);
        CHECK(strongest_tone(ch) == 3);
        CHECK(w.amplitudes[3] == doctest::Approx(2.0));
        CHECK(snr(w.amplitudes, ch) == doctest::Approx(2.0 * budget.p * 4.0));
        CHECK(ass_snr(ch, budget) == doctest::Approx(2.0 * budget.p * 4.0));
        CHECK(w.power() == doctest::Approx(budget.p));
    }
    SUBCASE("dominates random feasible allocations") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 20; ++trial) {
            const auto ch = testing::random_channel(rng, 8);
            const double best = ass_snr(ch, budget);
            for (int k = 0; k < 100; ++k) CHECK(snr(random_allocation(rng, 8, budget.p), ch) <= best);
        }
    }
}

TEST_CASE("snr_as_posynomial") {
    std::mt19937_64 rng(12);
    const auto ch1 = testing::random_channel(rng, 1);
    const auto p1 = snr_as_posynomial(ch1);
    REQUIRE(p1.size() == 1);
    CHECK(p1.terms()[0].coefficient() ==
          doctest::Approx(std::norm(ch1.forward[0] * ch1.backward[0]) / ch1.noise_power));

    for (int trial = 0; trial < 20; ++trial) {
        const auto ch = testing::random_channel(rng, 7);
        std::vector<double> s(7);
        std::uniform_real_distribution<double> u(0.01, 2.0);
        for (auto& v : s) v = u(rng);
        CHECK(rel_diff(gp::evaluate(snr_as_posynomial(ch), s), snr(s, ch)) < 1e-13);
    }

    auto null = testing::random_channel(rng, 4);
    null.backward[2] = 0.0;
    const auto pn = snr_as_posynomial(null);
    CHECK(pn.size() == 3);
    const std::vector<double> s{0.5, 1.0, 1.5, 2.0};
    CHECK(rel_diff(gp::evaluate(pn, s), snr(s, null)) < 1e-13);

    auto dead = identity_channel(2);
    dead.backward.assign(2, 0.0);
    CHECK_THROWS_AS(snr_as_posynomial(dead), std::invalid_argument);
}

TEST_CASE("waveform and budget validation") {
    CHECK_THROWS_AS(PowerBudget(0.0), std::invalid_argument);
    Waveform w;
    w.amplitudes = {1.0, 1.0};
    w.phases = {0.0};
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
    w.phases = {0.0, 0.0};
    CHECK_NOTHROW(w.check_budget(PowerBudget(1.0)));
    CHECK_THROWS_AS(w.check_budget(PowerBudget(0.99)), std::invalid_argument);
}
