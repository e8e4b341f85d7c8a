// SPDX-License-Identifier: Apache-2.0

#include "wpbc/rectenna.hpp"
#include "wpbc/waveform.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace wpbc;
using namespace wpbc::rectenna;
using wpbc::testing::rel_diff;

namespace {

const DiodeCoefficients kCoeffs = derive_coefficients(RectennaParams{});
constexpr double kR = 50.0;

std::vector<double> random_amplitudes(std::mt19937_64& rng, std::size_t n, double scale = 2.0) {
    std::uniform_real_distribution<double> u(0.0, scale);
    std::vector<double> s(n);
    for (auto& v : s) v = u(rng);
    return s;
}

std::vector<double> random_phases(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    std::vector<double> p(n);
    for (auto& v : p) v = u(rng);
    return p;
}

}  // namespace

TEST_CASE("derive_coefficients") {
    const auto c = derive_coefficients(RectennaParams{});
    // Independently computed: i_s / (2 (n v_t)^2), i_s / (24 (n v_t)^4).
    CHECK(c.k2 == doctest::Approx(0.003390817137410622).epsilon(1e-14));
    CHECK(c.k4 == doctest::Approx(0.38325469531191875).epsilon(1e-14));
    CHECK(rel_diff(c.k2, 0.0034) < 0.005);
    CHECK(rel_diff(c.k4, 0.3829) < 0.005);

    RectennaParams doubled;
    doubled.saturation_current_a *= 2.0;
    const auto d = derive_coefficients(doubled);
    CHECK(d.k2 == doctest::Approx(2.0 * c.k2));
    CHECK(d.k4 == doctest::Approx(2.0 * c.k4));

    RectennaParams bad;
    bad.truncation_order = 6;
    CHECK_THROWS_AS(derive_coefficients(bad), std::invalid_argument);
    bad = RectennaParams{};
    bad.ideality = 0.0;
    CHECK_THROWS_AS(derive_coefficients(bad), std::invalid_argument);
}

TEST_CASE("quartic tuple enumeration") {
    // (2N^3 + N) / 3, checked against brute-force enumeration in the reference script.
    const std::size_t expected[] = {1, 6, 19, 44, 85, 146, 231, 344};
    for (std::size_t n = 1; n <= 8; ++n) CHECK(quartic_tuple_count(n) == expected[n - 1]);
}

TEST_CASE("z_dc_general: zero input and single tone closed form") {
    std::mt19937_64 rng(3);
    const auto ch = testing::random_channel(rng, 1);
    const std::vector<double> zero{0.0}, phi{0.3};
    CHECK(z_dc_general(zero, phi, ch, kCoeffs, kR) == 0.0);

    const double s0 = 2.1;
    const double a = std::abs(ch.forward[0]);
    const std::vector<double> s{s0}, matched{-std::arg(ch.forward[0])};
    const double closed = kCoeffs.k2 / 2.0 * kR * s0 * s0 * a * a +
                          3.0 * kCoeffs.k4 / 8.0 * kR * kR * std::pow(s0 * a, 4);
    CHECK(rel_diff(z_dc_general(s, matched, ch, kCoeffs, kR), closed) < 1e-14);
    CHECK(rel_diff(time_domain_oracle(s, matched, ch, kCoeffs, kR, 64), closed) < 1e-10);
}

TEST_CASE("z_dc_general matches the time-domain oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
        const auto ch = testing::random_channel(rng, n);
        const auto s = random_amplitudes(rng, n);
        const auto phi = random_phases(rng, n);
        const double z = z_dc_general(s, phi, ch, kCoeffs, kR);
        CHECK(rel_diff(z, time_domain_oracle(s, phi, ch, kCoeffs, kR, 1u << 14)) < 1e-9);
    }
}

TEST_CASE("time_domain_oracle: errors") {
    std::mt19937_64 rng(1);
    const auto ch = testing::random_channel(rng, 4);
    const std::vector<double> s(4, 1.0), phi(4, 0.0);
    CHECK(time_domain_oracle(std::vector<double>(4, 0.0), phi, ch, kCoeffs, kR, 1024) == 0.0);
    // Highest synthesised harmonic is 7 for N = 4, so 56 samples is the floor.
    CHECK_THROWS_AS(time_domain_oracle(s, phi, ch, kCoeffs, kR, 55), std::invalid_argument);
    CHECK_NOTHROW(time_domain_oracle(s, phi, ch, kCoeffs, kR, 56));

    auto odd = ch;
    odd.tone_frequencies[2] += 0.3e6;
    CHECK_THROWS_AS(time_domain_oracle(s, phi, odd, kCoeffs, kR, 4096), std::invalid_argument);
}

TEST_CASE("z_dc_optimal_phase") {
    std::mt19937_64 rng(5);
    SUBCASE("equals the general form at matched phases") {
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
            const auto ch = testing::random_channel(rng, n);
            const auto s = random_amplitudes(rng, n);
            CHECK(rel_diff(z_dc_optimal_phase(s, ch, kCoeffs, kR),
                           z_dc_general(s, waveform::matched_phases(ch), ch, kCoeffs, kR)) < 1e-13);
        }
    }
    SUBCASE("flat-phase channel needs no phase correction") {
        auto ch = testing::random_channel(rng, 5);
        for (auto& h : ch.forward) h = std::abs(h);
        const auto s = random_amplitudes(rng, 5);
        CHECK(rel_diff(z_dc_optimal_phase(s, ch, kCoeffs, kR),
                       z_dc_general(s, std::vector<double>(5, 0.0), ch, kCoeffs, kR)) < 1e-14);
    }
    SUBCASE("matched phases dominate random phases") {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
            const auto ch = testing::random_channel(rng, n);
            const auto s = random_amplitudes(rng, n);
            const auto phi = random_phases(rng, n);
            CHECK(z_dc_general(s, phi, ch, kCoeffs, kR) <= z_dc_optimal_phase(s, ch, kCoeffs, kR) * (1.0 + 1e-14));
        }
    }
    SUBCASE("scaling law: quadratic part ~ c^2, quartic part ~ c^4") {
        const auto ch = testing::random_channel(rng, 6);
        const auto s = random_amplitudes(rng, 6);
        auto scaled = s;
        for (auto& v : scaled) v *= 1.7;
        const auto a = z_dc_optimal_phase_parts(s, ch, kCoeffs, kR);
        const auto b = z_dc_optimal_phase_parts(scaled, ch, kCoeffs, kR);
        CHECK(b.quadratic / a.quadratic == doctest::Approx(1.7 * 1.7).epsilon(1e-13));
        CHECK(b.quartic / a.quartic == doctest::Approx(std::pow(1.7, 4)).epsilon(1e-13));
    }
    SUBCASE("dimension mismatch") {
        const auto ch = testing::random_channel(rng, 3);
        CHECK_THROWS_AS(z_dc_optimal_phase(std::vector<double>(2, 1.0), ch, kCoeffs, kR), std::invalid_argument);
        CHECK_THROWS_AS(z_dc_general(std::vector<double>(3, 1.0), std::vector<double>(2, 0.0), ch, kCoeffs, kR),
                        std::invalid_argument);
    }
}

TEST_CASE("as_posynomial") {
    std::mt19937_64 rng(9);
    SUBCASE("single tone has two monomials") {
        const auto ch = testing::random_channel(rng, 1);
        const auto p = as_posynomial(ch, kCoeffs, kR);
        REQUIRE(p.size() == 2);
        CHECK(p.terms()[0].exponents()[0] == 2.0);
        CHECK(p.terms()[1].exponents()[0] == 4.0);
    }
    SUBCASE("merged term counts") {
        // Distinct sorted multisets from brute-force enumeration: 1, 3, 7, 13, 22, 34, 50, 70.
        const std::size_t merged[] = {1, 3, 7, 13, 22, 34, 50, 70};
        for (std::size_t n = 1; n <= 8; ++n) {
            const auto ch = testing::random_channel(rng, n);
            CHECK(as_posynomial(ch, kCoeffs, kR).size() == n + merged[n - 1]);
        }
    }
    SUBCASE("evaluation matches the matched-phase form") {
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
            const auto ch = testing::random_channel(rng, n);
            auto s = random_amplitudes(rng, n);
            for (auto& v : s) v += 1e-3;
            CHECK(rel_diff(gp::evaluate(as_posynomial(ch, kCoeffs, kR), s), z_dc_optimal_phase(s, ch, kCoeffs, kR)) <
                  1e-12);
        }
    }
    SUBCASE("zero-gain tones contribute nothing") {
        auto ch = testing::random_channel(rng, 3);
        ch.forward[1] = 0.0;
        const auto p = as_posynomial(ch, kCoeffs, kR);
        for (const auto& t : p.terms()) CHECK(t.exponents()[1] == 0.0);
        const std::vector<double> s{1.0, 1.0, 1.0};
        CHECK(rel_diff(gp::evaluate(p, s), z_dc_optimal_phase(s, ch, kCoeffs, kR)) < 1e-12);
    }
}
