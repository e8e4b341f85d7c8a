// SPDX-License-Identifier: Apache-2.0

#include "wpbc/channel.hpp"
#include "wpbc/gp.hpp"
#include "wpbc/optimizer.hpp"
#include "wpbc/rectenna.hpp"
#include "wpbc/runner.hpp"
#include "wpbc/waveform.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace wpbc;

namespace {

const channel::LinkBudget kLink;
const waveform::PowerBudget kPower(kLink.transmit_power_w());
const auto kRect = optimizer::RectennaModel::from_params(rectenna::RectennaParams{});

channel::ChannelState make_state(std::size_t n) {
    const auto [f, b] = realize_links(channel::model_b_like(), 2017);
    return channel::build_channel_state(f, b, kLink, n, 10e6);
}

void BM_BuildZdcPosynomial(benchmark::State& state) {
    const auto ch = make_state(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rectenna::as_posynomial(ch, kRect.coefficients, 50.0));
}
BENCHMARK(BM_BuildZdcPosynomial)->Arg(4)->Arg(8)->Arg(16);

void BM_EvaluateZdc(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto ch = make_state(n);
    const std::vector<double> s(n, std::sqrt(2.0 * kPower.p / static_cast<double>(n)));
    for (auto _ : state) benchmark::DoNotOptimize(rectenna::z_dc_optimal_phase(s, ch, kRect.coefficients, 50.0));
}
BENCHMARK(BM_EvaluateZdc)->Arg(4)->Arg(8)->Arg(16);

void BM_Condense(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto p = rectenna::as_posynomial(make_state(n), kRect.coefficients, 50.0);
    const std::vector<double> anchor(n, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(gp::condense(p, anchor));
}
BENCHMARK(BM_Condense)->Arg(8)->Arg(16);

void BM_ScaOptimize(benchmark::State& state) {
    const auto ch = make_state(static_cast<std::size_t>(state.range(0)));
    const double target = 0.5 * waveform::ass_snr(ch, kPower);
    for (auto _ : state) benchmark::DoNotOptimize(optimizer::sca_optimize(ch, kPower, kRect, target));
}
BENCHMARK(BM_ScaOptimize)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TraceRegion(benchmark::State& state) {
    const auto ch = make_state(8);
    for (auto _ : state) benchmark::DoNotOptimize(optimizer::trace_region(ch, kPower, kRect, {}, 25));
}
BENCHMARK(BM_TraceRegion)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
