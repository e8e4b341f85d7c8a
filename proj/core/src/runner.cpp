// SPDX-License-Identifier: Apache-2.0

#include "wpbc/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace wpbc {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string bandwidth_tag(double bandwidth_hz) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%gMHz", bandwidth_hz / 1e6);
    return buf;
}

std::string header(const Scenario& s, const char* kind, double bandwidth_hz) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(scenario_hash(s)));
    std::ostringstream o;
    o << "# wpbc " << kind << "\n"
      << "# scenario_hash: " << hash << "\n"
      << "# seed: " << s.seed << "\n"
      << "# bandwidth_hz: " << num(bandwidth_hz) << "\n"
      << "# pdp: " << s.pdp << "\n"
      << "# solver: epsilon=" << num(s.solver.epsilon) << " relative_epsilon=" << num(s.solver.relative_epsilon)
      << " i_max=" << s.solver.i_max << " gp_tol=" << num(s.solver.gp_tol)
      << " max_newton_iters=" << s.solver.max_newton_iters
      << " snr_feasibility_margin=" << num(s.solver.snr_feasibility_margin)
      << " multi_start=" << s.solver.multi_start << "\n";
    return o.str();
}

double to_db(double linear) { return linear > 0.0 ? 10.0 * std::log10(linear) : -INFINITY; }

}  // namespace

std::pair<channel::ChannelRealization, channel::ChannelRealization> realize_links(
    const channel::PowerDelayProfile& pdp, std::uint64_t seed) {
    return {channel::realize_channel(pdp, seed), channel::realize_channel(pdp, seed ^ 0x9e3779b97f4a7c15ull)};
}

std::vector<ChannelSample> channel_response_grid(const channel::ChannelRealization& fwd,
                                                 const channel::ChannelRealization& bwd,
                                                 const channel::LinkBudget& budget, double bandwidth_hz,
                                                 double step_hz) {
    if (!(bandwidth_hz > 0.0) || !(step_hz > 0.0)) throw std::invalid_argument("channel grid: bad bandwidth/step");
    const auto steps = static_cast<std::size_t>(std::llround(bandwidth_hz / step_hz));
    std::vector<double> f(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) f[i] = -bandwidth_hz / 2.0 + static_cast<double>(i) * step_hz;
    f.back() = bandwidth_hz / 2.0;
    const auto h = channel::frequency_response(fwd, f);
    const auto hr = channel::frequency_response(bwd, f);
    const double af = std::sqrt(std::pow(10.0, budget.forward_power_gain_db() / 10.0));
    const double ab = std::sqrt(std::pow(10.0, budget.backward_power_gain_db() / 10.0));
    std::vector<ChannelSample> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto hf = af * h[i];
        out[i] = {f[i], std::abs(hf), std::arg(hf), std::abs(hf * ab * hr[i])};
    }
    return out;
}

std::string region_file_name(double bandwidth_hz, std::size_t n_tones) {
    return "region_B" + bandwidth_tag(bandwidth_hz) + "_N" + std::to_string(n_tones) + ".csv";
}

std::string channel_file_name(double bandwidth_hz) { return "channel_B" + bandwidth_tag(bandwidth_hz) + ".csv"; }

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + tmp.string());
        f << contents;
        f.flush();
        if (!f) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string format_region_csv(const Scenario& s, double bandwidth_hz, std::size_t n_tones, double ass_snr,
                              const std::vector<optimizer::RegionPoint>& points) {
    std::ostringstream o;
    o << header(s, "region", bandwidth_hz) << "# tones: " << n_tones << "\n"
      << "# ass_snr: " << num(ass_snr) << "\n"
      << "snr_target,snr_target_db,achieved_snr,achieved_snr_db,z_dc,status,iterations,amplitudes\n";
    for (const auto& p : points) {
        o << num(p.snr_target) << ',' << num(to_db(p.snr_target)) << ',' << num(p.achieved_snr) << ','
          << num(to_db(p.achieved_snr)) << ',' << num(p.z_dc) << ',' << optimizer::to_string(p.status) << ','
          << p.iterations << ',';
        for (std::size_t i = 0; i < p.waveform.amplitudes.size(); ++i) {
            o << (i ? ";" : "") << num(p.waveform.amplitudes[i]);
        }
        o << '\n';
    }
    return o.str();
}

std::string format_channel_csv(const Scenario& s, double bandwidth_hz, const std::vector<ChannelSample>& samples) {
    std::ostringstream o;
    o << header(s, "channel", bandwidth_hz) << "frequency_offset_hz,abs_h,arg_h,abs_h_hr\n";
    for (const auto& c : samples) {
        o << num(c.frequency_offset_hz) << ',' << num(c.forward_magnitude) << ',' << num(c.forward_phase) << ','
          << num(c.concatenated_magnitude) << '\n';
    }
    return o.str();
}

RunSummary run(Scenario scenario, const std::filesystem::path& out_dir, const RunOptions& options) {
    if (options.seed) scenario.seed = *options.seed;
    if (options.points) scenario.n_points = *options.points;
    scenario.validate();
    const auto pdp = resolve_pdp(scenario);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw IoError("cannot create output directory " + out_dir.string());
    }

    const auto [fwd, bwd] = realize_links(pdp, scenario.seed);
    const waveform::PowerBudget power(scenario.budget.transmit_power_w());
    const auto rect = optimizer::RectennaModel::from_params(scenario.rectenna);

    struct Cell {
        double bandwidth;
        std::size_t tones;
        std::string contents;
        std::size_t failed = 0;
    };
    std::vector<Cell> cells;
    for (double b : scenario.bandwidths_hz) {
        for (auto n : scenario.tone_counts) cells.push_back({b, n, {}, 0});
    }

    auto solve_cell = [&](Cell& c) {
        const auto ch = channel::build_channel_state(fwd, bwd, scenario.budget, c.tones, c.bandwidth, scenario.grid);
        const auto pts = optimizer::trace_region(ch, power, rect, scenario.solver, scenario.n_points);
        for (const auto& p : pts) c.failed += p.ok() ? 0 : 1;
        c.contents = format_region_csv(scenario, c.bandwidth, c.tones, waveform::ass_snr(ch, power), pts);
    };

    if (options.parallel && cells.size() > 1) {
        const std::size_t workers =
            std::max<std::size_t>(1, std::min<std::size_t>(cells.size(), std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < cells.size(); i += workers) solve_cell(cells[i]);
            });
        }
        for (auto& t : pool) t.join();
    } else {
        for (auto& c : cells) solve_cell(c);
    }

    RunSummary summary;
    for (double b : scenario.bandwidths_hz) {
        const auto path = out_dir / channel_file_name(b);
        write_atomically(path, format_channel_csv(scenario, b, channel_response_grid(fwd, bwd, scenario.budget, b)));
        summary.files.push_back(path);
    }
    for (const auto& c : cells) {
        const auto path = out_dir / region_file_name(c.bandwidth, c.tones);
        write_atomically(path, c.contents);
        summary.files.push_back(path);
        summary.failed_points += c.failed;
    }
    return summary;
}

}  // namespace wpbc
