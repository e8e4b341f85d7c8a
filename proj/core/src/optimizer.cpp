// SPDX-License-Identifier: Apache-2.0

#include "wpbc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace wpbc::optimizer {

namespace {

// Amplitudes below this fraction of sqrt(2P) are reported as exact zeros.
constexpr double kZeroAmplitude = 1e-12;
// Lower bound on normalised GP variables; keeps the log domain bounded.
constexpr double kVariableFloor = 1e-30;
// Relative tolerance for treating two concatenated gains as tied.
constexpr double kTieTolerance = 1e-9;

struct Problem {
    const channel::ChannelState& ch;
    double power;
    double scale;  // sqrt(2P); x = s / scale
    std::vector<std::size_t> vars;  // tone index of each GP variable
    gp::Posynomial zdc;             // in x over vars
    std::optional<gp::Posynomial> snr;
    double snr_target = 0.0;
};

double norm2(const std::vector<double>& x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

std::vector<double> expand(const Problem& pr, const std::vector<double>& x) {
    std::vector<double> s(pr.ch.size(), 0.0);
    for (std::size_t j = 0; j < pr.vars.size(); ++j) s[pr.vars[j]] = pr.scale * x[j];
    return s;
}

std::vector<double> restrict_amplitudes(const Problem& pr, const std::vector<double>& s) {
    std::vector<double> x(pr.vars.size());
    for (std::size_t j = 0; j < pr.vars.size(); ++j) x[j] = s[pr.vars[j]] / pr.scale;
    return x;
}

gp::Posynomial power_posynomial(std::size_t v) {
    std::vector<gp::Monomial> terms;
    for (std::size_t j = 0; j < v; ++j) {
        std::vector<double> a(v, 0.0);
        a[j] = 2.0;
        terms.emplace_back(1.0, std::move(a));
    }
    return gp::Posynomial(std::move(terms));
}

// Clean reporting: drop negligible amplitudes, then sit exactly on the power boundary.
std::vector<double> finalize_amplitudes(std::vector<double> s, double power, double scale) {
    for (double& v : s) {
        if (v < kZeroAmplitude * scale) v = 0.0;
    }
    const double p = waveform::transmit_power(s);
    if (p > 0.0) {
        const double k = std::sqrt(power / p);
        for (double& v : s) v *= k;
    }
    return s;
}

waveform::Waveform make_waveform(const channel::ChannelState& ch, std::vector<double> s) {
    waveform::Waveform w;
    w.amplitudes = std::move(s);
    w.phases = waveform::matched_phases(ch);
    w.center_frequency_hz = ch.center_frequency_hz;
    w.tone_spacing_hz = ch.size() > 1 ? ch.tone_frequencies[1] - ch.tone_frequencies[0] : 0.0;
    return w;
}

double snr_of(const Problem& pr, const std::vector<double>& x) {
    return waveform::snr(expand(pr, x), pr.ch);
}

// Blend between a direction over the GP variables and the strongest tone.
std::vector<double> blend(const Problem& pr, const std::vector<double>& direction, std::size_t best_var,
                          double required_snr) {
    const std::size_t v = pr.vars.size();
    auto at = [&](double alpha) {
        std::vector<double> x(v);
        for (std::size_t j = 0; j < v; ++j) x[j] = (1.0 - alpha) * direction[j] + (j == best_var ? alpha : 0.0);
        const double n = norm2(x);
        for (double& e : x) e /= n;
        return x;
    };
    if (!pr.snr || snr_of(pr, at(0.0)) >= required_snr) return at(0.0);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (snr_of(pr, at(mid)) >= required_snr ? hi : lo) = mid;
    }
    return at(hi);
}

std::vector<double> uniform_direction(std::size_t v) {
    return std::vector<double>(v, 1.0 / std::sqrt(static_cast<double>(v)));
}

bool feasible(const Problem& pr, const std::vector<double>& x, double snr_slack) {
    for (double e : x) {
        if (!(e > 0.0) || !std::isfinite(e)) return false;
    }
    double sq = 0.0;
    for (double e : x) sq += e * e;
    if (sq > 1.0 + 1e-9) return false;
    return !pr.snr || snr_of(pr, x) >= pr.snr_target * (1.0 - snr_slack);
}

struct Run {
    std::vector<double> x;
    std::vector<double> trajectory;
    std::vector<ScaIterate> iterates;
    int iterations = 0;
    ScaStatus status = ScaStatus::IterationCapped;
};

Run run_sca(const Problem& pr, std::vector<double> x, const SolverConfig& cfg) {
    const std::size_t v = pr.vars.size();
    Run run;
    const auto power = power_posynomial(v);
    std::vector<gp::Monomial> floors;
    for (std::size_t j = 0; j < v; ++j) {
        std::vector<double> a(v, 0.0);
        a[j] = -1.0;
        floors.emplace_back(kVariableFloor, std::move(a));
    }

    double z_prev = 0.0;
    run.trajectory.push_back(gp::evaluate(pr.zdc, x));
    for (int i = 1; i <= cfg.i_max; ++i) {
        run.iterations = i;
        ScaIterate rec;

        const auto cz = gp::condense(pr.zdc, x);
        const double z_anchor = run.trajectory.back();
        rec.z_anchor_gap = std::abs(cz.monomial.evaluate(x) - z_anchor) / z_anchor;
        rec.gamma_sum = std::accumulate(cz.weights.weights.begin(), cz.weights.weights.end(), 0.0);
        rec.weights_nonnegative = std::all_of(cz.weights.weights.begin(), cz.weights.weights.end(),
                                              [](double g) { return g >= 0.0; });

        gp::GpProblem problem{cz.monomial, {power}, floors};
        if (pr.snr) {
            const auto cr = gp::condense(*pr.snr, x);
            const double r_anchor = gp::evaluate(*pr.snr, x);
            rec.snr_anchor_gap = std::abs(cr.monomial.evaluate(x) - r_anchor) / r_anchor;
            rec.beta_sum = std::accumulate(cr.weights.weights.begin(), cr.weights.weights.end(), 0.0);
            rec.weights_nonnegative = rec.weights_nonnegative &&
                                      std::all_of(cr.weights.weights.begin(), cr.weights.weights.end(),
                                                  [](double b) { return b >= 0.0; });
            // target * prod_n (f_n / beta_n)^{-beta_n} <= 1
            std::vector<double> neg(cr.monomial.exponents());
            for (double& e : neg) e = -e;
            problem.monomial_constraints.push_back(
                gp::Monomial::from_log(std::log(pr.snr_target) - cr.monomial.log_coefficient(), std::move(neg)));
        }

        gp::GpOptions opts;
        opts.tol = cfg.gp_tol;
        opts.max_newton_iters = cfg.max_newton_iters;
        opts.initial = x;
        const auto sol = gp::solve_gp(problem, opts);
        rec.gp_status = sol.status;

        std::vector<double> next = sol.variables;
        if (sol.status == gp::GpStatus::Infeasible || !feasible(pr, next, 1e-9)) {
            run.status = ScaStatus::SolverFailure;
            run.iterates.push_back(std::move(rec));
            break;
        }
        // Both objectives grow with scale, so move onto the power boundary.
        const double n = norm2(next);
        for (double& e : next) e /= n;

        const double z = gp::evaluate(pr.zdc, next);
        const auto s_full = expand(pr, next);
        rec.amplitudes = s_full;
        rec.z_dc = z;
        rec.snr = waveform::snr(s_full, pr.ch);
        rec.power = waveform::transmit_power(s_full);
        run.iterates.push_back(std::move(rec));
        run.trajectory.push_back(z);
        x = std::move(next);

        // z^(0) is taken as 0.
        const double dz = std::abs(z - z_prev);
        z_prev = z;
        // A stalled GP also leaves dz ~ 0; that is not convergence.
        if (sol.status == gp::GpStatus::Optimal && (dz < cfg.epsilon || dz < cfg.relative_epsilon * z)) {
            run.status = ScaStatus::Converged;
            break;
        }
    }
    run.x = std::move(x);
    return run;
}

ScaResult infeasible_result(const channel::ChannelState& ch, const waveform::PowerBudget& budget,
                            const RectennaModel& rect) {
    ScaResult r;
    r.waveform = waveform::ass_waveform(ch, budget);
    r.achieved_snr = waveform::snr(r.waveform.amplitudes, ch);
    r.z_dc = rectenna::z_dc_optimal_phase(r.waveform.amplitudes, ch, rect.coefficients, rect.antenna_resistance_ohm);
    r.status = ScaStatus::InfeasibleTarget;
    return r;
}

}  // namespace

RectennaModel RectennaModel::from_params(const rectenna::RectennaParams& p) {
    return {rectenna::derive_coefficients(p), p.antenna_resistance_ohm};
}

void SolverConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("SolverConfig: epsilon must be positive");
    if (!(relative_epsilon >= 0.0)) throw std::invalid_argument("SolverConfig: relative_epsilon must be >= 0");
    if (i_max < 1) throw std::invalid_argument("SolverConfig: i_max must be >= 1");
    if (!(gp_tol > 0.0)) throw std::invalid_argument("SolverConfig: gp_tol must be positive");
    if (max_newton_iters < 1) throw std::invalid_argument("SolverConfig: max_newton_iters must be >= 1");
    if (!(snr_feasibility_margin >= 0.0)) throw std::invalid_argument("SolverConfig: margin must be >= 0");
    if (multi_start < 1) throw std::invalid_argument("SolverConfig: multi_start must be >= 1");
}

std::string_view to_string(ScaStatus status) {
    switch (status) {
        case ScaStatus::Converged: return "converged";
        case ScaStatus::IterationCapped: return "iteration_capped";
        case ScaStatus::InfeasibleTarget: return "infeasible_target";
        case ScaStatus::SolverFailure: return "solver_failure";
    }
    return "unknown";
}

std::vector<double> blended_start(const channel::ChannelState& ch, const waveform::PowerBudget& budget,
                                  double snr_target, double margin) {
    const std::size_t n = ch.size();
    const std::size_t best = waveform::strongest_tone(ch);
    const double scale = std::sqrt(2.0 * budget.p);
    std::vector<double> u(n, 1.0 / std::sqrt(static_cast<double>(n)));
    auto at = [&](double alpha) {
        std::vector<double> s(n);
        for (std::size_t j = 0; j < n; ++j) s[j] = (1.0 - alpha) * u[j] + (j == best ? alpha : 0.0);
        const double k = scale / norm2(s);
        for (double& e : s) e *= k;
        return s;
    };
    const double required = snr_target * (1.0 + margin);
    if (waveform::snr(at(0.0), ch) >= required) return at(0.0);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (waveform::snr(at(mid), ch) >= required ? hi : lo) = mid;
    }
    return at(hi);
}

ScaResult sca_optimize(const channel::ChannelState& ch, const waveform::PowerBudget& budget,
                       const RectennaModel& rect, double snr_target, const SolverConfig& cfg,
                       const std::optional<std::vector<double>>& s_init) {
    ch.validate();
    cfg.validate();
    if (!(snr_target >= 0.0) || !std::isfinite(snr_target)) {
        throw std::invalid_argument("sca_optimize: snr_target must be finite and nonnegative");
    }
    const std::size_t n = ch.size();
    const double ass = waveform::ass_snr(ch, budget);
    const double margin = cfg.snr_feasibility_margin;
    if (snr_target > ass * (1.0 + margin)) return infeasible_result(ch, budget, rect);

    const double scale = std::sqrt(2.0 * budget.p);
    const auto r_ant = rect.antenna_resistance_ohm;

    // Variables: tones with forward gain. At the ASS end only the tied strongest tones remain.
    std::vector<std::size_t> vars;
    const bool endpoint = snr_target > 0.0 && snr_target * (1.0 + margin) >= ass;
    const std::size_t best = waveform::strongest_tone(ch);
    const double best_gain = ch.forward_gain(best) * ch.backward_gain(best);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(ch.forward_gain(i) > 0.0)) continue;
        if (endpoint && ch.forward_gain(i) * ch.backward_gain(i) < best_gain * (1.0 - kTieTolerance)) continue;
        vars.push_back(i);
    }
    if (vars.empty()) throw std::invalid_argument("sca_optimize: every tone has zero forward gain");

    if (vars.size() == 1) {
        std::vector<double> s(n, 0.0);
        s[vars.front()] = scale;
        ScaResult r;
        r.waveform = make_waveform(ch, std::move(s));
        r.achieved_snr = waveform::snr(r.waveform.amplitudes, ch);
        r.z_dc = rectenna::z_dc_optimal_phase(r.waveform.amplitudes, ch, rect.coefficients, r_ant);
        r.z_dc_trajectory = {r.z_dc};
        r.status = ScaStatus::Converged;
        return r;
    }

    const std::vector<double> scales(n, scale);
    Problem pr{ch, budget.p, scale, vars,
               gp::restrict_to(gp::rescale(rectenna::as_posynomial(ch, rect.coefficients, r_ant), scales), vars),
               std::nullopt, snr_target};
    if (snr_target > 0.0 && !endpoint) {
        pr.snr = gp::restrict_to(gp::rescale(waveform::snr_as_posynomial(ch), scales), vars);
    }

    const std::size_t best_var = static_cast<std::size_t>(
        std::find(vars.begin(), vars.end(), best) - vars.begin());
    const double required = snr_target * (1.0 + margin);

    std::vector<std::vector<double>> starts;
    if (s_init) {
        if (s_init->size() != n) throw std::invalid_argument("sca_optimize: s_init has the wrong length");
        auto x = restrict_amplitudes(pr, *s_init);
        // Zeros are outside the GP domain; lift them slightly, then return to full power.
        const double lift = 1e-6 / std::sqrt(static_cast<double>(x.size()));
        for (double& e : x) e = std::max(e, lift);
        const double nx = norm2(x);
        for (double& e : x) e /= nx;
        if (feasible(pr, x, 0.0)) starts.push_back(std::move(x));
    }
    starts.push_back(blend(pr, uniform_direction(vars.size()), best_var, required));
    if (cfg.multi_start > 1) {
        std::mt19937_64 rng(cfg.multi_start_seed);
        std::gamma_distribution<double> g(1.0, 1.0);
        for (int k = 1; k < cfg.multi_start; ++k) {
            std::vector<double> d(vars.size());
            for (double& e : d) e = std::sqrt(g(rng)) + 1e-12;
            const double nd = norm2(d);
            for (double& e : d) e /= nd;
            starts.push_back(blend(pr, d, best_var, required));
        }
    }

    std::optional<Run> best_run;
    for (auto& x0 : starts) {
        auto run = run_sca(pr, std::move(x0), cfg);
        const bool better = !best_run ||
                            (run.status != ScaStatus::SolverFailure &&
                             (best_run->status == ScaStatus::SolverFailure ||
                              run.trajectory.back() > best_run->trajectory.back()));
        if (better) best_run = std::move(run);
    }

    ScaResult r;
    auto s = finalize_amplitudes(expand(pr, best_run->x), budget.p, scale);
    r.waveform = make_waveform(ch, std::move(s));
    r.achieved_snr = waveform::snr(r.waveform.amplitudes, ch);
    r.z_dc = rectenna::z_dc_optimal_phase(r.waveform.amplitudes, ch, rect.coefficients, r_ant);
    r.iterations = best_run->iterations;
    r.z_dc_trajectory = std::move(best_run->trajectory);
    r.iterates = std::move(best_run->iterates);
    r.status = best_run->status;
    return r;
}

std::vector<RegionPoint> trace_region(const channel::ChannelState& ch, const waveform::PowerBudget& budget,
                                      const RectennaModel& rect, const SolverConfig& cfg, std::size_t n_points,
                                      const TraceOptions& options) {
    if (n_points < 2) throw std::invalid_argument("trace_region: need at least two points");
    cfg.validate();
    const double ass = waveform::ass_snr(ch, budget);
    std::vector<double> targets(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        targets[j] = j + 1 == n_points ? ass : ass * static_cast<double>(j) / static_cast<double>(n_points - 1);
    }

    auto solve = [&](std::size_t j, const std::optional<std::vector<double>>& init) {
        RegionPoint p;
        p.snr_target = targets[j];
        try {
            auto r = sca_optimize(ch, budget, rect, targets[j], cfg, init);
            p.achieved_snr = r.achieved_snr;
            p.z_dc = r.z_dc;
            p.waveform = std::move(r.waveform);
            p.status = r.status;
            p.iterations = r.iterations;
        } catch (const std::exception&) {
            p.status = ScaStatus::SolverFailure;
        }
        return p;
    };

    std::vector<RegionPoint> out(n_points);
    if (options.warm_start) {
        std::optional<std::vector<double>> prev;
        for (std::size_t j = n_points; j-- > 0;) {
            out[j] = solve(j, prev);
            if (out[j].ok()) prev = out[j].waveform.amplitudes;
        }
    } else if (options.parallel) {
        const std::size_t workers =
            std::max<std::size_t>(1, std::min<std::size_t>(n_points, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t j = w; j < n_points; j += workers) out[j] = solve(j, std::nullopt);
            });
        }
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t j = 0; j < n_points; ++j) out[j] = solve(j, std::nullopt);
    }
    return out;
}

bool region_dominates(const std::vector<RegionPoint>& a, const std::vector<RegionPoint>& b, double tol) {
    if (a.empty() || b.empty()) throw std::invalid_argument("region_dominates: empty region");
    // Upper boundary of a: sorted by SNR, z strictly decreasing.
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : a) {
        if (p.ok()) pts.emplace_back(p.achieved_snr, p.z_dc);
    }
    if (pts.empty()) return false;
    std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) {
        return l.first != r.first ? l.first > r.first : l.second > r.second;
    });
    std::vector<std::pair<double, double>> frontier;  // descending SNR, ascending z
    for (const auto& p : pts) {
        if (frontier.empty() || p.second > frontier.back().second) frontier.push_back(p);
    }
    std::reverse(frontier.begin(), frontier.end());  // ascending SNR, descending z

    auto boundary = [&](double snr) {
        if (snr <= frontier.front().first) return frontier.front().second;
        for (std::size_t k = 1; k < frontier.size(); ++k) {
            const auto& [s0, z0] = frontier[k - 1];
            const auto& [s1, z1] = frontier[k];
            if (snr <= s1) return z0 + (z1 - z0) * (snr - s0) / (s1 - s0);
        }
        return frontier.back().second;
    };

    const double snr_max = frontier.back().first;
    for (const auto& p : b) {
        if (!p.ok()) continue;
        if (p.achieved_snr > snr_max * (1.0 + tol)) return false;
        if (p.z_dc > boundary(std::min(p.achieved_snr, snr_max)) * (1.0 + tol)) return false;
    }
    return true;
}

}  // namespace wpbc::optimizer
