// SPDX-License-Identifier: Apache-2.0

#include "wpbc/scenario.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wpbc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
        throw ConfigError("scenario: '" + key + "' expects a number, got '" + v + "'");
    }
    return d;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    if (v.empty() || v.front() == '-') throw ConfigError("scenario: '" + key + "' expects a nonnegative integer");
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) {
        throw ConfigError("scenario: '" + key + "' expects a nonnegative integer, got '" + v + "'");
    }
    return u;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

using Setter = std::function<void(Scenario&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"center_frequency_hz", [](Scenario& s, auto& k, auto& v) { s.budget.center_frequency_hz = parse_double(k, v); }},
        {"eirp_dbm", [](Scenario& s, auto& k, auto& v) { s.budget.eirp_dbm = parse_double(k, v); }},
        {"tag_rx_gain_dbi", [](Scenario& s, auto& k, auto& v) { s.budget.tag_rx_gain_dbi = parse_double(k, v); }},
        {"tag_tx_gain_dbi", [](Scenario& s, auto& k, auto& v) { s.budget.tag_tx_gain_dbi = parse_double(k, v); }},
        {"reader_rx_gain_dbi", [](Scenario& s, auto& k, auto& v) { s.budget.reader_rx_gain_dbi = parse_double(k, v); }},
        {"path_loss_forward_db", [](Scenario& s, auto& k, auto& v) { s.budget.path_loss_forward_db = parse_double(k, v); }},
        {"path_loss_backward_db", [](Scenario& s, auto& k, auto& v) { s.budget.path_loss_backward_db = parse_double(k, v); }},
        {"noise_power_dbm", [](Scenario& s, auto& k, auto& v) { s.budget.noise_power_dbm = parse_double(k, v); }},
        {"pdp", [](Scenario& s, auto&, auto& v) { s.pdp = v; }},
        {"bandwidths_hz",
         [](Scenario& s, auto& k, auto& v) {
             s.bandwidths_hz.clear();
             for (const auto& item : split_list(v)) s.bandwidths_hz.push_back(parse_double(k, item));
         }},
        {"tone_counts",
         [](Scenario& s, auto& k, auto& v) {
             s.tone_counts.clear();
             for (const auto& item : split_list(v)) s.tone_counts.push_back(parse_uint(k, item));
         }},
        {"tone_grid",
         [](Scenario& s, auto& k, auto& v) {
             if (v == "nested") s.grid = channel::ToneGrid::Nested;
             else if (v == "symmetric") s.grid = channel::ToneGrid::Symmetric;
             else throw ConfigError("scenario: '" + k + "' must be 'nested' or 'symmetric'");
         }},
        {"diode_saturation_current_a", [](Scenario& s, auto& k, auto& v) { s.rectenna.saturation_current_a = parse_double(k, v); }},
        {"diode_ideality", [](Scenario& s, auto& k, auto& v) { s.rectenna.ideality = parse_double(k, v); }},
        {"thermal_voltage_v", [](Scenario& s, auto& k, auto& v) { s.rectenna.thermal_voltage_v = parse_double(k, v); }},
        {"antenna_resistance_ohm", [](Scenario& s, auto& k, auto& v) { s.rectenna.antenna_resistance_ohm = parse_double(k, v); }},
        {"truncation_order", [](Scenario& s, auto& k, auto& v) { s.rectenna.truncation_order = static_cast<int>(parse_uint(k, v)); }},
        {"sca_epsilon", [](Scenario& s, auto& k, auto& v) { s.solver.epsilon = parse_double(k, v); }},
        {"sca_relative_epsilon", [](Scenario& s, auto& k, auto& v) { s.solver.relative_epsilon = parse_double(k, v); }},
        {"sca_max_iterations", [](Scenario& s, auto& k, auto& v) { s.solver.i_max = static_cast<int>(parse_uint(k, v)); }},
        {"gp_tolerance", [](Scenario& s, auto& k, auto& v) { s.solver.gp_tol = parse_double(k, v); }},
        {"gp_max_newton_iterations", [](Scenario& s, auto& k, auto& v) { s.solver.max_newton_iters = static_cast<int>(parse_uint(k, v)); }},
        {"snr_feasibility_margin", [](Scenario& s, auto& k, auto& v) { s.solver.snr_feasibility_margin = parse_double(k, v); }},
        {"multi_start", [](Scenario& s, auto& k, auto& v) { s.solver.multi_start = static_cast<int>(parse_uint(k, v)); }},
        {"seed", [](Scenario& s, auto& k, auto& v) { s.seed = parse_uint(k, v); }},
        {"points", [](Scenario& s, auto& k, auto& v) { s.n_points = parse_uint(k, v); }},
    };
    return table;
}

}  // namespace

void Scenario::validate() const {
    try {
        budget.validate();
        rectenna.validate();
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    if (bandwidths_hz.empty()) throw ConfigError("scenario: bandwidths_hz must not be empty");
    for (double b : bandwidths_hz) {
        if (!(b > 0.0)) throw ConfigError("scenario: bandwidths must be positive");
    }
    if (tone_counts.empty()) throw ConfigError("scenario: tone_counts must not be empty");
    for (auto n : tone_counts) {
        if (n < 1) throw ConfigError("scenario: tone counts must be >= 1");
    }
    if (n_points < 2) throw ConfigError("scenario: points must be >= 2");
    if (pdp.empty()) throw ConfigError("scenario: pdp must name a built-in profile or a file");
}

Scenario default_scenario() { return Scenario{}; }

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    Scenario s;
    s.base_dir = base_dir;
    bool saw_seed = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("scenario line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError("scenario line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(s, key, value);
        saw_seed = saw_seed || key == "seed";
    }
    if (!saw_seed) throw ConfigError("scenario: 'seed' is required");
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read scenario file: " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str(), path.parent_path());
}

std::string to_text(const Scenario& s) {
    std::ostringstream o;
    auto join_d = [](const std::vector<double>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_double(v[i]);
        return out;
    };
    auto join_u = [](const std::vector<std::size_t>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
        return out;
    };
    o << "# link budget\n"
      << "center_frequency_hz = " << fmt_double(s.budget.center_frequency_hz) << "\n"
      << "eirp_dbm = " << fmt_double(s.budget.eirp_dbm) << "\n"
      << "tag_rx_gain_dbi = " << fmt_double(s.budget.tag_rx_gain_dbi) << "\n"
      << "tag_tx_gain_dbi = " << fmt_double(s.budget.tag_tx_gain_dbi) << "\n"
      << "reader_rx_gain_dbi = " << fmt_double(s.budget.reader_rx_gain_dbi) << "\n"
      << "path_loss_forward_db = " << fmt_double(s.budget.path_loss_forward_db) << "\n"
      << "path_loss_backward_db = " << fmt_double(s.budget.path_loss_backward_db) << "\n"
      << "noise_power_dbm = " << fmt_double(s.budget.noise_power_dbm) << "\n"
      << "\n# channel and tone grid\n"
      << "pdp = " << s.pdp << "\n"
      << "bandwidths_hz = " << join_d(s.bandwidths_hz) << "\n"
      << "tone_counts = " << join_u(s.tone_counts) << "\n"
      << "tone_grid = " << (s.grid == channel::ToneGrid::Nested ? "nested" : "symmetric") << "\n"
      << "\n# rectenna\n"
      << "diode_saturation_current_a = " << fmt_double(s.rectenna.saturation_current_a) << "\n"
      << "diode_ideality = " << fmt_double(s.rectenna.ideality) << "\n"
      << "thermal_voltage_v = " << fmt_double(s.rectenna.thermal_voltage_v) << "\n"
      << "antenna_resistance_ohm = " << fmt_double(s.rectenna.antenna_resistance_ohm) << "\n"
      << "truncation_order = " << s.rectenna.truncation_order << "\n"
      << "\n# solver\n"
      << "sca_epsilon = " << fmt_double(s.solver.epsilon) << "\n"
      << "sca_relative_epsilon = " << fmt_double(s.solver.relative_epsilon) << "\n"
      << "sca_max_iterations = " << s.solver.i_max << "\n"
      << "gp_tolerance = " << fmt_double(s.solver.gp_tol) << "\n"
      << "gp_max_newton_iterations = " << s.solver.max_newton_iters << "\n"
      << "snr_feasibility_margin = " << fmt_double(s.solver.snr_feasibility_margin) << "\n"
      << "multi_start = " << s.solver.multi_start << "\n"
      << "\n# experiment\n"
      << "seed = " << s.seed << "\n"
      << "points = " << s.n_points << "\n";
    return o.str();
}

std::uint64_t scenario_hash(const Scenario& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : to_text(s)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

channel::PowerDelayProfile resolve_pdp(const Scenario& s) {
    if (s.pdp == kBuiltinPdp) return channel::model_b_like();
    std::filesystem::path p(s.pdp);
    if (p.is_relative() && !s.base_dir.empty()) p = s.base_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError("PDP file not found: " + p.string());
    try {
        return channel::load_pdp(p);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("PDP file ") + p.string() + ": " + e.what());
    }
}

}  // namespace wpbc
