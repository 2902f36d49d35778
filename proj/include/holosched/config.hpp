// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "holosched/channel.hpp"
#include "holosched/common.hpp"
#include "holosched/holo_opt.hpp"
#include "holosched/scheduler.hpp"
#include "holosched/surface.hpp"

namespace holosched {

enum class Scheme { proposed, benchmark };

inline std::string to_string(Scheme s) {
    return s == Scheme::proposed ? "proposed" : "benchmark";
}

// Every scalar knob of a simulation run. Parsed from a flat key = value file;
// unknown keys are rejected so typos fail fast.
struct SystemConfig {
    int users = 6;                       // D
    int feeds = 8;                       // K, equal to the RF chain count
    int elements = 36;                   // M, perfect square
    double p_max = 1.0;                  // watts
    double r_min = 5.0;                  // bps/Hz
    std::vector<double> snr_db = {10, 15, 20, 25, 30, 35};
    int realizations = 100;
    double carrier_hz = 30e9;
    double spacing_divisor = 3.0;        // element pitch = lambda / spacing_divisor
    double epsilon_r = 3.0;              // substrate permittivity
    int paths = 3;                       // multipath components per user
    holo_opt::OptimizerSettings optimizer;
    int n_alt = 3;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::proposed;
    channel::ArrayNorm array_norm = channel::ArrayNorm::literal;
    std::vector<double> scale_factors;   // empty selects the default profile
    int threads = 1;

    void validate() const {
        if (users < 1) throw std::invalid_argument("users must be at least 1");
        if (feeds < users) throw std::invalid_argument("feeds must be at least the user count");
        if (!is_perfect_square(elements))
            throw std::invalid_argument("elements must be a perfect square");
        if (p_max <= 0.0) throw std::invalid_argument("p_max must be positive");
        if (r_min < 0.0) throw std::invalid_argument("r_min cannot be negative");
        if (snr_db.empty()) throw std::invalid_argument("snr_db list cannot be empty");
        if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
        if (carrier_hz <= 0.0) throw std::invalid_argument("carrier_hz must be positive");
        if (spacing_divisor <= 0.0) throw std::invalid_argument("spacing_divisor must be positive");
        if (epsilon_r <= 0.0) throw std::invalid_argument("epsilon_r must be positive");
        if (paths < 1) throw std::invalid_argument("paths must be at least 1");
        if (n_alt < 1) throw std::invalid_argument("n_alt must be at least 1");
        if (threads < 1) throw std::invalid_argument("threads must be at least 1");
        if (!scale_factors.empty()) {
            if (static_cast<int>(scale_factors.size()) != users)
                throw std::invalid_argument("scale_factors length must equal users");
            for (double f : scale_factors)
                if (f <= 0.0) throw std::invalid_argument("scale factors must be positive");
        }
        optimizer.validate();
    }

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double spacing() const { return wavelength() / spacing_divisor; }
    double k_f() const { return 2.0 * std::numbers::pi / wavelength(); }
    double k_s() const { return std::sqrt(epsilon_r) * k_f(); }
    double sigma2(double snr_point_db) const { return p_max / std::pow(10.0, snr_point_db / 10.0); }

    // Deterministic per-user gains: the six-user profile from the experiments,
    // flat otherwise, unless the config lists explicit factors.
    VecD resolved_scale_factors() const {
        VecD f(users);
        if (!scale_factors.empty()) {
            for (int i = 0; i < users; ++i) f(i) = scale_factors[i];
        } else if (users == 6) {
            f << 1.2, 1.0, 0.8, 0.6, 0.4, 0.2;
        } else {
            f.setOnes();
        }
        return f;
    }

    channel::ArrayGeometry array_geometry() const {
        return channel::ArrayGeometry::from_carrier(elements, carrier_hz, spacing_divisor);
    }

    surface::SurfaceGeometry surface_geometry() const {
        return surface::SurfaceGeometry::regular(elements, feeds, spacing(), spacing(), k_s());
    }

    scheduler::SchedulerParams scheduler_params(double snr_point_db) const {
        scheduler::SchedulerParams p;
        p.p_max = p_max;
        p.r_min = r_min;
        p.noise_variance = sigma2(snr_point_db);
        p.n_alt = n_alt;
        p.optimizer = optimizer;
        return p;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse real '" + value + "'");
    }
}

inline long long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse integer '" + value +
                                    "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse unsigned '" + value +
                                    "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw std::invalid_argument("config key '" + key + "': cannot parse boolean '" + value + "'");
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("config key '" + key + "': empty list element");
        out.push_back(parse_real(key, item));
    }
    if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
    return out;
}

}  // namespace detail

inline SystemConfig parse_config(std::istream& in) {
    SystemConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key or value");

        if (key == "users") cfg.users = static_cast<int>(detail::parse_integer(key, value));
        else if (key == "feeds") cfg.feeds = static_cast<int>(detail::parse_integer(key, value));
        else if (key == "elements")
            cfg.elements = static_cast<int>(detail::parse_integer(key, value));
        else if (key == "p_max") cfg.p_max = detail::parse_real(key, value);
        else if (key == "r_min") cfg.r_min = detail::parse_real(key, value);
        else if (key == "snr_db") cfg.snr_db = detail::parse_real_list(key, value);
        else if (key == "realizations")
            cfg.realizations = static_cast<int>(detail::parse_integer(key, value));
        else if (key == "carrier_hz") cfg.carrier_hz = detail::parse_real(key, value);
        else if (key == "spacing_divisor") cfg.spacing_divisor = detail::parse_real(key, value);
        else if (key == "epsilon_r") cfg.epsilon_r = detail::parse_real(key, value);
        else if (key == "paths") cfg.paths = static_cast<int>(detail::parse_integer(key, value));
        else if (key == "learning_rate") cfg.optimizer.learning_rate = detail::parse_real(key, value);
        else if (key == "tolerance") cfg.optimizer.tolerance = detail::parse_real(key, value);
        else if (key == "max_iterations")
            cfg.optimizer.max_iterations = static_cast<int>(detail::parse_integer(key, value));
        else if (key == "backtracking") cfg.optimizer.backtracking = detail::parse_bool(key, value);
        else if (key == "n_alt") cfg.n_alt = static_cast<int>(detail::parse_integer(key, value));
        else if (key == "seed") cfg.seed = detail::parse_u64(key, value);
        else if (key == "scheme") {
            if (value == "proposed") cfg.scheme = Scheme::proposed;
            else if (value == "benchmark") cfg.scheme = Scheme::benchmark;
            else throw std::invalid_argument("config key 'scheme': unknown value '" + value + "'");
        } else if (key == "array_norm") {
            if (value == "literal") cfg.array_norm = channel::ArrayNorm::literal;
            else if (value == "sqrt") cfg.array_norm = channel::ArrayNorm::sqrt;
            else
                throw std::invalid_argument("config key 'array_norm': unknown value '" + value +
                                            "'");
        } else if (key == "scale_factors") cfg.scale_factors = detail::parse_real_list(key, value);
        else if (key == "threads") cfg.threads = static_cast<int>(detail::parse_integer(key, value));
        else throw std::invalid_argument("unknown config key: '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return parse_config(in);
}

// Canonical serialization; feeds the config hash recorded with every result.
inline std::string to_string(const SystemConfig& cfg) {
    std::string s;
    s += "users=" + std::to_string(cfg.users) + "\n";
    s += "feeds=" + std::to_string(cfg.feeds) + "\n";
    s += "elements=" + std::to_string(cfg.elements) + "\n";
    s += "p_max=" + format_double(cfg.p_max) + "\n";
    s += "r_min=" + format_double(cfg.r_min) + "\n";
    s += "snr_db=";
    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i)
        s += (i ? "," : "") + format_double(cfg.snr_db[i]);
    s += "\n";
    s += "realizations=" + std::to_string(cfg.realizations) + "\n";
    s += "carrier_hz=" + format_double(cfg.carrier_hz) + "\n";
    s += "spacing_divisor=" + format_double(cfg.spacing_divisor) + "\n";
    s += "epsilon_r=" + format_double(cfg.epsilon_r) + "\n";
    s += "paths=" + std::to_string(cfg.paths) + "\n";
    s += "learning_rate=" + format_double(cfg.optimizer.learning_rate) + "\n";
    s += "tolerance=" + format_double(cfg.optimizer.tolerance) + "\n";
    s += "max_iterations=" + std::to_string(cfg.optimizer.max_iterations) + "\n";
    s += std::string("backtracking=") + (cfg.optimizer.backtracking ? "true" : "false") + "\n";
    s += "n_alt=" + std::to_string(cfg.n_alt) + "\n";
    s += "seed=" + std::to_string(cfg.seed) + "\n";
    s += "scheme=" + to_string(cfg.scheme) + "\n";
    s += std::string("array_norm=") +
         (cfg.array_norm == channel::ArrayNorm::literal ? "literal" : "sqrt") + "\n";
    s += "scale_factors=";
    const VecD f = cfg.resolved_scale_factors();
    for (int i = 0; i < f.size(); ++i) s += (i ? "," : "") + format_double(f(i));
    s += "\n";
    return s;
}

inline std::uint64_t config_hash(const SystemConfig& cfg) {
    const std::string s = to_string(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace holosched
