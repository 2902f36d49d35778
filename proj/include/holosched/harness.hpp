// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "holosched/channel.hpp"
#include "holosched/common.hpp"
#include "holosched/config.hpp"
#include "holosched/rng.hpp"
#include "holosched/scheduler.hpp"

namespace holosched::harness {

// Stream tags for per-realization seed derivation. Channel draws depend only
// on (seed, realization), so schemes and SNR points see paired channels.
inline constexpr std::uint64_t kChannelStream = 0;
inline constexpr std::uint64_t kBenchmarkStream = 1;

struct ExperimentRecord {
    int realization = 0;
    VecD rates;
    VecI x;
    double sum_rate = 0.0;
    Scheme scheme = Scheme::proposed;
    std::uint64_t cfg_hash = 0;
};

// Greedy scheduling with the weight ascent replaced by one uniform draw of the
// holographic weights per tentative admission; ZF and the admission logic are
// shared with the proposed scheme.
inline scheduler::JointSolution benchmark_scheme(const MatC& h, const MatC& phi,
                                                 const scheduler::SchedulerParams& params,
                                                 Rng& rng) {
    return scheduler::detail::greedy_core(h, phi, params, &rng, nullptr);
}

inline ExperimentRecord run_realization(const SystemConfig& cfg, const MatC& phi, int realization,
                                        double snr_point_db, Scheme scheme) {
    Rng channel_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(realization), kChannelStream));
    const channel::ChannelSet set = channel::sample_channel_set(
        channel_rng, cfg.array_geometry(), cfg.resolved_scale_factors(), cfg.paths, cfg.array_norm);
    const scheduler::SchedulerParams params = cfg.scheduler_params(snr_point_db);

    scheduler::JointSolution sol;
    if (scheme == Scheme::benchmark) {
        Rng bench_rng(
            derive_seed(cfg.seed, static_cast<std::uint64_t>(realization), kBenchmarkStream));
        sol = benchmark_scheme(set.H, phi, params, bench_rng);
    } else {
        sol = scheduler::greedy_schedule(set.H, phi, params);
    }

    ExperimentRecord rec;
    rec.realization = realization;
    rec.rates = sol.rates;
    rec.x = sol.x;
    rec.sum_rate = sol.sum_rate;
    rec.scheme = scheme;
    rec.cfg_hash = config_hash(cfg);
    return rec;
}

inline ExperimentRecord run_realization(const SystemConfig& cfg, int realization,
                                        double snr_point_db) {
    cfg.validate();
    return run_realization(cfg, surface::build_phase_matrix(cfg.surface_geometry()), realization,
                           snr_point_db, cfg.scheme);
}

// All realizations of one (scheme, SNR) point. Worker threads pick realization
// indices off a shared counter and write into fixed slots, so the result is
// independent of scheduling order.
inline std::vector<ExperimentRecord> run_point(const SystemConfig& cfg, const MatC& phi,
                                               double snr_point_db, Scheme scheme) {
    std::vector<ExperimentRecord> records(cfg.realizations);
    const int workers = std::min(cfg.threads, cfg.realizations);
    if (workers <= 1) {
        for (int r = 0; r < cfg.realizations; ++r)
            records[r] = run_realization(cfg, phi, r, snr_point_db, scheme);
        return records;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= cfg.realizations) return;
                try {
                    records[r] = run_realization(cfg, phi, r, snr_point_db, scheme);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return records;
}

struct AggregateStats {
    VecD mean_rate;                 // per user, scheduled-or-not average
    VecD sched_freq;                // fraction of realizations scheduled
    double mean_sum_rate = 0.0;
    std::vector<double> sum_rates;  // per realization, in realization order
};

inline AggregateStats aggregate(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw std::invalid_argument("cannot aggregate zero records");
    const int users = static_cast<int>(records.front().rates.size());
    AggregateStats stats;
    stats.mean_rate = VecD::Zero(users);
    stats.sched_freq = VecD::Zero(users);
    stats.sum_rates.reserve(records.size());
    for (const auto& rec : records) {
        for (int d = 0; d < users; ++d) {
            stats.mean_rate(d) += rec.x(d) ? rec.rates(d) : 0.0;
            stats.sched_freq(d) += rec.x(d) ? 1.0 : 0.0;
        }
        stats.mean_sum_rate += rec.sum_rate;
        stats.sum_rates.push_back(rec.sum_rate);
    }
    const double n = static_cast<double>(records.size());
    stats.mean_rate /= n;
    stats.sched_freq /= n;
    stats.mean_sum_rate /= n;
    return stats;
}

// Empirical CDF knots: sorted values with cumulative fractions i/N.
inline std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("empirical CDF of zero records");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> knots;
    knots.reserve(values.size());
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        knots.emplace_back(values[i], static_cast<double>(i + 1) / n);
    return knots;
}

struct SweepPoint {
    Scheme scheme = Scheme::proposed;
    int elements = 0;
    double snr_db = 0.0;
    AggregateStats stats;
};

// One sweep over cfg.snr_db for each requested scheme at the configured size.
inline std::vector<SweepPoint> sweep_snr(const SystemConfig& cfg,
                                         const std::vector<Scheme>& schemes) {
    cfg.validate();
    const MatC phi = surface::build_phase_matrix(cfg.surface_geometry());
    std::vector<SweepPoint> points;
    for (Scheme scheme : schemes)
        for (double snr : cfg.snr_db) {
            SweepPoint p;
            p.scheme = scheme;
            p.elements = cfg.elements;
            p.snr_db = snr;
            p.stats = aggregate(run_point(cfg, phi, snr, scheme));
            points.push_back(std::move(p));
        }
    return points;
}

inline std::vector<SweepPoint> sweep_snr(const SystemConfig& cfg) {
    return sweep_snr(cfg, {cfg.scheme});
}

// Size sweep at fixed SNR points: reruns the SNR sweep per element count.
inline std::vector<SweepPoint> sweep_size(const SystemConfig& cfg, const std::vector<int>& sizes,
                                          const std::vector<Scheme>& schemes) {
    std::vector<SweepPoint> points;
    for (Scheme scheme : schemes)
        for (int m : sizes) {
            SystemConfig sized = cfg;
            sized.elements = m;
            for (auto& p : sweep_snr(sized, {scheme})) points.push_back(std::move(p));
        }
    return points;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "scheme,M,snr_db,user,mean_rate,sched_freq,mean_sum_rate\n";
    for (const auto& p : points) {
        for (int d = 0; d < p.stats.mean_rate.size(); ++d) {
            out += to_string(p.scheme);
            out += ',' + std::to_string(p.elements);
            out += ',' + format_double(p.snr_db);
            out += ',' + std::to_string(d + 1);
            out += ',' + format_double(p.stats.mean_rate(d));
            out += ',' + format_double(p.stats.sched_freq(d));
            out += ',' + format_double(p.stats.mean_sum_rate);
            out += '\n';
        }
    }
    return out;
}

inline std::string cdf_csv(const std::vector<SweepPoint>& points) {
    std::string out = "scheme,M,snr_db,sum_rate,cum_frac\n";
    for (const auto& p : points) {
        for (const auto& [value, frac] : empirical_cdf(p.stats.sum_rates)) {
            out += to_string(p.scheme);
            out += ',' + std::to_string(p.elements);
            out += ',' + format_double(p.snr_db);
            out += ',' + format_double(value);
            out += ',' + format_double(frac);
            out += '\n';
        }
    }
    return out;
}

enum class PlotKind { snr_sweep, size_sweep, cdf };

// Self-contained matplotlib script that re-plots an emitted CSV.
inline std::string plot_script(const std::string& csv_path, PlotKind kind) {
    std::string s;
    s += "#!/usr/bin/env python3\n";
    s += "import csv\n";
    s += "from collections import defaultdict\n";
    s += "import matplotlib.pyplot as plt\n\n";
    s += "rows = list(csv.DictReader(open(" + std::string("\"") + csv_path + "\")))\n";
    if (kind == PlotKind::cdf) {
        s += "series = defaultdict(list)\n";
        s += "for r in rows:\n";
        s += "    key = f\"{r['scheme']} M={r['M']} {r['snr_db']} dB\"\n";
        s += "    series[key].append((float(r['sum_rate']), float(r['cum_frac'])))\n";
        s += "for key, pts in series.items():\n";
        s += "    pts.sort()\n";
        s += "    plt.step([p[0] for p in pts], [p[1] for p in pts], where='post', label=key)\n";
        s += "plt.xlabel('Sum rate (bps/Hz)')\n";
        s += "plt.ylabel('CDF')\n";
    } else {
        const bool by_size = kind == PlotKind::size_sweep;
        s += "series = defaultdict(dict)\n";
        s += "for r in rows:\n";
        if (by_size) {
            s += "    key = f\"{r['scheme']} {r['snr_db']} dB\"\n";
            s += "    series[key][int(r['M'])] = float(r['mean_sum_rate'])\n";
        } else {
            s += "    key = f\"{r['scheme']} M={r['M']}\"\n";
            s += "    series[key][float(r['snr_db'])] = float(r['mean_sum_rate'])\n";
        }
        s += "for key, pts in series.items():\n";
        s += "    xs = sorted(pts)\n";
        s += "    plt.plot(xs, [pts[x] for x in xs], marker='o', label=key)\n";
        s += by_size ? "plt.xlabel('RHS elements M')\n" : "plt.xlabel('SNR (dB)')\n";
        s += "plt.ylabel('Mean sum rate (bps/Hz)')\n";
    }
    s += "plt.grid(True)\n";
    s += "plt.legend()\n";
    s += "plt.tight_layout()\n";
    s += "plt.savefig(\"" + csv_path + ".png\", dpi=150)\n";
    return s;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing output file: " + path.string());
}

}  // namespace holosched::harness
