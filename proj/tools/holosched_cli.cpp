// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: single realizations, SNR/size sweeps, sum-rate CDFs,
// and a finite-difference gradient audit, all emitting deterministic CSV.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holosched/holosched.hpp"

namespace {

using namespace holosched;

struct GlobalArgs {
    std::string config_path;
    std::string out_path;
    std::string scheme;
    std::uint64_t seed = 0;
    bool have_seed = false;
    int threads = 0;
};

SystemConfig make_config(const GlobalArgs& args) {
    SystemConfig cfg = args.config_path.empty() ? SystemConfig{} : load_config(args.config_path);
    if (args.have_seed) cfg.seed = args.seed;
    if (args.threads > 0) cfg.threads = args.threads;
    if (args.scheme == "proposed") cfg.scheme = Scheme::proposed;
    if (args.scheme == "benchmark") cfg.scheme = Scheme::benchmark;
    cfg.validate();
    return cfg;
}

std::vector<Scheme> selected_schemes(const GlobalArgs& args) {
    if (args.scheme == "proposed") return {Scheme::proposed};
    if (args.scheme == "benchmark") return {Scheme::benchmark};
    return {Scheme::proposed, Scheme::benchmark};
}

void deliver(const GlobalArgs& args, const std::string& csv, const std::string& plot_path,
             harness::PlotKind kind) {
    if (args.out_path.empty()) {
        std::cout << csv;
    } else {
        harness::write_file(args.out_path, csv);
    }
    if (!plot_path.empty()) {
        if (args.out_path.empty())
            throw std::invalid_argument("--plot-script requires --out so the script has a CSV");
        harness::write_file(plot_path, harness::plot_script(args.out_path, kind));
    }
}

int cmd_single(const GlobalArgs& args, double snr_override, bool have_snr) {
    const SystemConfig cfg = make_config(args);
    const double snr = have_snr ? snr_override : cfg.snr_db.front();
    const harness::ExperimentRecord rec = harness::run_realization(cfg, 0, snr);
    std::string out;
    out += "scheme: " + to_string(rec.scheme) + "\n";
    out += "snr_db: " + format_double(snr) + "\n";
    out += "schedule:";
    for (int d = 0; d < rec.x.size(); ++d) out += ' ' + std::to_string(rec.x(d));
    out += "\nrates:";
    for (int d = 0; d < rec.rates.size(); ++d) out += ' ' + format_double(rec.rates(d));
    out += "\nsum_rate: " + format_double(rec.sum_rate) + "\n";
    out += "config_hash: " + std::to_string(rec.cfg_hash) + "\n";
    if (args.out_path.empty())
        std::cout << out;
    else
        harness::write_file(args.out_path, out);
    return 0;
}

int cmd_sweep_snr(const GlobalArgs& args, const std::string& plot_path) {
    const SystemConfig cfg = make_config(args);
    const auto points = harness::sweep_snr(cfg, selected_schemes(args));
    deliver(args, harness::sweep_csv(points), plot_path, harness::PlotKind::snr_sweep);
    return 0;
}

int cmd_sweep_size(const GlobalArgs& args, std::vector<int> sizes, std::vector<double> snrs,
                   const std::string& plot_path) {
    SystemConfig cfg = make_config(args);
    if (!snrs.empty()) cfg.snr_db = snrs;
    const auto points = harness::sweep_size(cfg, sizes, selected_schemes(args));
    deliver(args, harness::sweep_csv(points), plot_path, harness::PlotKind::size_sweep);
    return 0;
}

int cmd_cdf(const GlobalArgs& args, std::vector<int> sizes, std::vector<double> snrs,
            const std::string& plot_path) {
    SystemConfig cfg = make_config(args);
    if (!snrs.empty()) cfg.snr_db = snrs;
    const auto points = harness::sweep_size(cfg, sizes, selected_schemes(args));
    deliver(args, harness::cdf_csv(points), plot_path, harness::PlotKind::cdf);
    return 0;
}

int cmd_grad_check(const GlobalArgs& args, int instances, double threshold) {
    const std::uint64_t seed = args.have_seed ? args.seed : 1;
    const auto result = holo_opt::gradient_fd_suite(seed, instances);
    std::cout << "instances: " << result.instances << "\n";
    std::cout << "max_rel_error: " << format_double(result.max_rel_error) << "\n";
    if (result.max_rel_error >= threshold) {
        std::cerr << "gradient check failed: max relative error "
                  << format_double(result.max_rel_error) << " at instance "
                  << result.worst_instance << " (threshold " << format_double(threshold) << ")\n";
        return 1;
    }
    std::cout << "gradient check passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holographic-surface downlink simulator: joint beamforming and QoS scheduling"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs args;
    app.add_option("--config", args.config_path, "Flat key = value configuration file");
    auto* seed_opt = app.add_option("--seed", args.seed, "Override the config seed");
    app.add_option("--out", args.out_path, "Write output to this file instead of stdout");
    app.add_option("--scheme", args.scheme, "Restrict to one scheme")
        ->check(CLI::IsMember({"proposed", "benchmark"}));
    app.add_option("--threads", args.threads, "Worker threads for Monte-Carlo points");

    auto* single = app.add_subcommand("single", "Run one realization and print the solution");
    double snr = 0.0;
    auto* snr_opt = single->add_option("--snr", snr, "SNR point in dB (default: first configured)");

    auto* sweep_snr_cmd = app.add_subcommand("sweep-snr", "Average sum rate over the SNR grid");
    std::string plot_snr;
    sweep_snr_cmd->add_option("--plot-script", plot_snr, "Also emit a matplotlib script");

    auto* sweep_size_cmd =
        app.add_subcommand("sweep-size", "Average sum rate versus RHS element count");
    std::vector<int> sizes{16, 25, 36, 49, 64};
    std::vector<double> size_snrs{10.0, 30.0};
    std::string plot_size;
    sweep_size_cmd->add_option("--sizes", sizes, "Element counts (perfect squares)");
    sweep_size_cmd->add_option("--snr", size_snrs, "Fixed SNR points in dB");
    sweep_size_cmd->add_option("--plot-script", plot_size, "Also emit a matplotlib script");

    auto* cdf_cmd = app.add_subcommand("cdf", "Empirical CDF of per-realization sum rates");
    std::vector<int> cdf_sizes{36, 64};
    std::vector<double> cdf_snrs{10.0, 30.0};
    std::string plot_cdf;
    cdf_cmd->add_option("--sizes", cdf_sizes, "Element counts (perfect squares)");
    cdf_cmd->add_option("--snr", cdf_snrs, "SNR points in dB");
    cdf_cmd->add_option("--plot-script", plot_cdf, "Also emit a matplotlib script");

    auto* grad_cmd = app.add_subcommand("grad-check", "Finite-difference audit of the gradient");
    int instances = 50;
    double threshold = 1e-5;
    grad_cmd->add_option("--instances", instances, "Number of random instances");
    grad_cmd->add_option("--threshold", threshold, "Maximum tolerated relative error");

    CLI11_PARSE(app, argc, argv);
    args.have_seed = seed_opt->count() > 0;

    try {
        if (single->parsed()) return cmd_single(args, snr, snr_opt->count() > 0);
        if (sweep_snr_cmd->parsed()) return cmd_sweep_snr(args, plot_snr);
        if (sweep_size_cmd->parsed()) return cmd_sweep_size(args, sizes, size_snrs, plot_size);
        if (cdf_cmd->parsed()) return cmd_cdf(args, cdf_sizes, cdf_snrs, plot_cdf);
        if (grad_cmd->parsed()) return cmd_grad_check(args, instances, threshold);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
}
